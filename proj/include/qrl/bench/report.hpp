// Copyright 2026 The qrl-lake Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file report.hpp
 * Summary table, metric/performance correlations, and self-contained SVG
 * charts (smoothed reward curves with standard-error bands, scatter plots).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "../circuit_template.hpp"
#include "../circuits.hpp"
#include "metrics.hpp"
#include "reference_table.hpp"
#include "runs.hpp"
#include "stats.hpp"

namespace qrl::bench {

struct SummaryRow {
    models::SolutionId id;
    std::size_t weights = 0;
    double mr = 0.0, mr_se = 0.0;
    double ttc_k = 0.0, ttc_k_se = 0.0;
    std::optional<double> ent, exp, ed;
    std::size_t seeds = 0;
};

/**
 * @brief One row per solution in `solutions` order. Every (solution, seed)
 * must have a record; otherwise the error lists all absent runs.
 */
inline std::vector<SummaryRow> summarize(const std::vector<RunRecord> &records,
                                         const std::vector<models::SolutionId> &solutions,
                                         const std::vector<std::uint64_t> &seeds,
                                         const std::map<std::string, SolutionMetrics> &metrics = {}) {
    std::vector<SummaryRow> rows;
    std::vector<std::string> missing;
    for (const auto &id : solutions) {
        std::vector<double> mr, ttc;
        for (auto seed : seeds) {
            const auto it = std::find_if(records.begin(), records.end(),
                                         [&](const RunRecord &r) { return r.id == id && r.seed == seed; });
            if (it == records.end()) {
                missing.push_back(run_key(id, seed));
                continue;
            }
            mr.push_back(it->mr);
            ttc.push_back(static_cast<double>(it->ttc) / 1000.0);
        }
        if (mr.size() != seeds.size()) continue;
        SummaryRow row;
        row.id = id;
        row.weights = models::parameter_count(id);
        row.mr = mean(mr);
        row.mr_se = standard_error(mr);
        row.ttc_k = mean(ttc);
        row.ttc_k_se = standard_error(ttc);
        row.seeds = seeds.size();
        if (const auto m = metrics.find(id.str()); m != metrics.end()) {
            row.ent = m->second.ent;
            row.exp = m->second.exp;
            row.ed = m->second.ed;
        }
        rows.push_back(row);
    }
    if (!missing.empty()) {
        std::string msg = "missing runs:";
        for (const auto &k : missing) msg += " " + k;
        throw std::runtime_error(msg);
    }
    return rows;
}

inline void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows) {
    auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
    os << "solution,W,MR,MR_se,TTC_k,TTC_k_se,Ent,Exp,ED\n";
    for (const auto &r : rows) {
        os << r.id.label() << ',' << r.weights << ',' << format_double(r.mr) << ',' << format_double(r.mr_se)
           << ',' << format_double(r.ttc_k) << ',' << format_double(r.ttc_k_se) << ',' << opt(r.ent) << ','
           << opt(r.exp) << ',' << opt(r.ed) << '\n';
    }
}

inline std::vector<SummaryRow> read_summary_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line != "solution,W,MR,MR_se,TTC_k,TTC_k_se,Ent,Exp,ED") {
        throw std::runtime_error("summary.csv: unexpected header");
    }
    auto opt = [](const std::string &s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return std::stod(s);
    };
    std::vector<SummaryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> c;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            c.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (c.size() != 9) throw std::runtime_error("summary.csv: expected 9 cells in '" + line + "'");
        SummaryRow r;
        r.id = models::SolutionId::parse(c[0]);
        r.weights = static_cast<std::size_t>(std::stoull(c[1]));
        r.mr = std::stod(c[2]);
        r.mr_se = std::stod(c[3]);
        r.ttc_k = std::stod(c[4]);
        r.ttc_k_se = std::stod(c[5]);
        r.ent = opt(c[6]);
        r.exp = opt(c[7]);
        r.ed = opt(c[8]);
        rows.push_back(r);
    }
    return rows;
}

/// Rows built from the reference results.
inline std::vector<SummaryRow> reference_summary() {
    std::vector<SummaryRow> rows;
    for (const auto &r : reference_table()) {
        rows.push_back({r.id, static_cast<std::size_t>(r.weights), r.mr, r.mr_se, r.ttc_k, r.ttc_k_se, r.ent,
                        r.exp, r.ed, 3});
    }
    return rows;
}

/// One line per solution whose trainable count differs from the reference W.
inline std::vector<std::string> weight_mismatches(const std::vector<models::SolutionId> &solutions) {
    std::vector<std::string> out;
    for (const auto &id : solutions) {
        const auto ours = models::parameter_count(id);
        const auto ref = static_cast<std::size_t>(reference_row(id).weights);
        if (ours != ref) {
            out.push_back(id.label() + ": W=" + std::to_string(ours) + ", reference W=" + std::to_string(ref));
        }
    }
    return out;
}

struct Correlation {
    std::string metric, target;
    std::optional<double> pearson, spearman;
    std::size_t n = 0;
};

inline constexpr std::array<const char *, 3> kMetricNames{"Ent", "Exp", "ED"};
inline constexpr std::array<const char *, 2> kTargetNames{"MR", "TTC"};

inline std::optional<double> metric_value(const SummaryRow &r, std::string_view m) {
    if (m == "Ent") return r.ent;
    if (m == "Exp") return r.exp;
    if (m == "ED") return r.ed;
    if (m == "MR") return r.mr;
    if (m == "TTC") return r.ttc_k;
    throw std::invalid_argument("unknown column " + std::string(m));
}

/// Pearson and Spearman of each metric against each target over the hybrid
/// rows that carry that metric. Needs at least 3 such rows.
inline std::vector<Correlation> correlate(const std::vector<SummaryRow> &rows) {
    std::vector<Correlation> out;
    for (const char *m : kMetricNames) {
        for (const char *t : kTargetNames) {
            std::vector<double> x, y;
            for (const auto &r : rows) {
                if (r.id.kind != models::ModelKind::Hybrid) continue;
                const auto xv = metric_value(r, m);
                if (!xv) continue;
                x.push_back(*xv);
                y.push_back(*metric_value(r, t));
            }
            if (x.size() < 3) {
                throw std::invalid_argument(std::string("correlation of ") + m + " needs at least 3 circuit rows, got " +
                                            std::to_string(x.size()));
            }
            out.push_back({m, t, pearson(x, y), spearman(x, y), x.size()});
        }
    }
    return out;
}

inline void write_correlations_csv(std::ostream &os, const std::vector<Correlation> &rows) {
    auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string("undefined"); };
    os << "metric,target,pearson,spearman,n\n";
    for (const auto &c : rows) {
        os << c.metric << ',' << c.target << ',' << opt(c.pearson) << ',' << opt(c.spearman) << ',' << c.n << '\n';
    }
}

inline void write_scatter_csv(std::ostream &os, const std::vector<SummaryRow> &rows) {
    auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
    os << "circuit_id,entangler,topology,Ent,Exp,ED,MR,TTC_k\n";
    for (const auto &r : rows) {
        if (r.id.kind != models::ModelKind::Hybrid) continue;
        const auto &tpl = circuits::benchmark_circuit(r.id.index);
        os << r.id.index << ',' << entangler_name(tpl.entangler) << ',' << topology_name(tpl.topology) << ','
           << opt(r.ent) << ',' << opt(r.exp) << ',' << opt(r.ed) << ',' << format_double(r.mr) << ','
           << format_double(r.ttc_k) << '\n';
    }
}

// ---------------------------------------------------------------------------
// SVG

struct CurveBand {
    std::string label;
    std::vector<double> steps;
    std::vector<double> mean, se; ///< over seeds, of the smoothed curves
};

/// Smooths each seed's raw series, then takes mean and standard error per checkpoint.
inline CurveBand curve_band(const models::SolutionId &id, const std::vector<const RunRecord *> &runs,
                            std::size_t window) {
    if (runs.empty()) throw std::invalid_argument("no runs for " + id.str());
    CurveBand c{id.label(), {}, {}, {}};
    const auto steps = runs.front()->rewards.steps();
    std::vector<std::vector<double>> smoothed;
    for (const auto *r : runs) {
        if (r->rewards.steps() != steps) throw std::invalid_argument("misaligned checkpoints for " + id.str());
        smoothed.push_back(smooth(r->rewards.values(), window));
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::vector<double> col;
        for (const auto &s : smoothed) col.push_back(s[i]);
        c.steps.push_back(static_cast<double>(steps[i]));
        c.mean.push_back(mean(col));
        c.se.push_back(standard_error(col));
    }
    return c;
}

namespace svg {

inline constexpr std::array<const char *, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                      "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Frame {
    double width = 640, height = 400;
    double left = 60, right = 150, top = 30, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    [[nodiscard]] double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    [[nodiscard]] double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline std::string num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

inline std::string escape(const std::string &s) {
    std::string o;
    for (char c : s) {
        switch (c) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        default: o += c;
        }
    }
    return o;
}

inline void open(std::ostream &os, const Frame &f, const std::string &title, const std::string &xlabel,
                 const std::string &ylabel) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
       << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << f.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    const double xa = f.py(f.y0), ya = f.px(f.x0);
    os << "<line x1=\"" << ya << "\" y1=\"" << xa << "\" x2=\"" << f.px(f.x1) << "\" y2=\"" << xa
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ya << "\" y1=\"" << xa << "\" x2=\"" << ya << "\" y2=\"" << f.py(f.y1)
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 5.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 5.0;
        os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(xa + 16) << "\" text-anchor=\"middle\">"
           << num(x) << "</text>\n";
        os << "<text x=\"" << num(ya - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
           << "</text>\n";
    }
    os << "<text x=\"" << num(f.px((f.x0 + f.x1) / 2)) << "\" y=\"" << f.height - 12
       << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os << "<text x=\"14\" y=\"" << num(f.py((f.y0 + f.y1) / 2)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << num(f.py((f.y0 + f.y1) / 2)) << ")\">" << escape(ylabel) << "</text>\n";
}

inline void legend(std::ostream &os, const Frame &f, std::size_t i, const std::string &label, const char *color,
                   bool dashed = false) {
    const double x = f.width - f.right + 12;
    const double y = f.top + 16 + 18 * static_cast<double>(i);
    os << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 20 << "\" y2=\"" << y << "\" stroke=\""
       << color << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    os << "<text x=\"" << x + 26 << "\" y=\"" << y + 4 << "\">" << escape(label) << "</text>\n";
}

} // namespace svg

/**
 * @brief Reward curves with shaded +-1 standard-error bands and a dashed
 * threshold line.
 */
inline void write_reward_svg(std::ostream &os, const std::string &title, const std::vector<CurveBand> &curves,
                             double threshold, std::size_t window) {
    svg::Frame f;
    f.x1 = 1.0;
    for (const auto &c : curves) {
        if (!c.steps.empty()) f.x1 = std::max(f.x1, c.steps.back() / 1000.0);
    }
    f.y0 = 0.0;
    f.y1 = 1.0;
    svg::open(os, f, title, "timesteps (thousands)", "reward (trailing mean over " + std::to_string(window) + " checkpoints)");
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto &c = curves[i];
        const char *color = svg::kPalette[i % svg::kPalette.size()];
        std::ostringstream band, line;
        for (std::size_t k = 0; k < c.steps.size(); ++k) {
            band << (k ? " " : "") << svg::num(f.px(c.steps[k] / 1000.0)) << ','
                 << svg::num(f.py(std::clamp(c.mean[k] + c.se[k], f.y0, f.y1)));
            line << (k ? " " : "") << svg::num(f.px(c.steps[k] / 1000.0)) << ',' << svg::num(f.py(c.mean[k]));
        }
        for (std::size_t k = c.steps.size(); k-- > 0;) {
            band << ' ' << svg::num(f.px(c.steps[k] / 1000.0)) << ','
                 << svg::num(f.py(std::clamp(c.mean[k] - c.se[k], f.y0, f.y1)));
        }
        os << "<polygon points=\"" << band.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        os << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
        svg::legend(os, f, i, c.label, color);
    }
    os << "<line class=\"threshold\" x1=\"" << svg::num(f.px(f.x0)) << "\" y1=\"" << svg::num(f.py(threshold))
       << "\" x2=\"" << svg::num(f.px(f.x1)) << "\" y2=\"" << svg::num(f.py(threshold))
       << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    svg::legend(os, f, curves.size(), "threshold " + svg::num(threshold), "black", true);
    os << "<metadata>smoothing=trailing window=" << window << " band=standard-error-of-smoothed</metadata>\n";
    os << "</svg>\n";
}

/// Scatter of one metric against one target, points labelled by circuit id
/// and coloured by entangling gate.
inline void write_scatter_svg(std::ostream &os, const std::vector<SummaryRow> &rows, const std::string &metric,
                              const std::string &target) {
    std::vector<std::tuple<double, double, int, EntanglerKind>> pts;
    for (const auto &r : rows) {
        if (r.id.kind != models::ModelKind::Hybrid) continue;
        const auto x = metric_value(r, metric);
        if (!x) continue;
        pts.emplace_back(*x, *metric_value(r, target), r.id.index,
                         circuits::benchmark_circuit(r.id.index).entangler);
    }
    svg::Frame f;
    if (!pts.empty()) {
        auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(),
                                                [](auto &a, auto &b) { return std::get<0>(a) < std::get<0>(b); });
        auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(),
                                                [](auto &a, auto &b) { return std::get<1>(a) < std::get<1>(b); });
        const double xpad = std::max(1e-3, 0.1 * (std::get<0>(*xmax) - std::get<0>(*xmin)));
        const double ypad = std::max(1e-3, 0.1 * (std::get<1>(*ymax) - std::get<1>(*ymin)));
        f.x0 = std::get<0>(*xmin) - xpad;
        f.x1 = std::get<0>(*xmax) + xpad;
        f.y0 = std::get<1>(*ymin) - ypad;
        f.y1 = std::get<1>(*ymax) + ypad;
    }
    svg::open(os, f, target + " vs " + metric, metric, target == "TTC" ? "TTC (thousands of steps)" : target);
    const std::array<EntanglerKind, 6> kinds{EntanglerKind::None, EntanglerKind::CNOT, EntanglerKind::CZ,
                                             EntanglerKind::CRX, EntanglerKind::CRZ, EntanglerKind::Mixed};
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        svg::legend(os, f, k, std::string(entangler_name(kinds[k])), svg::kPalette[k]);
    }
    for (const auto &[x, y, id, kind] : pts) {
        const auto k = static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), kind) - kinds.begin());
        os << "<circle cx=\"" << svg::num(f.px(x)) << "\" cy=\"" << svg::num(f.py(y)) << "\" r=\"4\" fill=\""
           << svg::kPalette[k % svg::kPalette.size()] << "\"/>\n";
        os << "<text x=\"" << svg::num(f.px(x) + 6) << "\" y=\"" << svg::num(f.py(y) - 4) << "\" font-size=\"10\">"
           << id << "</text>\n";
    }
    os << "</svg>\n";
}

struct PlotGroup {
    std::string name;
    std::vector<models::SolutionId> members;
};

/// Circuit groups of the reference reward figures, plus the classical baselines.
inline std::vector<PlotGroup> default_plot_groups() {
    auto pqcs = [](std::initializer_list<int> ids) {
        std::vector<models::SolutionId> v;
        for (int k : ids) v.push_back({models::ModelKind::Hybrid, k});
        return v;
    };
    return {
        {"rewards_pqc1-4", pqcs({1, 2, 3, 4})},
        {"rewards_pqc3-4-16-17", pqcs({3, 4, 16, 17})},
        {"rewards_pqc5-8", pqcs({5, 6, 7, 8})},
        {"rewards_pqc9-12", pqcs({9, 10, 11, 12})},
        {"rewards_pqc13-19", pqcs({13, 14, 15, 16, 17, 18, 19})},
        {"rewards_nn", {{models::ModelKind::Mlp, 2}, {models::ModelKind::Mlp, 4}, {models::ModelKind::Mlp, 8},
                        {models::ModelKind::Mlp, 16}}},
    };
}

/**
 * @brief Writes summary.csv, correlations.csv (when at least 3 circuits
 * carry metrics), scatter.csv and all SVGs into `dir`. Returns file names.
 */
inline std::vector<std::string> render_report(const std::vector<RunRecord> &records, const RunConfig &cfg,
                                              const std::map<std::string, SolutionMetrics> &metrics,
                                              const fs::path &dir) {
    fs::create_directories(dir);
    const auto rows = summarize(records, cfg.solutions, cfg.seeds, metrics);
    std::vector<std::string> written;
    auto emit = [&](const std::string &name, const std::string &body) {
        write_atomic(dir / name, body);
        written.push_back(name);
    };
    {
        std::ostringstream os;
        write_summary_csv(os, rows);
        emit("summary.csv", os.str());
    }
    const auto with_metrics = std::count_if(rows.begin(), rows.end(), [](const SummaryRow &r) {
        return r.id.kind == models::ModelKind::Hybrid && r.ent && r.exp && r.ed;
    });
    if (with_metrics >= 3) {
        std::ostringstream c, s;
        write_correlations_csv(c, correlate(rows));
        emit("correlations.csv", c.str());
        write_scatter_csv(s, rows);
        emit("scatter.csv", s.str());
        for (const char *m : kMetricNames) {
            for (const char *t : kTargetNames) {
                std::ostringstream os;
                write_scatter_svg(os, rows, m, t);
                emit(std::string("scatter_") + m + "_" + t + ".svg", os.str());
            }
        }
    }
    for (const auto &g : default_plot_groups()) {
        std::vector<CurveBand> curves;
        for (const auto &id : g.members) {
            if (std::find(cfg.solutions.begin(), cfg.solutions.end(), id) == cfg.solutions.end()) continue;
            std::vector<const RunRecord *> runs;
            for (const auto &r : records) {
                if (r.id == id && std::find(cfg.seeds.begin(), cfg.seeds.end(), r.seed) != cfg.seeds.end()) {
                    runs.push_back(&r);
                }
            }
            curves.push_back(curve_band(id, runs, cfg.smoothing_window));
        }
        if (curves.empty()) continue;
        std::ostringstream os;
        write_reward_svg(os, g.name, curves, cfg.reward_threshold, cfg.smoothing_window);
        emit(g.name + ".svg", os.str());
    }
    if (const auto w = weight_mismatches(cfg.solutions); !w.empty()) {
        std::string body = "Trainable parameter counts that differ from the reference table:\n";
        for (const auto &line : w) body += line + "\n";
        emit("notes.txt", body);
    }
    return written;
}

} // namespace qrl::bench
