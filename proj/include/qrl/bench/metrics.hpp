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
 * @file metrics.hpp
 * Entanglement capability, expressibility and effective dimension per
 * solution, and their CSV form.
 */
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../circuits.hpp"
#include "../models.hpp"
#include "../qmetrics.hpp"
#include "runs.hpp"

namespace qrl::bench {

struct SolutionMetrics {
    models::SolutionId id;
    std::optional<double> ent; ///< circuits only
    std::optional<double> exp; ///< circuits only
    double ed = 0.0;
    std::size_t ed_dimension = 0;
};

/// Seeds: expressibility uses cfg.seed, entanglement cfg.seed + 1, ED cfg.seed + 2.
inline SolutionMetrics compute_metrics(const models::SolutionId &id, const qmetrics::MetricsConfig &cfg) {
    SolutionMetrics m{id, std::nullopt, std::nullopt, 0.0, 0};
    if (id.kind == models::ModelKind::Hybrid) {
        const auto &tpl = circuits::benchmark_circuit(id.index);
        m.exp = qmetrics::expressibility(tpl, cfg.expr_pairs, cfg.expr_bins, cfg.seed);
        m.ent = qmetrics::entanglement_capability(tpl, cfg.ent_samples, cfg.seed + 1);
    }
    auto model = models::init(id, 0);
    std::visit(
        [&](auto &model) {
            models::PolicyFisherView view{std::move(model), cfg.ed_weight_box};
            m.ed_dimension = view.dimension();
            m.ed = qmetrics::effective_dimension(view, cfg.ed_gamma, cfg.ed_n, cfg.ed_theta_samples,
                                                 cfg.ed_k, cfg.seed + 2);
        },
        model);
    return m;
}

inline constexpr const char *kMetricsHeader =
    "solution,ent,exp,ed,ed_dimension,expr_pairs,expr_bins,ent_samples,ed_theta_samples,ed_k,ed_gamma,ed_n,seed";

inline void write_metrics_csv(std::ostream &os, const std::vector<SolutionMetrics> &rows,
                              const qmetrics::MetricsConfig &cfg) {
    auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
    os << kMetricsHeader << '\n';
    for (const auto &r : rows) {
        os << r.id.str() << ',' << opt(r.ent) << ',' << opt(r.exp) << ',' << format_double(r.ed) << ','
           << r.ed_dimension << ',' << cfg.expr_pairs << ',' << cfg.expr_bins << ',' << cfg.ent_samples << ','
           << cfg.ed_theta_samples << ',' << cfg.ed_k << ',' << format_double(cfg.ed_gamma) << ','
           << format_double(cfg.ed_n) << ',' << cfg.seed << '\n';
    }
}

inline std::map<std::string, SolutionMetrics> read_metrics_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line != kMetricsHeader) {
        throw std::runtime_error("metrics.csv: unexpected header");
    }
    std::map<std::string, SolutionMetrics> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (cells.size() < 5) throw std::runtime_error("metrics.csv: short line '" + line + "'");
        auto opt = [](const std::string &s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        SolutionMetrics m{models::SolutionId::parse(cells[0]), opt(cells[1]), opt(cells[2]), std::stod(cells[3]),
                          static_cast<std::size_t>(std::stoull(cells[4]))};
        out[m.id.str()] = m;
    }
    return out;
}

} // namespace qrl::bench
