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

// qrl-lake: command-line front end for the lake benchmark.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 run failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qrl/bench/config.hpp"
#include "qrl/bench/metrics.hpp"
#include "qrl/bench/report.hpp"
#include "qrl/bench/runs.hpp"
#include "qrl/circuits.hpp"
#include "qrl/lake.hpp"

namespace {

using namespace qrl;
namespace fs = std::filesystem;

constexpr int kUsage = 1;
constexpr int kFailure = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string config;
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string only;
    std::size_t jobs = 1;
    std::string out = "out";
    std::string solution;
    int circuit_id = 0;
    bool reference = false;
    std::string oracle_out;
};

bench::RunConfig load(const Options &o) {
    return o.config.empty() ? bench::RunConfig{} : bench::load_config(o.config);
}

std::vector<models::SolutionId> parse_only(const std::string &list) {
    std::vector<models::SolutionId> ids;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            ids.push_back(models::SolutionId::parse(item));
        } catch (const std::invalid_argument &e) {
            throw UsageError(e.what());
        }
    }
    return ids;
}

void write_file(const fs::path &p, const std::string &body) {
    bench::write_atomic(p, body);
    std::cout << "wrote " << p.string() << '\n';
}

int cmd_oracle(const Options &o) {
    const auto cfg = load(o);
    const lake::LakeModel m(cfg.env.map, cfg.env.slip_prob, cfg.env.max_episode_steps);
    const auto vi = lake::value_iteration(m, 1.0);
    const auto th = lake::reward_threshold(m);
    const auto pol = lake::value_iteration(m, lake::kThresholdPolicyGamma).policy;
    const char arrows[] = {'<', 'v', '>', '^'};
    std::cout << "slip_prob " << cfg.env.slip_prob << ", value iteration (gamma 1) converged in " << vi.iterations
              << " sweeps\n\nV:\n";
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) std::cout << std::fixed << std::setprecision(4) << vi.values[r * 4 + c] << ' ';
        std::cout << '\n';
    }
    std::cout << "\ngreedy policy (gamma " << lake::kThresholdPolicyGamma << "):\n";
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const std::size_t s = r * 4 + c;
            const auto t = m.tile(s);
            std::cout << (t == lake::Tile::Hole ? 'H' : t == lake::Tile::Goal ? 'G' : arrows[pol[s]]);
        }
        std::cout << '\n';
    }
    std::cout << "\nV[start] = " << std::setprecision(5) << vi.values[m.start()] << "\nMonte Carlo mean (1000 episodes) = "
              << th.optimal_mean << "\nreward threshold = " << th.threshold << '\n';
    if (!o.oracle_out.empty()) {
        std::ostringstream csv;
        csv << "state,value,action\n";
        for (std::size_t s = 0; s < 16; ++s) {
            csv << s << ',' << bench::format_double(vi.values[s]) << ',' << pol[s] << '\n';
        }
        write_file(fs::path(o.oracle_out) / "oracle.csv", csv.str());
    }
    return 0;
}

int cmd_train(const Options &o) {
    const auto cfg = load(o);
    models::SolutionId id;
    try {
        id = models::SolutionId::parse(o.solution);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    const auto seed = o.seed_given ? o.seed : cfg.seeds.front();
    const auto rec = bench::run_one(id, seed, cfg, o.out);
    std::cout << id.label() << " seed " << seed << ": W=" << rec.weights << " MR=" << rec.mr << " TTC=" << rec.ttc
              << "\nwrote " << bench::run_dir(o.out, id, seed).string() << '\n';
    return 0;
}

int cmd_metrics(const Options &o) {
    const auto cfg = load(o);
    const auto ids = o.only.empty() ? cfg.solutions : parse_only(o.only);
    std::vector<bench::SolutionMetrics> rows(ids.size());
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < ids.size();) {
            rows[i] = bench::compute_metrics(ids[i], cfg.metrics);
            std::lock_guard lock(mu);
            std::cout << ids[i].label() << ": ED=" << rows[i].ed;
            if (rows[i].ent) std::cout << " Ent=" << *rows[i].ent << " Exp=" << *rows[i].exp;
            std::cout << '\n';
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(o.jobs, ids.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    std::ostringstream csv;
    bench::write_metrics_csv(csv, rows, cfg.metrics);
    write_file(fs::path(o.out) / "metrics.csv", csv.str());
    return 0;
}

int cmd_grid(const Options &o) {
    auto cfg = load(o);
    if (o.seed_given) cfg.seeds = {o.seed};
    const auto res = bench::run_grid(cfg, o.out, parse_only(o.only), o.jobs, bench::run_one,
                                     [](const std::string &line) { std::cout << line << std::endl; });
    std::cout << res.executed << " run(s) executed, " << res.skipped << " already complete, " << res.failures.size()
              << " failed\n";
    for (const auto &[k, why] : res.failures) std::cerr << "failed " << k << ": " << why << '\n';
    return res.failures.empty() ? 0 : kFailure;
}

std::map<std::string, bench::SolutionMetrics> load_metrics(const fs::path &out) {
    std::ifstream is(out / "metrics.csv");
    if (!is) return {};
    return bench::read_metrics_csv(is);
}

int cmd_report(const Options &o) {
    auto cfg = load(o);
    if (!o.only.empty()) cfg.solutions = parse_only(o.only);
    std::vector<bench::RunRecord> records;
    for (const auto &id : cfg.solutions) {
        for (auto s : cfg.seeds) {
            if (auto r = bench::load_run(o.out, id, s)) records.push_back(std::move(*r));
        }
    }
    const auto files = bench::render_report(records, cfg, load_metrics(o.out), fs::path(o.out) / "report");
    for (const auto &f : files) std::cout << "wrote " << (fs::path(o.out) / "report" / f).string() << '\n';
    for (const auto &w : bench::weight_mismatches(cfg.solutions)) std::cout << "note: " << w << '\n';
    return 0;
}

int cmd_correlate(const Options &o) {
    std::vector<bench::SummaryRow> rows;
    fs::path dir = fs::path(o.out) / (o.reference ? "reference" : "report");
    if (o.reference) {
        rows = bench::reference_summary();
    } else {
        std::ifstream is(dir / "summary.csv");
        if (!is) throw std::runtime_error("no summary.csv in " + dir.string() + "; run `qrl-lake report` first");
        rows = bench::read_summary_csv(is);
    }
    const auto corr = bench::correlate(rows);
    std::ostringstream c, s;
    bench::write_correlations_csv(c, corr);
    bench::write_scatter_csv(s, rows);
    std::cout << c.str();
    write_file(dir / "correlations.csv", c.str());
    write_file(dir / "scatter.csv", s.str());
    return 0;
}

int cmd_dump(const Options &o) {
    if (o.circuit_id != 0) {
        if (o.circuit_id < 1 || o.circuit_id > circuits::kCircuitCount) {
            throw UsageError("--id must be in 1..19");
        }
        circuits::dump(std::cout, circuits::benchmark_circuit(o.circuit_id));
        return 0;
    }
    for (int k = 1; k <= circuits::kCircuitCount; ++k) {
        circuits::dump(std::cout, circuits::benchmark_circuit(k));
        std::cout << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical PPO on the slippery frozen lake"};
    app.require_subcommand(1);
    Options o;
    auto add_config = [&](CLI::App *c) { c->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile); };
    auto add_seed = [&](CLI::App *c) {
        c->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { o.seed = s; o.seed_given = true; }, "run seed");
    };

    auto *oracle = app.add_subcommand("oracle", "value iteration, optimal policy and reward threshold");
    add_config(oracle);
    oracle->add_option("--out", o.oracle_out, "directory for oracle.csv");

    auto *train = app.add_subcommand("train", "train one solution (e.g. pqc6, nn4) for one seed");
    train->add_option("solution", o.solution, "pqcK or nnH")->required();
    add_config(train);
    add_seed(train);
    train->add_option("--out", o.out, "output directory")->capture_default_str();

    auto *metrics = app.add_subcommand("metrics", "Ent, Exp and ED per solution into metrics.csv");
    add_config(metrics);
    metrics->add_option("--only", o.only, "comma-separated solution ids");
    metrics->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    metrics->add_option("--out", o.out, "output directory")->capture_default_str();

    auto *grid = app.add_subcommand("grid", "train all solutions x seeds, skipping completed runs");
    add_config(grid);
    add_seed(grid);
    grid->add_option("--only", o.only, "comma-separated solution ids");
    grid->add_option("--jobs", o.jobs, "parallel runs")->check(CLI::PositiveNumber);
    grid->add_option("--out", o.out, "output directory")->capture_default_str();

    auto *report = app.add_subcommand("report", "summary.csv, correlations and SVG plots from finished runs");
    add_config(report);
    report->add_option("--only", o.only, "comma-separated solution ids");
    report->add_option("--out", o.out, "output directory")->capture_default_str();

    auto *correlate = app.add_subcommand("correlate", "metric vs MR/TTC correlations from summary.csv");
    correlate->add_flag("--reference", o.reference, "use the reference results table instead");
    correlate->add_option("--out", o.out, "output directory")->capture_default_str();

    auto *circuits_cmd = app.add_subcommand("circuits", "circuit templates");
    circuits_cmd->require_subcommand(1);
    auto *dump = circuits_cmd->add_subcommand("dump", "print gate tables");
    dump->add_option("--id", o.circuit_id, "circuit id 1..19 (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*oracle) return cmd_oracle(o);
        if (*train) return cmd_train(o);
        if (*metrics) return cmd_metrics(o);
        if (*grid) return cmd_grid(o);
        if (*report) return cmd_report(o);
        if (*correlate) return cmd_correlate(o);
        if (*dump) return cmd_dump(o);
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const bench::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
