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
 * @file runs.hpp
 * Single training runs, their on-disk layout, and the resumable grid.
 *
 * Layout under the output directory:
 *
 *   runs/<solution>/seed<k>/rewards.csv      step,reward
 *   runs/<solution>/seed<k>/checkpoint.json
 *   runs/<solution>/seed<k>/config.snapshot
 *   manifest.json                            completed and failed run keys
 */
#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "../checkpoint.hpp"
#include "../ppo.hpp"
#include "config.hpp"
#include "stats.hpp"

namespace qrl::bench {

namespace fs = std::filesystem;

struct RunRecord {
    models::SolutionId id;
    std::uint64_t seed = 0;
    ppo::RewardSeries rewards;
    std::size_t weights = 0;
    double mr = 0.0;      ///< max over raw checkpoints
    std::size_t ttc = 0;  ///< timesteps, raw series
};

inline RunRecord make_record(const models::SolutionId &id, std::uint64_t seed,
                             ppo::RewardSeries rewards) {
    if (rewards.checkpoints.empty()) {
        throw std::invalid_argument("run " + id.str() + " has no reward checkpoints");
    }
    RunRecord r{id, seed, std::move(rewards), models::parameter_count(id), 0.0, 0};
    const auto v = r.rewards.values();
    const auto s = r.rewards.steps();
    r.mr = *std::max_element(v.begin(), v.end());
    r.ttc = time_to_convergence(s, v);
    return r;
}

/// Shortest decimal that round-trips, so files are byte-stable.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline void write_rewards_csv(std::ostream &os, const ppo::RewardSeries &r) {
    os << "step,reward\n";
    for (const auto &[t, v] : r.checkpoints) os << t << ',' << format_double(v) << '\n';
}

inline ppo::RewardSeries read_rewards_csv(std::istream &is, const std::string &what = "rewards.csv") {
    std::string line;
    if (!std::getline(is, line) || line != "step,reward") {
        throw std::runtime_error(what + ": missing step,reward header");
    }
    ppo::RewardSeries r;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(what + ": malformed line '" + line + "'");
        std::size_t t = 0;
        double v = 0.0;
        const auto *b = line.data();
        const auto *e = b + line.size();
        const auto r1 = std::from_chars(b, b + comma, t);
        const auto r2 = std::from_chars(b + comma + 1, e, v);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != e) {
            throw std::runtime_error(what + ": malformed line '" + line + "'");
        }
        r.checkpoints.emplace_back(t, v);
    }
    return r;
}

/// Writes `content` to `path` via a temporary file and rename.
inline void write_atomic(const fs::path &path, const std::string &content) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
        if (!os.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline fs::path run_dir(const fs::path &out, const models::SolutionId &id, std::uint64_t seed) {
    return out / "runs" / id.str() / ("seed" + std::to_string(seed));
}

inline std::string run_key(const models::SolutionId &id, std::uint64_t seed) {
    return id.str() + "/" + std::to_string(seed);
}

/// Trains one (solution, seed) and writes its three artifacts.
inline RunRecord run_one(const models::SolutionId &id, std::uint64_t seed, const RunConfig &cfg,
                         const fs::path &out) {
    auto ppo_cfg = cfg.ppo;
    ppo_cfg.seed = seed;
    auto result = ppo::train(id, ppo_cfg, cfg.env);
    const auto dir = run_dir(out, id, seed);
    fs::create_directories(dir);
    RunConfig snap = cfg;
    snap.ppo.seed = seed;
    snap.seeds = {seed};
    snap.solutions = {id};
    write_atomic(dir / "config.snapshot", snapshot(snap));
    std::visit(
        [&](auto &res) {
            write_atomic(dir / "checkpoint.json", checkpoint::to_json(res.model.solution_id(), res.model).dump(1) + "\n");
        },
        result);
    ppo::RewardSeries rewards = std::visit([](auto &res) { return res.rewards; }, result);
    std::ostringstream csv;
    write_rewards_csv(csv, rewards);
    write_atomic(dir / "rewards.csv", csv.str());
    return make_record(id, seed, std::move(rewards));
}

inline std::optional<RunRecord> load_run(const fs::path &out, const models::SolutionId &id,
                                         std::uint64_t seed) {
    const auto p = run_dir(out, id, seed) / "rewards.csv";
    std::ifstream is(p);
    if (!is) return std::nullopt;
    return make_record(id, seed, read_rewards_csv(is, p.string()));
}

/// Completed and failed run keys, persisted with atomic renames.
class Manifest {
  public:
    explicit Manifest(fs::path path) : path_(std::move(path)) {
        std::ifstream is(path_);
        if (!is) return;
        const auto j = nlohmann::json::parse(is);
        for (const auto &k : j.value("completed", nlohmann::json::array())) completed_.insert(k.get<std::string>());
        const auto failed = j.value("failed", nlohmann::json::object());
        for (const auto &[k, v] : failed.items()) failed_[k] = v.get<std::string>();
    }

    [[nodiscard]] bool completed(const std::string &key) const {
        std::lock_guard lock(mu_);
        return completed_.count(key) > 0;
    }

    void mark_completed(const std::string &key) {
        std::lock_guard lock(mu_);
        completed_.insert(key);
        failed_.erase(key);
        flush();
    }

    void mark_failed(const std::string &key, const std::string &why) {
        std::lock_guard lock(mu_);
        failed_[key] = why;
        flush();
    }

    [[nodiscard]] std::map<std::string, std::string> failed() const {
        std::lock_guard lock(mu_);
        return failed_;
    }

  private:
    void flush() const {
        nlohmann::json j{{"completed", completed_}, {"failed", failed_}};
        write_atomic(path_, j.dump(1) + "\n");
    }

    fs::path path_;
    mutable std::mutex mu_;
    std::set<std::string> completed_;
    std::map<std::string, std::string> failed_;
};

struct GridTask {
    models::SolutionId id;
    std::uint64_t seed;
};

/// Solutions x seeds, restricted to `only` when non-empty.
inline std::vector<GridTask> grid_tasks(const RunConfig &cfg,
                                        const std::vector<models::SolutionId> &only = {}) {
    std::vector<GridTask> tasks;
    for (const auto &id : cfg.solutions) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        for (auto s : cfg.seeds) tasks.push_back({id, s});
    }
    return tasks;
}

struct GridResult {
    std::vector<RunRecord> records; ///< completed runs, in task order
    std::size_t executed = 0;
    std::size_t skipped = 0;
    std::map<std::string, std::string> failures;
};

using RunFn = std::function<RunRecord(const models::SolutionId &, std::uint64_t, const RunConfig &,
                                      const fs::path &)>;

/**
 * @brief Runs every task not already in the manifest on up to `jobs` threads.
 * A failing run is recorded in the manifest and the result; the rest go on.
 */
inline GridResult run_grid(const RunConfig &cfg, const fs::path &out,
                           const std::vector<models::SolutionId> &only = {}, std::size_t jobs = 1,
                           const RunFn &run = run_one,
                           const std::function<void(const std::string &)> &log = {}) {
    fs::create_directories(out);
    Manifest manifest(out / "manifest.json");
    const auto tasks = grid_tasks(cfg, only);
    std::vector<std::optional<RunRecord>> slots(tasks.size());
    std::vector<std::size_t> todo;
    GridResult res;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto key = run_key(tasks[i].id, tasks[i].seed);
        if (manifest.completed(key)) {
            slots[i] = load_run(out, tasks[i].id, tasks[i].seed);
            if (slots[i]) {
                ++res.skipped;
                continue;
            }
        }
        todo.push_back(i);
    }
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t n = next.fetch_add(1);
            if (n >= todo.size()) return;
            const auto &t = tasks[todo[n]];
            const auto key = run_key(t.id, t.seed);
            try {
                slots[todo[n]] = run(t.id, t.seed, cfg, out);
                manifest.mark_completed(key);
                if (log) {
                    std::lock_guard lock(log_mu);
                    log(key + " MR=" + format_double(slots[todo[n]]->mr) +
                        " TTC=" + std::to_string(slots[todo[n]]->ttc));
                }
            } catch (const std::exception &e) {
                manifest.mark_failed(key, e.what());
                if (log) {
                    std::lock_guard lock(log_mu);
                    log(key + " FAILED: " + e.what());
                }
            }
        }
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min(jobs, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();
    res.executed = todo.size();
    for (auto &s : slots) {
        if (s) res.records.push_back(std::move(*s));
    }
    for (const auto &[k, v] : manifest.failed()) {
        for (const auto &t : tasks) {
            if (run_key(t.id, t.seed) == k) res.failures[k] = v;
        }
    }
    return res;
}

} // namespace qrl::bench
