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
 * @file config.hpp
 * Flat `key = value` experiment configuration with a canonical snapshot.
 *
 *   # comment
 *   ppo.total_timesteps = 50000
 *   env.slip_prob = 0.2
 *   grid.seeds = 1,2,3
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../models.hpp"
#include "../ppo.hpp"
#include "../qmetrics.hpp"

namespace qrl::bench {

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<models::SolutionId> default_solutions() {
    std::vector<models::SolutionId> out;
    for (int k = 1; k <= circuits::kCircuitCount; ++k) out.push_back({models::ModelKind::Hybrid, k});
    for (int h : {2, 4, 8, 16}) out.push_back({models::ModelKind::Mlp, h});
    return out;
}

struct RunConfig {
    ppo::PpoConfig ppo;
    ppo::EnvConfig env;
    qmetrics::MetricsConfig metrics;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<models::SolutionId> solutions = default_solutions();
    std::size_t smoothing_window = 10;
    double reward_threshold = 0.81;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T> T parse_number(const std::string &key, const std::string &v) {
    T out{};
    const auto *end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
    return out;
}

inline bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

template <class T> std::string fmt(const T &v) {
    if constexpr (std::is_floating_point_v<T>) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    } else if constexpr (std::is_same_v<T, bool>) {
        return v ? "true" : "false";
    } else {
        return std::to_string(v);
    }
}

struct Field {
    std::string key;
    std::function<void(RunConfig &, const std::string &)> set;
    std::function<std::string(const RunConfig &)> get;
};

#define QRL_FIELD(KEY, MEMBER)                                                                \
    Field {                                                                                   \
        KEY,                                                                                  \
            [](RunConfig &c, const std::string &v) {                                          \
                using T = std::remove_reference_t<decltype(c.MEMBER)>;                        \
                if constexpr (std::is_same_v<T, bool>) c.MEMBER = parse_bool(KEY, v);         \
                else c.MEMBER = parse_number<T>(KEY, v);                                      \
            },                                                                                \
            [](const RunConfig &c) { return fmt(c.MEMBER); }                                  \
    }

inline const std::vector<Field> &fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v{
            QRL_FIELD("ppo.total_timesteps", ppo.total_timesteps),
            QRL_FIELD("ppo.rollout_length", ppo.rollout_length),
            QRL_FIELD("ppo.minibatch_size", ppo.minibatch_size),
            QRL_FIELD("ppo.epochs_per_update", ppo.epochs_per_update),
            QRL_FIELD("ppo.gamma", ppo.gamma),
            QRL_FIELD("ppo.gae_lambda", ppo.gae_lambda),
            QRL_FIELD("ppo.clip_epsilon", ppo.clip_epsilon),
            QRL_FIELD("ppo.learning_rate", ppo.learning_rate),
            QRL_FIELD("ppo.adam_beta1", ppo.adam_beta1),
            QRL_FIELD("ppo.adam_beta2", ppo.adam_beta2),
            QRL_FIELD("ppo.adam_eps", ppo.adam_eps),
            QRL_FIELD("ppo.value_coef", ppo.value_coef),
            QRL_FIELD("ppo.entropy_coef", ppo.entropy_coef),
            QRL_FIELD("ppo.max_grad_norm", ppo.max_grad_norm),
            Field{"ppo.advantage_norm",
                  [](RunConfig &c, const std::string &v) {
                      try {
                          c.ppo.advantage_norm = ppo::parse_advantage_norm(v);
                      } catch (const std::invalid_argument &e) {
                          throw ConfigError(e.what());
                      }
                  },
                  [](const RunConfig &c) { return std::string(ppo::advantage_norm_name(c.ppo.advantage_norm)); }},
            QRL_FIELD("ppo.update_policy", ppo.update_policy),
            QRL_FIELD("ppo.eval_interval", ppo.eval_interval),
            QRL_FIELD("ppo.reward_window", ppo.reward_window),
            Field{"env.map", [](RunConfig &c, const std::string &v) { c.env.map = v; },
                  [](const RunConfig &c) { return c.env.map; }},
            QRL_FIELD("env.slip_prob", env.slip_prob),
            QRL_FIELD("env.max_episode_steps", env.max_episode_steps),
            QRL_FIELD("metrics.expr_pairs", metrics.expr_pairs),
            QRL_FIELD("metrics.expr_bins", metrics.expr_bins),
            QRL_FIELD("metrics.ent_samples", metrics.ent_samples),
            QRL_FIELD("metrics.ed_gamma", metrics.ed_gamma),
            QRL_FIELD("metrics.ed_n", metrics.ed_n),
            QRL_FIELD("metrics.ed_theta_samples", metrics.ed_theta_samples),
            QRL_FIELD("metrics.ed_k", metrics.ed_k),
            QRL_FIELD("metrics.ed_weight_box", metrics.ed_weight_box),
            QRL_FIELD("metrics.seed", metrics.seed),
            Field{"grid.seeds",
                  [](RunConfig &c, const std::string &v) {
                      c.seeds.clear();
                      for (const auto &s : split_list(v)) c.seeds.push_back(parse_number<std::uint64_t>("grid.seeds", s));
                      if (c.seeds.empty()) throw ConfigError("grid.seeds is empty");
                  },
                  [](const RunConfig &c) {
                      std::string out;
                      for (auto s : c.seeds) out += (out.empty() ? "" : ",") + std::to_string(s);
                      return out;
                  }},
            Field{"grid.solutions",
                  [](RunConfig &c, const std::string &v) {
                      c.solutions.clear();
                      try {
                          for (const auto &s : split_list(v)) c.solutions.push_back(models::SolutionId::parse(s));
                      } catch (const std::invalid_argument &e) {
                          throw ConfigError(e.what());
                      }
                      if (c.solutions.empty()) throw ConfigError("grid.solutions is empty");
                  },
                  [](const RunConfig &c) {
                      std::string out;
                      for (const auto &s : c.solutions) out += (out.empty() ? "" : ",") + s.str();
                      return out;
                  }},
            QRL_FIELD("report.smoothing_window", smoothing_window),
            QRL_FIELD("report.reward_threshold", reward_threshold),
        };
        return v;
    }();
    return f;
}

#undef QRL_FIELD

} // namespace detail

/// Applies one `key = value` assignment.
inline void set(RunConfig &cfg, const std::string &key, const std::string &value) {
    for (const auto &f : detail::fields()) {
        if (f.key == key) {
            f.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream &is, RunConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto body = detail::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        set(cfg, detail::trim(std::string_view(body).substr(0, eq)),
            detail::trim(std::string_view(body).substr(eq + 1)));
    }
    try {
        cfg.ppo.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    if (cfg.smoothing_window == 0) throw ConfigError("report.smoothing_window must be >= 1");
    return cfg;
}

inline RunConfig load_config(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot read config " + path);
    }
    return parse_config(is);
}

/// Every key in canonical order; parsing the snapshot reproduces `cfg`.
inline std::string snapshot(const RunConfig &cfg) {
    std::string out;
    for (const auto &f : detail::fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

} // namespace qrl::bench
