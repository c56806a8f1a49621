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
 * @file checkpoint.hpp
 * Model checkpoints as JSON: a flat list of named arrays.
 *
 *   {"format": "qrl-lake-checkpoint", "version": 1, "solution": "pqc6",
 *    "blocks": [{"name": "policy_circuit", "shape": [28], "values": [...]}, ...]}
 *
 * Values are written with shortest round-trip formatting, so a reload is exact.
 */
#pragma once

#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "errors.hpp"
#include "models.hpp"

namespace qrl::checkpoint {

inline constexpr const char *kFormat = "qrl-lake-checkpoint";
inline constexpr int kVersion = 1;

inline nlohmann::json to_json(const std::string &solution, const models::ParameterSet &params) {
    nlohmann::json blocks = nlohmann::json::array();
    const auto p = params.parameters();
    for (const auto &b : params.blocks()) {
        blocks.push_back({{"name", b.name},
                          {"shape", b.shape},
                          {"values", std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(b.offset),
                                                         p.begin() + static_cast<std::ptrdiff_t>(b.offset + b.size))}});
    }
    return {{"format", kFormat}, {"version", kVersion}, {"solution", solution}, {"blocks", blocks}};
}

inline nlohmann::json to_json(const models::AnyModel &m) {
    return std::visit([](const auto &x) { return to_json(x.solution_id(), x); }, m);
}

/// Rebuilds the model named in the checkpoint and overwrites every block.
/// Missing, extra or mis-shaped blocks are rejected.
inline models::AnyModel from_json(const nlohmann::json &j) {
    if (j.value("format", "") != kFormat || j.value("version", 0) != kVersion) {
        throw std::invalid_argument("not a version-1 qrl-lake checkpoint");
    }
    const auto id = models::SolutionId::parse(j.at("solution").get<std::string>());
    auto model = models::init(id, 0);
    std::visit(
        [&](auto &m) {
            const auto &blocks = j.at("blocks");
            if (blocks.size() != m.blocks().size()) {
                throw std::invalid_argument("checkpoint block count mismatch");
            }
            for (const auto &jb : blocks) {
                const auto name = jb.at("name").get<std::string>();
                const auto &b = m.block(name);
                if (jb.at("shape").get<std::vector<std::size_t>>() != b.shape) {
                    throw std::invalid_argument("checkpoint shape mismatch for " + name);
                }
                const auto values = jb.at("values").get<std::vector<double>>();
                if (values.size() != b.size) {
                    throw std::invalid_argument("checkpoint value count mismatch for " + name);
                }
                std::copy(values.begin(), values.end(), m.view(name).begin());
            }
        },
        model);
    return model;
}

inline void save(const std::string &path, const nlohmann::json &j) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path);
    }
    os << j.dump(1) << '\n';
}

inline models::AnyModel load(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot read " + path);
    }
    return from_json(nlohmann::json::parse(is));
}

} // namespace qrl::checkpoint
