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
 * @file reference_table.hpp
 * Reference benchmark results for the 19 hybrid and 4 classical solutions,
 * used as a regression fixture and as the reference for metric reproduction.
 */
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "../models.hpp"

namespace qrl::bench {

struct ReferenceRow {
    models::SolutionId id;
    int weights;
    double mr, mr_se;
    double ttc_k, ttc_k_se; ///< thousands of steps
    std::optional<double> ent, exp;
    double ed;
};

namespace detail {
inline constexpr models::SolutionId pqc(int k) { return {models::ModelKind::Hybrid, k}; }
inline constexpr models::SolutionId nn(int h) { return {models::ModelKind::Mlp, h}; }
} // namespace detail

/// Rows in the reference order (ascending TTC within each family).
inline const std::array<ReferenceRow, 23> &reference_table() {
    using detail::nn;
    using detail::pqc;
    static const std::array<ReferenceRow, 23> rows{{
        {pqc(2), 41, 0.77, 0.16, 10.33, 7.58, 0.81, 0.28, 3.50},
        {pqc(5), 81, 0.78, 0.22, 11.33, 3.79, 0.41, 0.06, 6.91},
        {pqc(11), 49, 0.71, 0.20, 12.33, 5.17, 0.73, 0.13, 5.08},
        {pqc(9), 33, 0.75, 0.02, 12.50, 1.24, 1.00, 0.67, 3.48},
        {pqc(8), 63, 0.72, 0.08, 14.33, 10.34, 0.39, 0.08, 6.24},
        {pqc(19), 49, 0.71, 0.07, 14.33, 12.50, 0.59, 0.08, 6.29},
        {pqc(7), 63, 0.72, 0.06, 15.33, 16.16, 0.33, 0.09, 5.82},
        {pqc(14), 57, 0.78, 0.25, 16.33, 7.58, 0.66, 0.01, 7.68},
        {pqc(15), 41, 0.76, 0.28, 19.67, 16.54, 0.82, 0.19, 4.60},
        {pqc(16), 47, 0.78, 0.09, 20.00, 25.21, 0.35, 0.26, 3.73},
        {pqc(18), 49, 0.72, 0.10, 20.00, 26.28, 0.44, 0.23, 3.70},
        {pqc(1), 41, 0.72, 0.10, 21.67, 10.34, 0.00, 0.29, 3.29},
        {pqc(4), 47, 0.81, 0.18, 23.67, 14.12, 0.47, 0.13, 5.58},
        {pqc(17), 47, 0.72, 0.09, 25.00, 9.93, 0.40, 0.13, 5.74},
        {pqc(13), 57, 0.72, 0.08, 25.00, 53.79, 0.61, 0.05, 7.07},
        {pqc(6), 81, 0.85, 0.16, 26.00, 4.96, 0.78, 0.00, 7.79},
        {pqc(12), 49, 0.75, 0.19, 26.66, 27.92, 0.65, 0.20, 4.91},
        {pqc(3), 47, 0.79, 0.06, 27.67, 48.25, 0.34, 0.24, 3.72},
        {pqc(10), 41, 0.81, 0.27, 31.67, 14.34, 0.54, 0.22, 3.98},
        {nn(16), 1245, 0.81, 0.10, 11.33, 3.12, std::nullopt, std::nullopt, 48.78},
        {nn(2), 125, 0.84, 0.04, 19.00, 15.51, std::nullopt, std::nullopt, 42.53},
        {nn(4), 237, 0.86, 0.00, 22.00, 5.61, std::nullopt, std::nullopt, 72.13},
        {nn(8), 509, 0.85, 0.02, 24.33, 6.84, std::nullopt, std::nullopt, 74.83},
    }};
    return rows;
}

inline const ReferenceRow &reference_row(const models::SolutionId &id) {
    for (const auto &r : reference_table()) {
        if (r.id == id) {
            return r;
        }
    }
    throw std::out_of_range("no reference row for " + id.str());
}

} // namespace qrl::bench
