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
 * @file stats.hpp
 * Series statistics: time to convergence, trailing smoothing, standard
 * errors and Pearson / Spearman correlation.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrl::bench {

inline constexpr double kConvergenceBand = 0.2;
inline constexpr std::size_t kSmoothingWindow = 10;

/**
 * @brief Earliest checkpoint whose value every later checkpoint stays within
 * `band` of. Returns its timestep; the last checkpoint always qualifies.
 */
inline std::size_t time_to_convergence(std::span<const std::size_t> steps,
                                       std::span<const double> values,
                                       double band = kConvergenceBand) {
    if (values.empty() || steps.size() != values.size()) {
        throw std::invalid_argument("time_to_convergence needs a non-empty, aligned series");
    }
    // Tolerates representation error in values like 1.0 - 0.8.
    const double tol = band + 1e-12;
    // Qualification is not monotone in the index, so scan every suffix,
    // keeping its running min / max.
    std::size_t best = values.size() - 1;
    double lo = values.back();
    double hi = values.back();
    for (std::size_t i = values.size() - 1; i-- > 0;) {
        if (values[i] - lo <= tol && hi - values[i] <= tol) {
            best = i;
        }
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    return steps[best];
}

/// Trailing moving average; the first k < window points average what exists.
inline std::vector<double> smooth(std::span<const double> values,
                                  std::size_t window = kSmoothingWindow) {
    if (window == 0) {
        throw std::invalid_argument("smoothing window must be >= 1");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t n = std::min(i + 1, window);
        const auto w = values.subspan(i + 1 - n, n);
        // A uniform window returns its value unchanged; n * c / n can round.
        if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); })) {
            out[i] = w.front();
            continue;
        }
        out[i] = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
    }
    return out;
}

inline double mean(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("mean of empty sample");
    }
    // Shifted by the first value, so identical samples give that value exactly.
    double d = 0.0;
    for (double v : x) d += v - x[0];
    return x[0] + d / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1); 0 for a single value.
inline double sample_std(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Standard error of the mean, std / sqrt(n).
inline double standard_error(std::span<const double> x) {
    return x.empty() ? 0.0 : sample_std(x) / std::sqrt(static_cast<double>(x.size()));
}

/// Pearson r; nullopt when either input has zero variance or n < 2.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    if (x.size() < 2) {
        return std::nullopt;
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks, ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

/// Spearman rho as Pearson on average ranks.
inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

} // namespace qrl::bench
