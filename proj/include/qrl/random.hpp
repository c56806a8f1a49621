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
#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace qrl {

/**
 * @brief Seeded generator with platform-stable derived distributions.
 *
 * Only the raw std::mt19937_64 stream is standardised; the std::*_distribution
 * adaptors are not. Every draw used by training and metrics goes through the
 * helpers below so that a seed reproduces bit-identical results everywhere.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    /// Index drawn from a discrete distribution (weights need not be normalised).
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            total += w;
        }
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) {
                return i;
            }
        }
        // Rounding left u marginally non-negative; fall back to the last
        // index with non-zero mass.
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0.0) {
                return i;
            }
        }
        return weights.size() - 1;
    }

    template <class T> void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    /// Fresh generator whose stream is decorrelated from this one.
    Rng split() { return Rng(engine_() ^ 0x9E3779B97F4A7C15ULL); }

  private:
    std::mt19937_64 engine_;
};

} // namespace qrl
