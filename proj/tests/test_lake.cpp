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

#include <gtest/gtest.h>

#include <map>

#include "qrl/lake.hpp"

namespace {

using namespace qrl;
using lake::LakeModel;

std::map<std::size_t, double> row(const LakeModel &m, std::size_t s, std::size_t a) {
    std::map<std::size_t, double> out;
    for (const auto &t : m.transitions(s, a)) out[t.next] += t.prob;
    return out;
}

TEST(Model, DeterministicMoves) {
    const LakeModel m(lake::kDefaultMap, 0.0);
    EXPECT_EQ(row(m, 0, 2), (std::map<std::size_t, double>{{1, 1.0}}));
    EXPECT_EQ(row(m, 0, 0), (std::map<std::size_t, double>{{0, 1.0}}));
}

TEST(Model, SlipRowsFromWorkedExamples) {
    const LakeModel m(lake::kDefaultMap, 0.2);
    const auto r14 = row(m, 14, 2);
    ASSERT_EQ(r14.size(), 3u);
    EXPECT_NEAR(r14.at(15), 0.8, 1e-15);
    EXPECT_NEAR(r14.at(10), 0.1, 1e-15);
    EXPECT_NEAR(r14.at(14), 0.1, 1e-15);
    const auto r9 = row(m, 9, 3);
    ASSERT_EQ(r9.size(), 3u);
    EXPECT_NEAR(r9.at(5), 0.8, 1e-15);
    EXPECT_NEAR(r9.at(8), 0.1, 1e-15);
    EXPECT_NEAR(r9.at(10), 0.1, 1e-15);
}

TEST(Model, RowsAreDistributionsOverAllowedValues) {
    const LakeModel m(lake::kDefaultMap, 0.2);
    const std::array<double, 6> allowed{0.0, 0.1, 0.2, 0.8, 0.9, 1.0};
    bool saw_merged = false;
    for (std::size_t s = 0; s < 16; ++s) {
        for (std::size_t a = 0; a < 4; ++a) {
            double sum = 0.0;
            for (std::size_t n = 0; n < 16; ++n) {
                const double p = m.probability(s, a, n);
                sum += p;
                EXPECT_TRUE(std::any_of(allowed.begin(), allowed.end(), [&](double x) { return std::abs(p - x) < 1e-12; }))
                    << s << ' ' << a << ' ' << n << ' ' << p;
                saw_merged |= std::abs(p - 0.9) < 1e-12;
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
    EXPECT_TRUE(saw_merged);
}

TEST(Model, MalformedMapsRejected) {
    EXPECT_THROW(LakeModel("SFFF/FHFH/FFFH/HFFF", 0.2), std::invalid_argument);
    EXPECT_THROW(LakeModel("SFFS/FHFH/FFFH/HFFG", 0.2), std::invalid_argument);
    EXPECT_THROW(LakeModel("SFF/FHFH/FFFH/HFFG", 0.2), std::invalid_argument);
    EXPECT_THROW(LakeModel("SFXF/FHFH/FFFH/HFFG", 0.2), std::invalid_argument);
    EXPECT_THROW(LakeModel(lake::kDefaultMap, 1.0), std::invalid_argument);
}

TEST(Step, RewardsAndTermination) {
    const LakeModel m(lake::kDefaultMap, 0.0);
    Rng rng(1);
    const auto into_hole = lake::step(m, 1, 1, rng);
    EXPECT_EQ(into_hole.state, 5u);
    EXPECT_TRUE(into_hole.done);
    EXPECT_EQ(into_hole.reward, 0.0);
    const auto into_goal = lake::step(m, 14, 2, rng);
    EXPECT_EQ(into_goal.state, 15u);
    EXPECT_TRUE(into_goal.done);
    EXPECT_EQ(into_goal.reward, 1.0);
    EXPECT_THROW((void)lake::step(m, 5, 0, rng), ContractViolation);
    EXPECT_THROW((void)lake::step(m, 15, 0, rng), ContractViolation);
}

TEST(Step, TruncatesAtBudget) {
    const LakeModel m(lake::kDefaultMap, 0.0, 100);
    lake::LakeEnv env(m);
    Rng rng(1);
    env.reset();
    lake::EpisodeStep st;
    for (int i = 0; i < 100; ++i) {
        st = env.step(0, rng); // Left at the wall: never moves
        ASSERT_EQ(st.truncated, i == 99);
        ASSERT_FALSE(st.done);
        ASSERT_EQ(st.reward, 0.0);
    }
    EXPECT_THROW((void)env.step(0, rng), ContractViolation);
    EXPECT_THROW((void)lake::step(m, 0, 0, rng, 100), ContractViolation);
}

TEST(Step, EmpiricalFrequenciesMatchRow) {
    const LakeModel m(lake::kDefaultMap, 0.2);
    Rng rng(5);
    std::map<std::size_t, int> counts;
    const int n = 200000;
    for (int i = 0; i < n; ++i) counts[lake::sample_next(m, 9, 3, rng)]++;
    EXPECT_NEAR(counts[5] / double(n), 0.8, 0.005);
    EXPECT_NEAR(counts[8] / double(n), 0.1, 0.005);
    EXPECT_NEAR(counts[10] / double(n), 0.1, 0.005);
}

TEST(ValueIteration, DeterministicLakeIsSolvable) {
    const auto vi = lake::value_iteration(LakeModel(lake::kDefaultMap, 0.0), 1.0);
    EXPECT_NEAR(vi.values[0], 1.0, 1e-12);
    for (std::size_t h : {5, 7, 11, 12}) EXPECT_EQ(vi.values[h], 0.0);
}

TEST(ValueIteration, MonotoneInSlip) {
    double prev = 2.0;
    for (double slip : {0.0, 0.1, 0.2, 2.0 / 3.0}) {
        const double v = lake::value_iteration(LakeModel(lake::kDefaultMap, slip), 1.0).values[0];
        EXPECT_LE(v, prev + 1e-12) << slip;
        prev = v;
    }
    // The common 2/3-slip lake has optimal success probability 0.8235...
    EXPECT_NEAR(prev, 0.82353, 1e-4);
}

TEST(ValueIteration, MonteCarloAgreesWithOracle) {
    // Without an effective step cap the greedy undiscounted policy achieves V[start].
    const LakeModel m(lake::kDefaultMap, 0.2, 1000000);
    const auto vi = lake::value_iteration(m, 1.0);
    const std::size_t n = 100000;
    const double mc = lake::evaluate_policy(m, vi.policy, n, 42);
    const double se = std::sqrt(vi.values[0] * (1 - vi.values[0]) / double(n));
    EXPECT_NEAR(mc, vi.values[0], 3 * se);
}

TEST(Threshold, SlipperyLakeGivesReferenceThreshold) {
    const auto t = lake::reward_threshold(LakeModel(lake::kDefaultMap, 0.2));
    EXPECT_NEAR(t.optimal_mean, 0.85, 0.015);
    EXPECT_NEAR(t.threshold, 0.81, 0.01);
    EXPECT_DOUBLE_EQ(t.threshold, lake::kThresholdFraction * t.optimal_mean);
}

TEST(Threshold, DeterministicAndDegenerateLakes) {
    const auto det = lake::reward_threshold(LakeModel(lake::kDefaultMap, 0.0));
    EXPECT_DOUBLE_EQ(det.optimal_mean, 1.0);
    EXPECT_DOUBLE_EQ(det.threshold, 0.95);
    const auto none = lake::reward_threshold(LakeModel("SHHH/HHHH/HHHH/HHHG", 0.2));
    EXPECT_EQ(none.threshold, 0.0);
}

} // namespace
