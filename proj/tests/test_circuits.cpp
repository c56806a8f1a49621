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

#include <set>

#include "qrl/circuits.hpp"
#include "qrl/qsim.hpp"

namespace {

using namespace qrl;

// Reference total weight counts W for circuits 1..19.
constexpr std::array<std::size_t, 19> kReferenceW{41, 41, 47, 47, 81, 81, 63, 63, 33, 41,
                                                  49, 49, 57, 57, 41, 47, 47, 49, 49};

TEST(Embedding, BasisStates) {
    for (std::size_t s = 0; s < 16; ++s) {
        const auto out = qsim::run_circuit(circuits::embedding_circuit(s), {});
        for (std::size_t k = 0; k < 16; ++k) {
            ASSERT_NEAR(std::abs(out[k]), k == s ? 1.0 : 0.0, 1e-15) << "s=" << s << " k=" << k;
        }
    }
    EXPECT_EQ(qsim::z_expectations(qsim::run_circuit(circuits::embedding_circuit(9), {})),
              (std::vector<double>{-1, 1, 1, -1}));
    EXPECT_THROW((void)circuits::embedding_circuit(16), std::out_of_range);
}

TEST(Embedding, AnglesAreZeroOrPi) {
    const auto e0 = circuits::embedding_circuit(0);
    for (const auto &g : e0.gates) EXPECT_EQ(*g.fixed_angle, 0.0);
    const auto e9 = circuits::embedding_circuit(9);
    ASSERT_EQ(e9.gates.size(), 8u);
    // RX then RZ per qubit; bits of 9 = 1001 with qubit 0 the MSB.
    const std::array<int, 4> bits{1, 0, 0, 1};
    for (std::size_t q = 0; q < 4; ++q) {
        EXPECT_EQ(e9.gates[2 * q].kind, GateKind::RX);
        EXPECT_EQ(e9.gates[2 * q + 1].kind, GateKind::RZ);
        EXPECT_EQ(*e9.gates[2 * q].fixed_angle, bits[q] * std::numbers::pi);
    }
}

TEST(Templates, ParameterCountsMatchReferenceWeights) {
    const auto table = circuits::param_count_table();
    ASSERT_EQ(table.size(), 19u);
    std::size_t sum_p = 0, sum_w = 0;
    for (int id = 1; id <= 19; ++id) {
        const auto [p, w] = table.at(id);
        EXPECT_EQ(w, kReferenceW[static_cast<std::size_t>(id - 1)]) << "circuit " << id;
        EXPECT_EQ(2 * p + 25, w);
        EXPECT_EQ(circuits::benchmark_circuit(id).param_count, p);
        sum_p += p;
        sum_w += w;
    }
    EXPECT_EQ((sum_w - 19 * 25) / 2, sum_p);
    EXPECT_EQ(table.at(6), std::make_pair(std::size_t{28}, std::size_t{81}));
    EXPECT_EQ(table.at(13), std::make_pair(std::size_t{16}, std::size_t{57}));
    EXPECT_EQ(table.at(9).first, 4u);
}

TEST(Templates, SlotsUsedExactlyOnce) {
    for (int id = 1; id <= 19; ++id) {
        const auto &t = circuits::benchmark_circuit(id);
        std::multiset<std::size_t> slots;
        for (const auto &g : t.gates) {
            EXPECT_EQ(g.param_slot.has_value(), is_parametrized(g.kind));
            EXPECT_FALSE(g.fixed_angle.has_value());
            if (g.param_slot) slots.insert(*g.param_slot);
        }
        ASSERT_EQ(slots.size(), t.param_count);
        for (std::size_t k = 0; k < t.param_count; ++k) EXPECT_EQ(slots.count(k), 1u) << id;
        EXPECT_NO_THROW(qsim::validate_template(t));
    }
}

TEST(Templates, EntanglementPresence) {
    EXPECT_EQ(circuits::benchmark_circuit(1).two_qubit_gate_count(), 0u);
    for (int id = 2; id <= 19; ++id) EXPECT_GE(circuits::benchmark_circuit(id).two_qubit_gate_count(), 1u) << id;
}

TEST(Templates, SwappedVariantsDifferOnlyInLastTwoEntanglers) {
    for (auto [base, swapped] : {std::pair{3, 16}, std::pair{4, 17}}) {
        const auto &a = circuits::benchmark_circuit(base).gates;
        const auto &b = circuits::benchmark_circuit(swapped).gates;
        ASSERT_EQ(a.size(), b.size());
        const std::size_t n = a.size();
        for (std::size_t i = 0; i + 2 < n; ++i) EXPECT_EQ(a[i].wires, b[i].wires);
        EXPECT_EQ(a[n - 2].wires, b[n - 1].wires);
        EXPECT_EQ(a[n - 1].wires, b[n - 2].wires);
    }
}

TEST(Templates, GateInventory) {
    auto count = [](int id, GateKind k) {
        const auto &g = circuits::benchmark_circuit(id).gates;
        return std::count_if(g.begin(), g.end(), [&](const GateOp &x) { return x.kind == k; });
    };
    EXPECT_EQ(count(2, GateKind::CNOT), 3);
    EXPECT_EQ(count(5, GateKind::CRZ), 12);
    EXPECT_EQ(count(6, GateKind::CRX), 12);
    EXPECT_EQ(count(7, GateKind::CRZ), 3);
    EXPECT_EQ(count(9, GateKind::H), 4);
    EXPECT_EQ(count(9, GateKind::CZ), 3);
    EXPECT_EQ(count(10, GateKind::CZ), 4);
    EXPECT_EQ(count(13, GateKind::CRZ), 8);
    EXPECT_EQ(count(15, GateKind::CNOT), 8);
    EXPECT_EQ(count(18, GateKind::CRZ), 4);
    EXPECT_EQ(circuits::benchmark_circuit(1).entangler, EntanglerKind::None);
    EXPECT_EQ(circuits::benchmark_circuit(5).topology, Topology::AllToAll);
    EXPECT_EQ(circuits::benchmark_circuit(13).topology, Topology::ShiftedCircularAlternating);
}

TEST(Templates, OutOfRangeIdRejected) {
    EXPECT_THROW((void)circuits::benchmark_circuit(0), std::out_of_range);
    EXPECT_THROW((void)circuits::benchmark_circuit(20), std::out_of_range);
}

TEST(Dump, ListsEveryGate) {
    const auto text = circuits::dump(circuits::benchmark_circuit(2));
    EXPECT_NE(text.find("CNOT"), std::string::npos);
    EXPECT_NE(text.find("params=8"), std::string::npos);
    std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    EXPECT_GE(lines, circuits::benchmark_circuit(2).gates.size());
}

} // namespace
