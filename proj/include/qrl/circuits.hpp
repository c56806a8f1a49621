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
 * @file circuits.hpp
 * Basis embedding and the 19 single-layer benchmark circuits on 4 qubits.
 *
 * Circuits are declared as gate tables. Directed entanglers in a linear
 * chain run bottom-up: control on qubit q, target on q-1, for q = 3, 2, 1.
 * Circular and shifted-circular rings use the orders listed in the tables
 * below; `dump` prints the exact layout.
 */
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "circuit_template.hpp"
#include "errors.hpp"
#include "qsim.hpp"

namespace qrl::circuits {

inline constexpr std::size_t kQubits = 4;
inline constexpr std::size_t kStates = 16;
inline constexpr int kCircuitCount = 19;
/// Trainable scalars outside the two circuits: 4x4+4 policy head, 4x1+1 value head.
inline constexpr std::size_t kHeadParams = 25;

/// RX(pi*b_i) then RZ(pi*b_i) on each qubit, b_0 = most significant bit.
inline CircuitTemplate embedding_circuit(std::size_t state_index) {
    if (state_index >= kStates) {
        throw std::out_of_range("state index must be in 0..15");
    }
    CircuitTemplate t;
    t.id = 0;
    t.name = "embedding(" + std::to_string(state_index) + ")";
    for (std::size_t q = 0; q < kQubits; ++q) {
        const bool bit = (state_index >> (kQubits - 1 - q)) & 1U;
        const double angle = bit ? std::numbers::pi : 0.0;
        t.gates.push_back(GateOp::fixed(GateKind::RX, q, angle));
        t.gates.push_back(GateOp::fixed(GateKind::RZ, q, angle));
    }
    return t;
}

namespace detail {

using Pair = std::pair<std::size_t, std::size_t>; // (control, target)

// Entangler wirings shared by several circuits.
inline const std::vector<Pair> kLinear{{3, 2}, {2, 1}, {1, 0}};
inline const std::vector<Pair> kLinearSwapped{{3, 2}, {1, 0}, {2, 1}};
inline const std::vector<Pair> kCircular{{3, 0}, {2, 3}, {1, 2}, {0, 1}};
inline const std::vector<Pair> kShiftedCircular{{3, 2}, {0, 3}, {1, 0}, {2, 1}};
inline const std::vector<Pair> kCzRing{{3, 2}, {2, 1}, {1, 0}, {0, 3}};

inline std::vector<Pair> all_to_all() {
    std::vector<Pair> out;
    for (std::size_t c = kQubits; c-- > 0;) {
        for (std::size_t t = kQubits; t-- > 0;) {
            if (t != c) {
                out.emplace_back(c, t);
            }
        }
    }
    return out;
}

class Builder {
  public:
    Builder(int id, EntanglerKind ent, Topology topo) {
        t_.id = id;
        t_.name = "pqc" + std::to_string(id);
        t_.entangler = ent;
        t_.topology = topo;
    }

    Builder &rot(GateKind k, std::initializer_list<std::size_t> wires) {
        for (auto w : wires) {
            t_.gates.push_back(GateOp::trainable(k, w, t_.param_count++));
        }
        return *this;
    }
    Builder &rot(GateKind k) { return rot(k, {0, 1, 2, 3}); }
    Builder &plain(GateKind k) {
        for (std::size_t w = 0; w < kQubits; ++w) {
            t_.gates.push_back(GateOp::plain(k, w));
        }
        return *this;
    }
    Builder &ent(GateKind k, const std::vector<Pair> &pairs) {
        for (const auto &[c, tg] : pairs) {
            if (is_parametrized(k)) {
                t_.gates.push_back(GateOp::controlled(k, c, tg, t_.param_count++));
            } else {
                t_.gates.push_back(GateOp::plain(k, c, tg));
            }
        }
        return *this;
    }
    CircuitTemplate done() { return std::move(t_); }

  private:
    CircuitTemplate t_;
};

inline CircuitTemplate build(int id) {
    using enum GateKind;
    using E = EntanglerKind;
    using T = Topology;
    switch (id) {
    case 1: return Builder(1, E::None, T::None).rot(RX).rot(RZ).done();
    case 2: return Builder(2, E::CNOT, T::Linear).rot(RX).rot(RZ).ent(CNOT, kLinear).done();
    case 3: return Builder(3, E::CRZ, T::Linear).rot(RX).rot(RZ).ent(CRZ, kLinear).done();
    case 4: return Builder(4, E::CRX, T::Linear).rot(RX).rot(RZ).ent(CRX, kLinear).done();
    case 5:
        return Builder(5, E::CRZ, T::AllToAll)
            .rot(RX).rot(RZ).ent(CRZ, all_to_all()).rot(RX).rot(RZ).done();
    case 6:
        return Builder(6, E::CRX, T::AllToAll)
            .rot(RX).rot(RZ).ent(CRX, all_to_all()).rot(RX).rot(RZ).done();
    case 7:
        return Builder(7, E::CRZ, T::Pairwise)
            .rot(RX).rot(RZ).ent(CRZ, {{1, 0}, {3, 2}})
            .rot(RX).rot(RZ).ent(CRZ, {{2, 1}}).done();
    case 8:
        return Builder(8, E::CRX, T::Pairwise)
            .rot(RX).rot(RZ).ent(CRX, {{1, 0}, {3, 2}})
            .rot(RX).rot(RZ).ent(CRX, {{2, 1}}).done();
    case 9: return Builder(9, E::CZ, T::Linear).plain(H).ent(CZ, kLinear).rot(RX).done();
    case 10: return Builder(10, E::CZ, T::Circular).rot(RY).ent(CZ, kCzRing).rot(RY).done();
    case 11:
        return Builder(11, E::CNOT, T::Pairwise)
            .rot(RY).rot(RZ).ent(CNOT, {{1, 0}, {3, 2}})
            .rot(RY, {1, 2}).rot(RZ, {1, 2}).ent(CNOT, {{2, 1}}).done();
    case 12:
        return Builder(12, E::CZ, T::Pairwise)
            .rot(RY).rot(RZ).ent(CZ, {{1, 0}, {3, 2}})
            .rot(RY, {1, 2}).rot(RZ, {1, 2}).ent(CZ, {{2, 1}}).done();
    case 13:
        return Builder(13, E::CRZ, T::ShiftedCircularAlternating)
            .rot(RY).ent(CRZ, kCircular).rot(RY).ent(CRZ, kShiftedCircular).done();
    case 14:
        return Builder(14, E::CRX, T::ShiftedCircularAlternating)
            .rot(RY).ent(CRX, kCircular).rot(RY).ent(CRX, kShiftedCircular).done();
    case 15:
        return Builder(15, E::CNOT, T::ShiftedCircularAlternating)
            .rot(RY).ent(CNOT, kCircular).rot(RY).ent(CNOT, kShiftedCircular).done();
    case 16: return Builder(16, E::CRZ, T::Linear).rot(RX).rot(RZ).ent(CRZ, kLinearSwapped).done();
    case 17: return Builder(17, E::CRX, T::Linear).rot(RX).rot(RZ).ent(CRX, kLinearSwapped).done();
    case 18: return Builder(18, E::CRZ, T::Circular).rot(RX).rot(RZ).ent(CRZ, kCircular).done();
    case 19: return Builder(19, E::CRX, T::Circular).rot(RX).rot(RZ).ent(CRX, kCircular).done();
    default: break;
    }
    throw std::out_of_range("benchmark circuit id must be in 1..19");
}

} // namespace detail

/// Single-layer template of benchmark circuit `id` (1..19).
inline const CircuitTemplate &benchmark_circuit(int id) {
    static const std::array<CircuitTemplate, kCircuitCount> table = [] {
        std::array<CircuitTemplate, kCircuitCount> out;
        for (int i = 1; i <= kCircuitCount; ++i) {
            out[i - 1] = detail::build(i);
            qsim::validate_template(out[i - 1]);
        }
        return out;
    }();
    if (id < 1 || id > kCircuitCount) {
        throw std::out_of_range("benchmark circuit id must be in 1..19");
    }
    return table[id - 1];
}

/// Trainable weights of the full hybrid model using circuit `id`.
inline std::size_t hybrid_weight_count(int id) {
    return 2 * benchmark_circuit(id).param_count + kHeadParams;
}

/// id -> (circuit parameter count P, hybrid model weight count W = 2P + 25).
inline std::map<int, std::pair<std::size_t, std::size_t>> param_count_table() {
    std::map<int, std::pair<std::size_t, std::size_t>> out;
    for (int id = 1; id <= kCircuitCount; ++id) {
        out[id] = {benchmark_circuit(id).param_count, hybrid_weight_count(id)};
    }
    return out;
}

/// Plain-text gate table, one gate per line.
inline void dump(std::ostream &os, const CircuitTemplate &t) {
    os << "# circuit " << t.name << "  qubits=" << t.num_qubits
       << "  params=" << t.param_count << "  entangler=" << entangler_name(t.entangler)
       << "  topology=" << topology_name(t.topology) << '\n';
    os << "# index gate wires param\n";
    for (std::size_t i = 0; i < t.gates.size(); ++i) {
        const auto &g = t.gates[i];
        os << i << ' ' << gate_name(g.kind) << ' ';
        if (g.arity() == 2) {
            os << g.wires[0] << "->" << g.wires[1];
        } else {
            os << g.wires[0];
        }
        if (g.param_slot) {
            os << " theta[" << *g.param_slot << ']';
        } else if (g.fixed_angle) {
            os << ' ' << *g.fixed_angle;
        } else {
            os << " -";
        }
        os << '\n';
    }
}

inline std::string dump(const CircuitTemplate &t) {
    std::ostringstream os;
    dump(os, t);
    return os.str();
}

} // namespace qrl::circuits
