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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrl {

enum class GateKind : std::uint8_t { RX, RY, RZ, H, CNOT, CZ, CRX, CRZ };

constexpr bool is_parametrized(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
           k == GateKind::CRX || k == GateKind::CRZ;
}

constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::CNOT || k == GateKind::CZ || k == GateKind::CRX ||
           k == GateKind::CRZ;
}

constexpr std::string_view gate_name(GateKind k) {
    switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::CRX: return "CRX";
    case GateKind::CRZ: return "CRZ";
    }
    return "?";
}

/**
 * @brief One gate of a circuit template.
 *
 * For two-qubit kinds `wires[0]` is the control and `wires[1]` the target
 * (CZ is symmetric). Parametrized kinds read their angle either from a slot
 * of the parameter vector or from `fixed_angle`, never both.
 */
struct GateOp {
    GateKind kind{GateKind::H};
    std::array<std::size_t, 2> wires{};
    std::optional<std::size_t> param_slot;
    std::optional<double> fixed_angle;

    [[nodiscard]] std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }

    static GateOp trainable(GateKind kind, std::size_t wire, std::size_t slot) {
        return {kind, {wire, 0}, slot, std::nullopt};
    }
    static GateOp controlled(GateKind kind, std::size_t control, std::size_t target,
                             std::size_t slot) {
        return {kind, {control, target}, slot, std::nullopt};
    }
    static GateOp fixed(GateKind kind, std::size_t wire, double angle) {
        return {kind, {wire, 0}, std::nullopt, angle};
    }
    static GateOp plain(GateKind kind, std::size_t wire) {
        return {kind, {wire, 0}, std::nullopt, std::nullopt};
    }
    static GateOp plain(GateKind kind, std::size_t control, std::size_t target) {
        return {kind, {control, target}, std::nullopt, std::nullopt};
    }
};

enum class EntanglerKind : std::uint8_t { None, CNOT, CZ, CRX, CRZ, Mixed };
enum class Topology : std::uint8_t {
    None,
    Linear,
    AllToAll,
    Pairwise,
    Circular,
    ShiftedCircularAlternating
};

constexpr std::string_view entangler_name(EntanglerKind k) {
    switch (k) {
    case EntanglerKind::None: return "none";
    case EntanglerKind::CNOT: return "CNOT";
    case EntanglerKind::CZ: return "CZ";
    case EntanglerKind::CRX: return "CRX";
    case EntanglerKind::CRZ: return "CRZ";
    case EntanglerKind::Mixed: return "mixed";
    }
    return "?";
}

constexpr std::string_view topology_name(Topology t) {
    switch (t) {
    case Topology::None: return "none";
    case Topology::Linear: return "linear";
    case Topology::AllToAll: return "all-to-all";
    case Topology::Pairwise: return "pairwise";
    case Topology::Circular: return "circular";
    case Topology::ShiftedCircularAlternating: return "shifted-circular-alternating";
    }
    return "?";
}

/// Ordered gate list with parameter slots 0..param_count-1.
struct CircuitTemplate {
    int id = 0; ///< 1..19 for benchmark circuits, 0 for the embedding
    std::string name;
    std::size_t num_qubits = 4;
    std::vector<GateOp> gates;
    std::size_t param_count = 0;
    EntanglerKind entangler = EntanglerKind::None;
    Topology topology = Topology::None;

    [[nodiscard]] std::size_t two_qubit_gate_count() const {
        std::size_t n = 0;
        for (const auto &g : gates) {
            n += g.arity() == 2 ? 1 : 0;
        }
        return n;
    }
};

} // namespace qrl
