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
 * @file qsim.hpp
 * Dense statevector simulation for small registers.
 *
 * Conventions used throughout the library:
 *  - qubit 0 is the most significant bit of the basis-state index, so on four
 *    qubits |q0 q1 q2 q3> has index 8*q0 + 4*q1 + 2*q2 + q3;
 *  - R_A(theta) = exp(-i theta A / 2) for A in {X, Y, Z};
 *  - CR_A applies R_A to the target iff the control is |1>.
 */
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "circuit_template.hpp"
#include "errors.hpp"

namespace qrl::qsim {

using Complex = std::complex<double>;

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits = 4)
        : StateVector(num_qubits, 0) {}

    StateVector(std::size_t num_qubits, std::size_t basis_index)
        : amps_(check_size(num_qubits), Complex{0.0, 0.0}), num_qubits_(num_qubits) {
        if (basis_index >= amps_.size()) {
            throw std::out_of_range("basis index outside register");
        }
        amps_[basis_index] = 1.0;
    }

    /// Wraps explicit amplitudes; the length must be a power of two. No
    /// renormalisation is performed.
    static StateVector from_amplitudes(std::vector<Complex> amps) {
        if (amps.empty() || !std::has_single_bit(amps.size())) {
            throw std::invalid_argument("amplitude count must be a power of two");
        }
        StateVector s(1);
        s.num_qubits_ = static_cast<std::size_t>(std::countr_zero(amps.size()));
        s.amps_ = std::move(amps);
        return s;
    }

    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<Complex> amplitudes() { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] Complex &operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// Bit mask of `qubit` inside a basis index.
    [[nodiscard]] std::size_t mask(std::size_t qubit) const {
        return std::size_t{1} << (num_qubits_ - 1 - qubit);
    }

  private:
    static std::size_t check_size(std::size_t n) {
        if (n == 0 || n > 20) {
            throw std::invalid_argument("qubit count must be in 1..20");
        }
        return std::size_t{1} << n;
    }

    std::vector<Complex> amps_;
    std::size_t num_qubits_;
};

/// Row-major 2x2 matrix acting on a single (target) qubit.
using Mat2 = std::array<Complex, 4>;

namespace detail {

inline constexpr Complex kI{0.0, 1.0};

inline Mat2 pauli(GateKind k) {
    switch (k) {
    case GateKind::RX:
    case GateKind::CRX:
    case GateKind::CNOT: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::RY: return {0.0, -kI, kI, 0.0};
    case GateKind::RZ:
    case GateKind::CRZ:
    case GateKind::CZ: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::H: break;
    }
    return {1.0, 0.0, 0.0, 1.0};
}

inline Mat2 mul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 dagger(const Mat2 &m) {
    return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

/**
 * Applies `m` to `target`. With a control, only the control=|1> subspace is
 * touched; if `project` is set the control=|0> amplitudes are zeroed instead
 * of left alone (used for derivatives of controlled rotations).
 */
inline void apply_mat2(StateVector &state, std::size_t target, const Mat2 &m,
                       std::optional<std::size_t> control = std::nullopt,
                       bool project = false) {
    auto amps = state.amplitudes();
    const std::size_t t = state.mask(target);
    const std::size_t c = control ? state.mask(*control) : 0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & t) {
            continue;
        }
        const std::size_t j = i | t;
        if (control && (i & c) == 0) {
            if (project) {
                amps[i] = 0.0;
                amps[j] = 0.0;
            }
            continue;
        }
        const Complex a = amps[i];
        const Complex b = amps[j];
        amps[i] = m[0] * a + m[1] * b;
        amps[j] = m[2] * a + m[3] * b;
    }
}

} // namespace detail

/// Angle a gate uses, from its fixed value or from `params`.
inline double gate_angle(const GateOp &gate, std::span<const double> params) {
    if (gate.fixed_angle) {
        return *gate.fixed_angle;
    }
    if (gate.param_slot) {
        if (*gate.param_slot >= params.size()) {
            throw InvalidCircuit("parameter slot " + std::to_string(*gate.param_slot) +
                                 " out of range");
        }
        return params[*gate.param_slot];
    }
    return 0.0;
}

/// The single-qubit (target) block of a gate. For CNOT/CZ/CRX/CRZ this is
/// the matrix applied when the control is set.
inline Mat2 gate_matrix(GateKind kind, double angle) {
    switch (kind) {
    case GateKind::H: {
        const double r = 0.5 * std::numbers::sqrt2;
        return {r, r, r, -r};
    }
    case GateKind::CNOT:
    case GateKind::CZ: return detail::pauli(kind);
    case GateKind::RX:
    case GateKind::CRX: {
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        return {c, Complex{0, -s}, Complex{0, -s}, c};
    }
    case GateKind::RY: {
        const double c = std::cos(angle / 2), s = std::sin(angle / 2);
        return {c, -s, s, c};
    }
    case GateKind::RZ:
    case GateKind::CRZ:
        return {std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2)};
    }
    return {1.0, 0.0, 0.0, 1.0};
}

/// d/dtheta of the target block of a rotation: -i/2 * A * R_A(theta).
inline Mat2 gate_matrix_derivative(GateKind kind, double angle) {
    Mat2 d = detail::mul(detail::pauli(kind), gate_matrix(kind, angle));
    for (auto &x : d) {
        x *= Complex{0.0, -0.5};
    }
    return d;
}

inline void validate_gate(const GateOp &gate, std::size_t num_qubits) {
    for (std::size_t w = 0; w < gate.arity(); ++w) {
        if (gate.wires[w] >= num_qubits) {
            throw InvalidCircuit(std::string(gate_name(gate.kind)) + " wire " +
                                 std::to_string(gate.wires[w]) + " out of range");
        }
    }
    if (gate.arity() == 2 && gate.wires[0] == gate.wires[1]) {
        throw InvalidCircuit(std::string(gate_name(gate.kind)) + " wires must differ");
    }
    if (is_parametrized(gate.kind)) {
        if (gate.param_slot.has_value() == gate.fixed_angle.has_value()) {
            throw InvalidCircuit(std::string(gate_name(gate.kind)) +
                                 " needs exactly one of param_slot / fixed_angle");
        }
    } else if (gate.param_slot || gate.fixed_angle) {
        throw InvalidCircuit(std::string(gate_name(gate.kind)) + " takes no angle");
    }
}

/// Checks wires and the slot layout (each slot 0..P-1 used exactly once).
inline void validate_template(const CircuitTemplate &tpl) {
    std::vector<int> seen(tpl.param_count, 0);
    for (const auto &g : tpl.gates) {
        validate_gate(g, tpl.num_qubits);
        if (g.param_slot) {
            if (*g.param_slot >= tpl.param_count) {
                throw InvalidCircuit("parameter slot beyond param_count");
            }
            ++seen[*g.param_slot];
        }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
        throw InvalidCircuit("each parameter slot must be used exactly once");
    }
}

/// In-place gate application; `adjoint` applies the inverse.
inline void apply_gate_inplace(StateVector &state, const GateOp &gate,
                               std::span<const double> params, bool adjoint = false) {
    validate_gate(gate, state.num_qubits());
    Mat2 m = gate_matrix(gate.kind, gate_angle(gate, params));
    if (adjoint) {
        m = detail::dagger(m);
    }
    if (gate.arity() == 2) {
        detail::apply_mat2(state, gate.wires[1], m, gate.wires[0]);
    } else {
        detail::apply_mat2(state, gate.wires[0], m);
    }
}

[[nodiscard]] inline StateVector apply_gate(StateVector state, const GateOp &gate,
                                            std::span<const double> params = {}) {
    apply_gate_inplace(state, gate, params);
    return state;
}

inline void check_params(const CircuitTemplate &tpl, std::span<const double> params) {
    if (params.size() != tpl.param_count) {
        throw InvalidCircuit("circuit '" + tpl.name + "' expects " +
                             std::to_string(tpl.param_count) + " parameters, got " +
                             std::to_string(params.size()));
    }
    if (tpl.num_qubits == 0) {
        throw InvalidCircuit("circuit has no qubits");
    }
}

[[nodiscard]] inline StateVector run_circuit(const CircuitTemplate &tpl,
                                             std::span<const double> params,
                                             StateVector input) {
    check_params(tpl, params);
    if (input.num_qubits() != tpl.num_qubits) {
        throw InvalidCircuit("input register size does not match circuit");
    }
    for (const auto &g : tpl.gates) {
        apply_gate_inplace(input, g, params);
    }
    return input;
}

[[nodiscard]] inline StateVector run_circuit(const CircuitTemplate &tpl,
                                             std::span<const double> params) {
    return run_circuit(tpl, params, StateVector(tpl.num_qubits));
}

/// Exact <Z_i> for every qubit.
[[nodiscard]] inline std::vector<double> z_expectations(const StateVector &state) {
    std::vector<double> z(state.num_qubits(), 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t k = 0; k < amps.size(); ++k) {
        const double p = std::norm(amps[k]);
        for (std::size_t q = 0; q < z.size(); ++q) {
            z[q] += (k & state.mask(q)) ? -p : p;
        }
    }
    return z;
}

[[nodiscard]] inline Complex inner(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("state dimensions differ");
    }
    Complex s{0.0, 0.0};
    for (std::size_t k = 0; k < a.dim(); ++k) {
        s += std::conj(a[k]) * b[k];
    }
    return s;
}

/// |<a|b>|^2
[[nodiscard]] inline double fidelity(const StateVector &a, const StateVector &b) {
    return std::norm(inner(a, b));
}

/**
 * @brief Adjoint-method gradient of <sum_i w_i Z_i> starting from the
 * circuit's *output* state.
 *
 * The output is un-computed gate by gate; each parametrized gate contributes
 * 2 Re <lambda| dU psi>, where lambda is the observable-applied state pulled
 * back to the same point. Cost: two backward sweeps, no extra forward run.
 */
[[nodiscard]] inline std::vector<double>
adjoint_gradient(const CircuitTemplate &tpl, std::span<const double> params,
                 StateVector output, std::span<const double> observable_weights) {
    check_params(tpl, params);
    if (observable_weights.size() != output.num_qubits()) {
        throw std::invalid_argument("one observable weight per qubit required");
    }
    StateVector lambda = output;
    {
        auto amps = lambda.amplitudes();
        for (std::size_t k = 0; k < amps.size(); ++k) {
            double zk = 0.0;
            for (std::size_t q = 0; q < observable_weights.size(); ++q) {
                zk += (k & lambda.mask(q)) ? -observable_weights[q] : observable_weights[q];
            }
            amps[k] *= zk;
        }
    }
    std::vector<double> grad(tpl.param_count, 0.0);
    StateVector mu(output.num_qubits());
    for (auto it = tpl.gates.rbegin(); it != tpl.gates.rend(); ++it) {
        const GateOp &g = *it;
        apply_gate_inplace(output, g, params, /*adjoint=*/true);
        if (g.param_slot) {
            mu = output;
            const Mat2 d = gate_matrix_derivative(g.kind, params[*g.param_slot]);
            if (g.arity() == 2) {
                detail::apply_mat2(mu, g.wires[1], d, g.wires[0], /*project=*/true);
            } else {
                detail::apply_mat2(mu, g.wires[0], d);
            }
            grad[*g.param_slot] += 2.0 * std::real(inner(lambda, mu));
        }
        apply_gate_inplace(lambda, g, params, /*adjoint=*/true);
    }
    return grad;
}

/// d<sum_i w_i Z_i>/d theta_k for every parameter slot k.
[[nodiscard]] inline std::vector<double>
circuit_gradient(const CircuitTemplate &tpl, std::span<const double> params,
                 const StateVector &input, std::span<const double> observable_weights) {
    return adjoint_gradient(tpl, params, run_circuit(tpl, params, input),
                            observable_weights);
}

/// Tr(rho_q^2) of one qubit's reduced density matrix.
[[nodiscard]] inline double reduced_single_qubit_purity(const StateVector &state,
                                                        std::size_t qubit) {
    if (qubit >= state.num_qubits()) {
        throw std::out_of_range("qubit index out of range");
    }
    const std::size_t m = state.mask(qubit);
    double p0 = 0.0, p1 = 0.0;
    Complex c{0.0, 0.0};
    for (std::size_t k = 0; k < state.dim(); ++k) {
        if (k & m) {
            continue;
        }
        p0 += std::norm(state[k]);
        p1 += std::norm(state[k | m]);
        c += state[k] * std::conj(state[k | m]);
    }
    return p0 * p0 + p1 * p1 + 2.0 * std::norm(c);
}

} // namespace qrl::qsim
