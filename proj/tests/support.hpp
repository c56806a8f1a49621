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

// Shared helpers for the unit tests: random generators and independent
// oracles (finite differences, a dense-matrix circuit simulator).

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qrl/circuit_template.hpp"
#include "qrl/qsim.hpp"
#include "qrl/random.hpp"

namespace qrl::oracle {

inline std::vector<double> random_angles(Rng &rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto &x : v) x = rng.angle();
    return v;
}

/// Haar-ish random state: normalised complex Gaussian amplitudes.
inline qsim::StateVector random_state(Rng &rng, std::size_t qubits = 4) {
    std::vector<qsim::Complex> a(std::size_t{1} << qubits);
    double norm = 0.0;
    for (auto &z : a) {
        // Box-Muller from two uniforms.
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z = {r * std::cos(2 * std::numbers::pi * u2), r * std::sin(2 * std::numbers::pi * u2)};
        norm += std::norm(z);
    }
    for (auto &z : a) z /= std::sqrt(norm);
    return qsim::StateVector::from_amplitudes(std::move(a));
}

/// Central differences, step h.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double> &)> &f,
                                             std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2 * h);
    }
    return g;
}

/// ||a - b|| / max(||b||, floor)
inline double relative_error(const std::vector<double> &a, const std::vector<double> &b, double floor = 1e-8) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

// ---------------------------------------------------------------------------
// Dense oracle: every gate becomes a full 2^n x 2^n matrix built from
// Kronecker products, with qubit 0 as the leftmost factor.

namespace dense {

using Mat = Eigen::MatrixXcd;
using C = std::complex<double>;

inline Mat one_qubit(qrl::GateKind k, double t) {
    Mat m(2, 2);
    const C i(0, 1);
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    switch (k) {
    case GateKind::RX:
    case GateKind::CRX: m << c, -i * s, -i * s, c; break;
    case GateKind::RY: m << c, -s, s, c; break;
    case GateKind::RZ:
    case GateKind::CRZ: m << std::exp(-i * (t / 2)), 0, 0, std::exp(i * (t / 2)); break;
    case GateKind::H: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
    case GateKind::CNOT: m << 0, 1, 1, 0; break;
    case GateKind::CZ: m << 1, 0, 0, -1; break;
    }
    return m;
}

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

/// Tensor product with `ops[q]` on qubit q (identity where empty).
inline Mat embed(std::size_t n, const std::vector<std::pair<std::size_t, Mat>> &ops) {
    Mat out = Mat::Identity(1, 1);
    for (std::size_t q = 0; q < n; ++q) {
        Mat f = Mat::Identity(2, 2);
        for (const auto &[w, m] : ops)
            if (w == q) f = m;
        out = kron(out, f);
    }
    return out;
}

inline Mat gate(std::size_t n, const GateOp &g, double angle) {
    const Mat u = one_qubit(g.kind, angle);
    if (g.arity() == 1) return embed(n, {{g.wires[0], u}});
    Mat p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    // |0><0|_c (x) I + |1><1|_c (x) U_t
    return embed(n, {{g.wires[0], p0}}) + embed(n, {{g.wires[0], p1}, {g.wires[1], u}});
}

inline Eigen::VectorXcd run(const CircuitTemplate &t, const std::vector<double> &params, Eigen::VectorXcd psi) {
    for (const auto &g : t.gates) {
        const double angle = g.param_slot ? params[*g.param_slot] : g.fixed_angle.value_or(0.0);
        psi = gate(t.num_qubits, g, angle) * psi;
    }
    return psi;
}

} // namespace dense
} // namespace qrl::oracle
