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
 * @file qmetrics.hpp
 * Circuit characterisation: expressibility (KL divergence of the output
 * fidelity distribution against Haar), Meyer-Wallach entanglement
 * capability, and the Fisher-information effective dimension.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "circuit_template.hpp"
#include "errors.hpp"
#include "qsim.hpp"
#include "random.hpp"

namespace qrl::qmetrics {

using qsim::StateVector;

struct MetricsConfig {
    std::size_t expr_pairs = 5000;
    std::size_t expr_bins = 75;
    std::size_t ent_samples = 5000;
    double ed_gamma = 1.0;
    double ed_n = 1e5;
    std::size_t ed_theta_samples = 100;
    std::size_t ed_k = 100;
    /// Half-width of the sampling box for classical (head / MLP) weights.
    double ed_weight_box = 1.0;
    std::uint64_t seed = 1234;
};

// ---------------------------------------------------------------------------
// Haar fidelity density

/// (N-1)(1-F)^(N-2)
inline double haar_pdf(double fidelity, int dim) {
    if (dim < 2 || !(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw std::domain_error("haar_pdf needs 0 <= F <= 1 and N >= 2");
    }
    return (dim - 1) * std::pow(1.0 - fidelity, dim - 2);
}

/// Exact Haar probability mass of [lo, hi]: (1-lo)^(N-1) - (1-hi)^(N-1).
inline double haar_bin_mass(double lo, double hi, int dim) {
    return std::pow(1.0 - lo, dim - 1) - std::pow(1.0 - hi, dim - 1);
}

struct FidelityHistogram {
    std::vector<double> edges;
    std::vector<double> pqc;  ///< empirical probability per bin
    std::vector<double> haar; ///< exact Haar probability per bin
    std::size_t sample_count = 0;
};

/// D_KL(p || q) with 0 log(0/q) = 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        if (q[i] <= 0.0) {
            throw NumericalError("reference distribution has an empty bin");
        }
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

inline FidelityHistogram fidelity_histogram(const CircuitTemplate &tpl,
                                            std::size_t sample_pairs, std::size_t bins,
                                            std::uint64_t seed) {
    if (tpl.param_count == 0) {
        throw std::invalid_argument("expressibility needs a parametrized circuit");
    }
    if (bins == 0 || sample_pairs == 0) {
        throw std::invalid_argument("bins and sample count must be positive");
    }
    Rng rng(seed);
    const int dim = 1 << tpl.num_qubits;
    FidelityHistogram h;
    h.sample_count = sample_pairs;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.edges[b] = static_cast<double>(b) / static_cast<double>(bins);
    }
    h.haar.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        h.haar[b] = haar_bin_mass(h.edges[b], h.edges[b + 1], dim);
    }
    std::vector<double> counts(bins, 0.0);
    std::vector<double> a(tpl.param_count), b(tpl.param_count);
    for (std::size_t s = 0; s < sample_pairs; ++s) {
        for (auto &x : a) x = rng.angle();
        for (auto &x : b) x = rng.angle();
        const double f = qsim::fidelity(qsim::run_circuit(tpl, a), qsim::run_circuit(tpl, b));
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(f * static_cast<double>(bins)));
        counts[bin] += 1.0;
    }
    h.pqc.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        h.pqc[i] = counts[i] / static_cast<double>(sample_pairs);
    }
    return h;
}

/// KL(P_PQC || P_Haar) of output fidelities from |0...0>; lower is more expressive.
inline double expressibility(const CircuitTemplate &tpl, std::size_t sample_pairs,
                             std::size_t bins, std::uint64_t seed) {
    const auto h = fidelity_histogram(tpl, sample_pairs, bins, seed);
    return kl_divergence(h.pqc, h.haar);
}

// ---------------------------------------------------------------------------
// Meyer-Wallach

namespace detail {

/// iota_j(b)|psi>: keep amplitudes whose qubit j equals b, drop that qubit.
inline std::vector<qsim::Complex> project_out(const StateVector &s, std::size_t qubit,
                                              bool bit) {
    std::vector<qsim::Complex> out;
    out.reserve(s.dim() / 2);
    const std::size_t m = s.mask(qubit);
    for (std::size_t k = 0; k < s.dim(); ++k) {
        if (static_cast<bool>(k & m) == bit) {
            out.push_back(s[k]);
        }
    }
    return out;
}

/// 1/2 sum_{i,j} |u_i v_j - u_j v_i|^2
inline double generalised_distance(std::span<const qsim::Complex> u,
                                   std::span<const qsim::Complex> v) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            d += std::norm(u[i] * v[j] - u[j] * v[i]);
        }
    }
    return 0.5 * d;
}

} // namespace detail

/// Q from the wedge-product distance definition, without cleanup.
inline double meyer_wallach_distance_form(const StateVector &s) {
    const std::size_t n = s.num_qubits();
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto u = detail::project_out(s, j, false);
        const auto v = detail::project_out(s, j, true);
        sum += detail::generalised_distance(u, v);
    }
    return 4.0 / static_cast<double>(n) * sum;
}

/// Q = 2 (1 - mean_j Tr rho_j^2), without cleanup.
inline double meyer_wallach_purity_form(const StateVector &s) {
    double mean = 0.0;
    for (std::size_t j = 0; j < s.num_qubits(); ++j) {
        mean += qsim::reduced_single_qubit_purity(s, j);
    }
    mean /= static_cast<double>(s.num_qubits());
    return 2.0 * (1.0 - mean);
}

/// Meyer-Wallach Q in [0, 1]. Round-off below 1e-12 is reported as exactly 0
/// so that product states score 0.
inline double meyer_wallach_q(const StateVector &s) {
    const double q = meyer_wallach_distance_form(s);
    if (q < 1e-12) {
        return 0.0;
    }
    return std::min(q, 1.0);
}

/// Mean Q over `samples` uniform parameter draws applied to |0...0>.
inline double entanglement_capability(const CircuitTemplate &tpl, std::size_t samples,
                                      std::uint64_t seed) {
    if (samples == 0) {
        throw std::invalid_argument("need at least one sample");
    }
    Rng rng(seed);
    std::vector<double> theta(tpl.param_count);
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto &x : theta) x = rng.angle();
        sum += meyer_wallach_q(qsim::run_circuit(tpl, theta));
    }
    return sum / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Effective dimension

/**
 * A statistical model p(y|x; theta) over a finite input/output alphabet.
 *
 * `log_prob_gradient` returns d/dtheta log p(y|x; theta) restricted to the
 * `dimension()` parameters being characterised; `sample_parameters` draws a
 * point of the parameter box uniformly.
 */
template <class M>
concept FisherModel = requires(M m, const M cm, std::size_t x, std::size_t y, Rng &rng) {
    { cm.dimension() } -> std::convertible_to<std::size_t>;
    { cm.num_inputs() } -> std::convertible_to<std::size_t>;
    { cm.output_probabilities(x) } -> std::convertible_to<std::vector<double>>;
    { cm.log_prob_gradient(x, y) } -> std::convertible_to<std::vector<double>>;
    { m.sample_parameters(rng) };
};

/// (1/k) sum_j g_j g_j^T with (x_j, y_j) ~ uniform(x) * p(y|x; theta).
template <FisherModel M>
Eigen::MatrixXd empirical_fim(const M &model, std::size_t k, Rng &rng) {
    const std::size_t d = model.dimension();
    Eigen::MatrixXd fim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t x = rng.below(model.num_inputs());
        const auto probs = model.output_probabilities(x);
        const std::size_t y = rng.categorical(probs);
        const auto g = model.log_prob_gradient(x, y);
        const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(d));
        fim.selfadjointView<Eigen::Lower>().rankUpdate(gv);
    }
    fim.triangularView<Eigen::StrictlyUpper>() = fim.transpose();
    return fim / static_cast<double>(k);
}

template <FisherModel M>
Eigen::MatrixXd empirical_fim(const M &model, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    return empirical_fim(model, k, rng);
}

/// kappa = gamma n / (2 pi log n)
inline double ed_kappa(double gamma, double n) {
    return gamma * n / (2.0 * std::numbers::pi * std::log(n));
}

/**
 * @brief Effective dimension from a set of (un-normalised) Fisher matrices
 * sampled uniformly over the parameter box.
 *
 * F_hat = d F / mean_theta tr F;
 * ED = 2 log( mean_theta sqrt det(I + kappa F_hat) ) / log kappa,
 * evaluated with Cholesky log-determinants and log-sum-exp.
 */
inline double effective_dimension_from_fims(std::span<const Eigen::MatrixXd> fims,
                                            double gamma, double n) {
    if (fims.empty()) {
        throw std::invalid_argument("need at least one Fisher matrix");
    }
    if (!(gamma > 0.0 && gamma <= 1.0) || !(n > 1.0)) {
        throw std::domain_error("need gamma in (0,1] and n > 1");
    }
    const double kappa = ed_kappa(gamma, n);
    if (kappa <= 1.0) {
        throw std::domain_error("kappa <= 1: increase n");
    }
    const auto d = fims.front().rows();
    double trace_mean = 0.0;
    for (const auto &f : fims) {
        trace_mean += f.trace();
    }
    trace_mean /= static_cast<double>(fims.size());
    if (!(trace_mean > 0.0)) {
        // Zero Fisher information everywhere: the model does not depend on
        // its parameters at all.
        return 0.0;
    }
    const double scale = kappa * static_cast<double>(d) / trace_mean;
    std::vector<double> half_logdets;
    half_logdets.reserve(fims.size());
    for (const auto &f : fims) {
        Eigen::MatrixXd m = scale * f;
        m.diagonal().array() += 1.0;
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("I + kappa*F is not positive definite");
        }
        const double logdet =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        half_logdets.push_back(0.5 * logdet);
    }
    const double mx = *std::max_element(half_logdets.begin(), half_logdets.end());
    double acc = 0.0;
    for (double z : half_logdets) {
        acc += std::exp(z - mx);
    }
    const double log_mean = mx + std::log(acc) - std::log(static_cast<double>(fims.size()));
    return 2.0 * log_mean / std::log(kappa);
}

/// Monte Carlo effective dimension of a model family. `model` is re-sampled
/// in place for each of the `theta_samples` parameter draws.
template <FisherModel M>
double effective_dimension(M &model, double gamma, double n, std::size_t theta_samples,
                           std::size_t k, std::uint64_t seed) {
    if (!(n > 1.0)) {
        throw std::domain_error("need n > 1");
    }
    if (ed_kappa(gamma, n) <= 1.0) {
        throw std::domain_error("kappa <= 1: increase n");
    }
    Rng rng(seed);
    std::vector<Eigen::MatrixXd> fims;
    fims.reserve(theta_samples);
    for (std::size_t t = 0; t < theta_samples; ++t) {
        model.sample_parameters(rng);
        fims.push_back(empirical_fim(model, k, rng));
    }
    return effective_dimension_from_fims(fims, gamma, n);
}

} // namespace qrl::qmetrics
