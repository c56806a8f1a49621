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
 * @file models.hpp
 * Policy/value function approximators behind one differentiable contract:
 * the hybrid model (basis embedding -> circuit -> <Z> -> linear head) and a
 * two-hidden-layer tanh MLP baseline on one-hot inputs.
 *
 * All trainable scalars live in one flat vector, split into named blocks, so
 * optimisers, checkpoints and Fisher-information code see a single layout.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "circuits.hpp"
#include "qsim.hpp"
#include "random.hpp"

namespace qrl::models {

inline constexpr std::size_t kNumStates = 16;
inline constexpr std::size_t kNumActions = 4;

struct ModelOutput {
    std::array<double, kNumActions> logits{};
    std::array<double, kNumActions> action_probs{};
    double value = 0.0;
};

using Upstream = std::array<double, kNumActions>;

/// Named slice of the flat parameter vector.
struct ParamBlock {
    std::string name;
    std::vector<std::size_t> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
    bool policy = false;  ///< influences the action distribution
    bool angular = false; ///< a rotation angle, periodic in 2 pi
};

inline std::array<double, kNumActions> softmax(const std::array<double, kNumActions> &z) {
    const double mx = *std::max_element(z.begin(), z.end());
    std::array<double, kNumActions> p{};
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumActions; ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (auto &x : p) {
        x /= sum;
    }
    return p;
}

/// Shared flat-storage plumbing.
class ParameterSet {
  public:
    [[nodiscard]] std::span<double> parameters() { return params_; }
    [[nodiscard]] std::span<const double> parameters() const { return params_; }
    [[nodiscard]] std::size_t num_parameters() const { return params_.size(); }
    [[nodiscard]] const std::vector<ParamBlock> &blocks() const { return blocks_; }

    [[nodiscard]] const ParamBlock &block(std::string_view name) const {
        for (const auto &b : blocks_) {
            if (b.name == name) {
                return b;
            }
        }
        throw std::out_of_range("no parameter block named " + std::string(name));
    }
    [[nodiscard]] std::span<double> view(std::string_view name) {
        const auto &b = block(name);
        return std::span<double>(params_).subspan(b.offset, b.size);
    }
    [[nodiscard]] std::span<const double> view(std::string_view name) const {
        const auto &b = block(name);
        return std::span<const double>(params_).subspan(b.offset, b.size);
    }

    /// Flat indices of every policy-relevant scalar, in storage order.
    [[nodiscard]] std::vector<std::size_t> policy_indices() const {
        std::vector<std::size_t> idx;
        for (const auto &b : blocks_) {
            if (b.policy) {
                for (std::size_t i = 0; i < b.size; ++i) {
                    idx.push_back(b.offset + i);
                }
            }
        }
        return idx;
    }

  protected:
    void add_block(std::string name, std::vector<std::size_t> shape, bool policy,
                   bool angular) {
        std::size_t n = 1;
        for (auto s : shape) {
            n *= s;
        }
        blocks_.push_back({std::move(name), std::move(shape), params_.size(), n, policy, angular});
        params_.resize(params_.size() + n, 0.0);
    }

    /// Circuit angles ~ U[0, 2 pi); weights ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)];
    /// biases (rank-1 non-angular blocks) stay 0.
    void initialise(Rng &rng) {
        for (const auto &b : blocks_) {
            auto v = std::span<double>(params_).subspan(b.offset, b.size);
            if (b.angular) {
                for (auto &x : v) x = rng.angle();
            } else if (b.shape.size() == 2) {
                const double bound = 1.0 / std::sqrt(static_cast<double>(b.shape[1]));
                for (auto &x : v) x = rng.uniform(-bound, bound);
            } else {
                std::fill(v.begin(), v.end(), 0.0);
            }
        }
    }

    std::vector<double> params_;
    std::vector<ParamBlock> blocks_;
};

/// Output of each basis-embedding circuit applied to |0000>.
inline const qsim::StateVector &embedded_state(std::size_t s) {
    static const std::array<qsim::StateVector, kNumStates> states = [] {
        std::array<qsim::StateVector, kNumStates> out;
        for (std::size_t i = 0; i < kNumStates; ++i) {
            out[i] = qsim::run_circuit(circuits::embedding_circuit(i), {});
        }
        return out;
    }();
    return states.at(s);
}

/**
 * @brief Policy and value circuits of one architecture with independent
 * angles, each followed by a linear head on the four <Z_i> values.
 *
 * Layout: policy_circuit[P], value_circuit[P], policy_weight[4x4],
 * policy_bias[4], value_weight[1x4], value_bias[1]; 2P + 25 scalars.
 */
class HybridModel : public ParameterSet {
  public:
    explicit HybridModel(int circuit_id) : circuit_(&circuits::benchmark_circuit(circuit_id)) {
        const std::size_t p = circuit_->param_count;
        add_block("policy_circuit", {p}, true, true);
        add_block("value_circuit", {p}, false, true);
        add_block("policy_weight", {kNumActions, 4}, true, false);
        add_block("policy_bias", {kNumActions}, true, false);
        add_block("value_weight", {1, 4}, false, false);
        add_block("value_bias", {1}, false, false);
    }

    static HybridModel init(int circuit_id, std::uint64_t seed) {
        HybridModel m(circuit_id);
        Rng rng(seed);
        m.initialise(rng);
        return m;
    }

    [[nodiscard]] int circuit_id() const { return circuit_->id; }
    [[nodiscard]] const CircuitTemplate &circuit() const { return *circuit_; }
    [[nodiscard]] std::string solution_id() const { return "pqc" + std::to_string(circuit_->id); }

    [[nodiscard]] ModelOutput forward(std::size_t s) const {
        const auto zp = qsim::z_expectations(run(s, "policy_circuit"));
        const auto zv = qsim::z_expectations(run(s, "value_circuit"));
        return head(zp, zv);
    }

    /**
     * Accumulates d loss / d parameters into `grad` given the upstream
     * gradients with respect to the logits and the value.
     */
    void backward(std::size_t s, const Upstream &dlogits, double dvalue,
                  std::span<double> grad) const {
        const auto W = view("policy_weight");
        const auto w = view("value_weight");
        if (std::any_of(dlogits.begin(), dlogits.end(), [](double x) { return x != 0.0; })) {
            auto out = run(s, "policy_circuit");
            const auto z = qsim::z_expectations(out);
            const auto &bw = block("policy_weight");
            const auto &bb = block("policy_bias");
            std::vector<double> dz(4, 0.0);
            for (std::size_t a = 0; a < kNumActions; ++a) {
                for (std::size_t q = 0; q < 4; ++q) {
                    grad[bw.offset + a * 4 + q] += dlogits[a] * z[q];
                    dz[q] += W[a * 4 + q] * dlogits[a];
                }
                grad[bb.offset + a] += dlogits[a];
            }
            accumulate_circuit(out, "policy_circuit", dz, grad);
        }
        if (dvalue != 0.0) {
            auto out = run(s, "value_circuit");
            const auto z = qsim::z_expectations(out);
            const auto &bw = block("value_weight");
            std::vector<double> dz(4, 0.0);
            for (std::size_t q = 0; q < 4; ++q) {
                grad[bw.offset + q] += dvalue * z[q];
                dz[q] = w[q] * dvalue;
            }
            grad[block("value_bias").offset] += dvalue;
            accumulate_circuit(out, "value_circuit", dz, grad);
        }
    }

  private:
    [[nodiscard]] qsim::StateVector run(std::size_t s, std::string_view which) const {
        return qsim::run_circuit(*circuit_, view(which), embedded_state(s));
    }

    void accumulate_circuit(const qsim::StateVector &out, std::string_view which,
                            std::span<const double> dz, std::span<double> grad) const {
        const auto g = qsim::adjoint_gradient(*circuit_, view(which), out, dz);
        const auto &b = block(which);
        for (std::size_t i = 0; i < g.size(); ++i) {
            grad[b.offset + i] += g[i];
        }
    }

    [[nodiscard]] ModelOutput head(const std::vector<double> &zp,
                                   const std::vector<double> &zv) const {
        const auto W = view("policy_weight");
        const auto b = view("policy_bias");
        const auto w = view("value_weight");
        ModelOutput o;
        for (std::size_t a = 0; a < kNumActions; ++a) {
            double acc = b[a];
            for (std::size_t q = 0; q < 4; ++q) {
                acc += W[a * 4 + q] * zp[q];
            }
            o.logits[a] = acc;
        }
        o.action_probs = softmax(o.logits);
        double v = view("value_bias")[0];
        for (std::size_t q = 0; q < 4; ++q) {
            v += w[q] * zv[q];
        }
        o.value = v;
        return o;
    }

    const CircuitTemplate *circuit_;
};

/**
 * @brief Separate 16 -> h -> h -> out tanh networks for the policy (out = 4)
 * and the value (out = 1), fed a one-hot state.
 */
class MlpModel : public ParameterSet {
  public:
    explicit MlpModel(std::size_t hidden_width) : h_(hidden_width) {
        if (hidden_width == 0) {
            throw std::invalid_argument("hidden width must be positive");
        }
        for (const char *net : {"policy", "value"}) {
            const bool pol = std::string_view(net) == "policy";
            const std::size_t out = pol ? kNumActions : 1;
            const std::string n(net);
            add_block(n + "_w1", {h_, kNumStates}, pol, false);
            add_block(n + "_b1", {h_}, pol, false);
            add_block(n + "_w2", {h_, h_}, pol, false);
            add_block(n + "_b2", {h_}, pol, false);
            add_block(n + "_w3", {out, h_}, pol, false);
            add_block(n + "_b3", {out}, pol, false);
        }
    }

    static MlpModel init(std::size_t hidden_width, std::uint64_t seed) {
        MlpModel m(hidden_width);
        Rng rng(seed);
        m.initialise(rng);
        return m;
    }

    [[nodiscard]] std::size_t hidden_width() const { return h_; }
    [[nodiscard]] std::string solution_id() const { return "nn" + std::to_string(h_); }

    [[nodiscard]] ModelOutput forward(std::size_t s) const {
        ModelOutput o;
        const auto pol = net(s, "policy", kNumActions);
        std::copy(pol.out.begin(), pol.out.end(), o.logits.begin());
        o.action_probs = softmax(o.logits);
        o.value = net(s, "value", 1).out[0];
        return o;
    }

    void backward(std::size_t s, const Upstream &dlogits, double dvalue,
                  std::span<double> grad) const {
        net_backward(s, "policy", std::span<const double>(dlogits), grad);
        const double dv[1] = {dvalue};
        net_backward(s, "value", dv, grad);
    }

  private:
    struct Activations {
        std::vector<double> h1, h2, out;
    };

    [[nodiscard]] Activations net(std::size_t s, const std::string &n, std::size_t out) const {
        if (s >= kNumStates) {
            throw std::out_of_range("state index must be in 0..15");
        }
        const auto w1 = view(n + "_w1"), b1 = view(n + "_b1");
        const auto w2 = view(n + "_w2"), b2 = view(n + "_b2");
        const auto w3 = view(n + "_w3"), b3 = view(n + "_b3");
        Activations a;
        a.h1.resize(h_);
        for (std::size_t i = 0; i < h_; ++i) {
            a.h1[i] = std::tanh(w1[i * kNumStates + s] + b1[i]);
        }
        a.h2.resize(h_);
        for (std::size_t i = 0; i < h_; ++i) {
            double acc = b2[i];
            for (std::size_t j = 0; j < h_; ++j) {
                acc += w2[i * h_ + j] * a.h1[j];
            }
            a.h2[i] = std::tanh(acc);
        }
        a.out.resize(out);
        for (std::size_t i = 0; i < out; ++i) {
            double acc = b3[i];
            for (std::size_t j = 0; j < h_; ++j) {
                acc += w3[i * h_ + j] * a.h2[j];
            }
            a.out[i] = acc;
        }
        return a;
    }

    void net_backward(std::size_t s, const std::string &n, std::span<const double> dout,
                      std::span<double> grad) const {
        if (std::all_of(dout.begin(), dout.end(), [](double x) { return x == 0.0; })) {
            return;
        }
        const auto a = net(s, n, dout.size());
        const auto w2 = view(n + "_w2"), w3 = view(n + "_w3");
        const auto o_w1 = block(n + "_w1").offset, o_b1 = block(n + "_b1").offset;
        const auto o_w2 = block(n + "_w2").offset, o_b2 = block(n + "_b2").offset;
        const auto o_w3 = block(n + "_w3").offset, o_b3 = block(n + "_b3").offset;

        std::vector<double> dh2(h_, 0.0);
        for (std::size_t i = 0; i < dout.size(); ++i) {
            grad[o_b3 + i] += dout[i];
            for (std::size_t j = 0; j < h_; ++j) {
                grad[o_w3 + i * h_ + j] += dout[i] * a.h2[j];
                dh2[j] += w3[i * h_ + j] * dout[i];
            }
        }
        std::vector<double> dh1(h_, 0.0);
        for (std::size_t i = 0; i < h_; ++i) {
            const double dpre = dh2[i] * (1.0 - a.h2[i] * a.h2[i]);
            grad[o_b2 + i] += dpre;
            for (std::size_t j = 0; j < h_; ++j) {
                grad[o_w2 + i * h_ + j] += dpre * a.h1[j];
                dh1[j] += w2[i * h_ + j] * dpre;
            }
        }
        for (std::size_t i = 0; i < h_; ++i) {
            const double dpre = dh1[i] * (1.0 - a.h1[i] * a.h1[i]);
            grad[o_b1 + i] += dpre;
            grad[o_w1 + i * kNumStates + s] += dpre;
        }
    }

    std::size_t h_;
};

template <class M>
concept PolicyValueModel = requires(M m, const M cm, std::size_t s, const Upstream &up,
                                    std::span<double> g) {
    { cm.forward(s) } -> std::same_as<ModelOutput>;
    { cm.backward(s, up, 0.0, g) };
    { m.parameters() } -> std::same_as<std::span<double>>;
    { cm.num_parameters() } -> std::convertible_to<std::size_t>;
    { cm.solution_id() } -> std::convertible_to<std::string>;
};

static_assert(PolicyValueModel<HybridModel>);
static_assert(PolicyValueModel<MlpModel>);

/// Gradient of all trainable scalars as a fresh vector.
template <PolicyValueModel M>
std::vector<double> gradient(const M &m, std::size_t s, const Upstream &dlogits,
                             double dvalue) {
    std::vector<double> g(m.num_parameters(), 0.0);
    m.backward(s, dlogits, dvalue, g);
    return g;
}

// ---------------------------------------------------------------------------
// Run specifications

enum class ModelKind { Hybrid, Mlp };

/// "pqcK" (K in 1..19) or "nnH" (H > 0).
struct SolutionId {
    ModelKind kind = ModelKind::Hybrid;
    int index = 1; ///< circuit id or hidden width

    [[nodiscard]] std::string str() const {
        return (kind == ModelKind::Hybrid ? "pqc" : "nn") + std::to_string(index);
    }
    /// Display label, e.g. "PQC-6" / "NN-4".
    [[nodiscard]] std::string label() const {
        return (kind == ModelKind::Hybrid ? "PQC-" : "NN-") + std::to_string(index);
    }

    static SolutionId parse(std::string_view text) {
        std::string t(text);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        t.erase(std::remove(t.begin(), t.end(), '-'), t.end());
        SolutionId id;
        std::string digits;
        if (t.rfind("pqc", 0) == 0) {
            id.kind = ModelKind::Hybrid;
            digits = t.substr(3);
        } else if (t.rfind("nn", 0) == 0) {
            id.kind = ModelKind::Mlp;
            digits = t.substr(2);
        } else {
            throw std::invalid_argument("solution id must look like pqc6 or nn4: " + std::string(text));
        }
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6) {
            throw std::invalid_argument("bad solution index in " + std::string(text));
        }
        id.index = std::stoi(digits);
        if (id.kind == ModelKind::Hybrid && (id.index < 1 || id.index > circuits::kCircuitCount)) {
            throw std::invalid_argument("circuit id must be in 1..19: " + std::string(text));
        }
        if (id.kind == ModelKind::Mlp && id.index < 1) {
            throw std::invalid_argument("hidden width must be positive: " + std::string(text));
        }
        return id;
    }

    friend bool operator==(const SolutionId &, const SolutionId &) = default;
};

using AnyModel = std::variant<HybridModel, MlpModel>;

inline AnyModel init(const SolutionId &id, std::uint64_t seed) {
    if (id.kind == ModelKind::Hybrid) {
        return HybridModel::init(id.index, seed);
    }
    return MlpModel::init(static_cast<std::size_t>(id.index), seed);
}

inline std::size_t parameter_count(const SolutionId &id) {
    return std::visit([](const auto &m) { return m.num_parameters(); }, init(id, 0));
}

/**
 * @brief Policy distribution p(y|x; theta) of a model viewed as a Fisher
 * model over the policy-relevant parameters only.
 *
 * `sample_parameters` draws circuit angles from [0, 2 pi) and classical
 * weights from [-box, box].
 */
template <PolicyValueModel M> class PolicyFisherView {
  public:
    PolicyFisherView(M model, double weight_box = 1.0)
        : model_(std::move(model)), idx_(model_.policy_indices()), box_(weight_box) {}

    [[nodiscard]] std::size_t dimension() const { return idx_.size(); }
    [[nodiscard]] std::size_t num_inputs() const { return kNumStates; }
    [[nodiscard]] const M &model() const { return model_; }

    [[nodiscard]] std::vector<double> output_probabilities(std::size_t x) const {
        const auto p = model_.forward(x).action_probs;
        return {p.begin(), p.end()};
    }

    [[nodiscard]] std::vector<double> log_prob_gradient(std::size_t x, std::size_t y) const {
        const auto out = model_.forward(x);
        Upstream up{};
        for (std::size_t a = 0; a < kNumActions; ++a) {
            up[a] = (a == y ? 1.0 : 0.0) - out.action_probs[a];
        }
        const auto full = gradient(model_, x, up, 0.0);
        std::vector<double> g(idx_.size());
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            g[i] = full[idx_[i]];
        }
        return g;
    }

    void sample_parameters(Rng &rng) {
        auto p = model_.parameters();
        for (const auto &b : model_.blocks()) {
            if (!b.policy) {
                continue;
            }
            for (std::size_t i = 0; i < b.size; ++i) {
                p[b.offset + i] = b.angular ? rng.angle() : rng.uniform(-box_, box_);
            }
        }
    }

  private:
    M model_;
    std::vector<std::size_t> idx_;
    double box_;
};

} // namespace qrl::models
