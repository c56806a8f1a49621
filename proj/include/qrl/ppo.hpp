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
 * @file ppo.hpp
 * Clipped-surrogate PPO with generalised advantage estimation, Adam and
 * global gradient-norm clipping, for any PolicyValueModel on the lake.
 *
 * Defaults follow the common reference configuration (2048-step rollouts,
 * 64-sample minibatches, 10 epochs, gamma 0.99, lambda 0.95, clip 0.2,
 * lr 3e-4, value coefficient 0.5, no entropy bonus, max grad norm 0.5).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lake.hpp"
#include "models.hpp"
#include "random.hpp"

namespace qrl::ppo {

using models::kNumActions;
using models::ModelOutput;
using models::PolicyValueModel;
using models::Upstream;

enum class AdvantageNorm { None, PerUpdate, PerMinibatch };

inline const char *advantage_norm_name(AdvantageNorm a) {
    switch (a) {
    case AdvantageNorm::None: return "none";
    case AdvantageNorm::PerUpdate: return "update";
    case AdvantageNorm::PerMinibatch: return "minibatch";
    }
    return "?";
}

inline AdvantageNorm parse_advantage_norm(const std::string &s) {
    if (s == "none") return AdvantageNorm::None;
    if (s == "update") return AdvantageNorm::PerUpdate;
    if (s == "minibatch") return AdvantageNorm::PerMinibatch;
    throw std::invalid_argument("advantage_norm must be none, update or minibatch: " + s);
}

struct EnvConfig {
    std::string map{lake::kDefaultMap};
    double slip_prob = 0.2;
    std::size_t max_episode_steps = 100;
};

struct PpoConfig {
    std::size_t total_timesteps = 50000;
    std::size_t rollout_length = 2048;
    std::size_t minibatch_size = 64;
    std::size_t epochs_per_update = 10;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_epsilon = 0.2;
    double learning_rate = 3e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-5;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    double max_grad_norm = 0.5;
    AdvantageNorm advantage_norm = AdvantageNorm::PerUpdate;
    /// Set false to fit only the value function (policy gradient dropped).
    bool update_policy = true;
    std::size_t eval_interval = 1000;
    std::size_t reward_window = 100;
    std::uint64_t seed = 1;

    void validate() const {
        if (rollout_length == 0 || minibatch_size == 0 || rollout_length % minibatch_size != 0) {
            throw std::invalid_argument("rollout_length must be a positive multiple of minibatch_size");
        }
        if (eval_interval == 0 || reward_window == 0) {
            throw std::invalid_argument("eval_interval and reward_window must be positive");
        }
        if (!(gamma > 0.0 && gamma <= 1.0) || !(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
            throw std::invalid_argument("gamma must be in (0,1], gae_lambda in [0,1]");
        }
        if (!(clip_epsilon > 0.0) || !(learning_rate > 0.0) || !(max_grad_norm > 0.0)) {
            throw std::invalid_argument("clip_epsilon, learning_rate, max_grad_norm must be positive");
        }
    }
};

struct RolloutBuffer {
    std::vector<std::size_t> state;
    std::vector<std::size_t> action;
    std::vector<double> reward;
    std::vector<bool> done;      ///< episode terminated (hole or goal) at this step
    std::vector<bool> truncated; ///< episode hit the step cap at this step
    std::vector<double> bootstrap; ///< V(s_next) on truncated steps, else 0
    std::vector<double> value;
    std::vector<double> log_prob;
    std::vector<double> advantage;
    std::vector<double> return_target;
    double last_value = 0.0; ///< V of the observation after the final step
    bool last_episode_end = false;

    [[nodiscard]] std::size_t size() const { return state.size(); }
    [[nodiscard]] bool episode_end(std::size_t t) const { return done[t] || truncated[t]; }

    void push(std::size_t s, std::size_t a, double r, bool d, bool tr, double boot, double v,
              double lp) {
        state.push_back(s);
        action.push_back(a);
        reward.push_back(r);
        done.push_back(d);
        truncated.push_back(tr);
        bootstrap.push_back(boot);
        value.push_back(v);
        log_prob.push_back(lp);
    }
};

/// Sequence of (timestep, trailing mean episode return) checkpoints.
struct RewardSeries {
    std::vector<std::pair<std::size_t, double>> checkpoints;

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v;
        v.reserve(checkpoints.size());
        for (const auto &c : checkpoints) v.push_back(c.second);
        return v;
    }
    [[nodiscard]] std::vector<std::size_t> steps() const {
        std::vector<std::size_t> v;
        v.reserve(checkpoints.size());
        for (const auto &c : checkpoints) v.push_back(c.first);
        return v;
    }
};

/**
 * @brief delta_t = r_t + gamma V(s_{t+1}) (1 - end_t) - V(s_t);
 * A_t = delta_t + gamma lambda (1 - end_t) A_{t+1}; return_t = A_t + V(s_t).
 *
 * end_t marks either termination or truncation. A truncated step also adds
 * gamma * V(s_next) to its reward so the step cap is not mistaken for failure.
 */
inline void compute_gae(RolloutBuffer &buf, double gamma, double lambda) {
    const std::size_t n = buf.size();
    if (buf.value.size() != n) {
        throw std::invalid_argument("value estimates missing from buffer");
    }
    buf.advantage.assign(n, 0.0);
    buf.return_target.assign(n, 0.0);
    double next_adv = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double next_value = t + 1 < n ? buf.value[t + 1] : buf.last_value;
        const double live = buf.episode_end(t) ? 0.0 : 1.0;
        const double r = buf.reward[t] + (buf.truncated[t] ? gamma * buf.bootstrap[t] : 0.0);
        const double delta = r + gamma * next_value * live - buf.value[t];
        next_adv = delta + gamma * lambda * live * next_adv;
        buf.advantage[t] = next_adv;
        buf.return_target[t] = next_adv + buf.value[t];
    }
}

/// Adam with bias correction; state is kept across updates.
class Adam {
  public:
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : m_(n, 0.0), v_(n, 0.0), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void step(std::span<double> params, std::span<const double> grad) {
        ++t_;
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
            v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
            const double mhat = m_[i] / c1;
            const double vhat = v_[i] / c2;
            params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }

    [[nodiscard]] std::size_t steps() const { return t_; }
    void set_learning_rate(double lr) { lr_ = lr; }

  private:
    std::vector<double> m_, v_;
    double lr_, b1_, b2_, eps_;
    std::size_t t_ = 0;
};

/// Scales `grad` in place so its L2 norm is at most `max_norm`; returns the
/// norm before clipping.
inline double clip_grad_norm(std::span<double> grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    const double coef = max_norm / (norm + 1e-6);
    if (coef < 1.0) {
        for (auto &g : grad) g *= coef;
    }
    return norm;
}

/// min(rho A, clip(rho, 1-eps, 1+eps) A)
inline double clipped_surrogate(double ratio, double advantage, double eps) {
    return std::min(ratio * advantage, std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage);
}

struct LossTerms {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double total = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
};

struct UpdateDiagnostics : LossTerms {
    double grad_norm = 0.0; ///< mean pre-clip norm over minibatches
    std::size_t minibatches = 0;
};

/// Shifts and scales to mean 0 and (unbiased) std 1; left alone when the
/// spread is zero or there is a single sample.
inline void normalize_advantages(std::span<double> adv) {
    const std::size_t n = adv.size();
    if (n < 2) {
        return;
    }
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        return;
    }
    for (auto &a : adv) a = (a - mean) / (sd + 1e-8);
}

/// Forward pass memoised per state; valid while the parameters are fixed.
template <PolicyValueModel M> class ForwardCache {
  public:
    explicit ForwardCache(const M &m) : model_(&m) {}
    const ModelOutput &operator()(std::size_t s) {
        if (!cache_[s]) {
            cache_[s] = model_->forward(s);
        }
        return *cache_[s];
    }

  private:
    const M *model_;
    std::array<std::optional<ModelOutput>, models::kNumStates> cache_{};
};

/**
 * @brief Loss and exact gradient of the PPO objective on `indices` of the
 * buffer. With AdvantageNorm::PerMinibatch the advantages are normalised
 * over the given samples; otherwise they are used as stored.
 *
 * Upstream gradients are pooled per distinct state, so the model's backward
 * pass runs at most once per state.
 */
template <PolicyValueModel M>
LossTerms minibatch_loss(const M &model, const RolloutBuffer &buf,
                         std::span<const std::size_t> indices, const PpoConfig &cfg,
                         std::vector<double> *grad) {
    const std::size_t b = indices.size();
    const double inv_b = 1.0 / static_cast<double>(b);
    std::vector<double> adv(b);
    for (std::size_t i = 0; i < b; ++i) adv[i] = buf.advantage[indices[i]];
    if (cfg.advantage_norm == AdvantageNorm::PerMinibatch) {
        normalize_advantages(adv);
    }

    ForwardCache<M> fwd(model);
    std::array<Upstream, models::kNumStates> up{};
    std::array<double, models::kNumStates> up_v{};
    LossTerms out;
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t t = indices[i];
        const std::size_t s = buf.state[t];
        const auto &o = fwd(s);
        const std::size_t a = buf.action[t];
        const double logp = std::log(o.action_probs[a]);
        const double log_ratio = logp - buf.log_prob[t];
        const double ratio = std::exp(log_ratio);
        const double surr1 = ratio * adv[i];
        const double surr2 = std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * adv[i];
        out.policy_loss -= std::min(surr1, surr2) * inv_b;
        out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;
        clipped += std::abs(ratio - 1.0) > cfg.clip_epsilon ? 1 : 0;
        const double verr = o.value - buf.return_target[t];
        out.value_loss += verr * verr * inv_b;
        double h = 0.0;
        for (double p : o.action_probs) h -= p > 0.0 ? p * std::log(p) : 0.0;
        out.entropy += h * inv_b;

        if (!grad) {
            continue;
        }
        // d(-min(surr1, surr2))/d logp; the clipped branch is flat.
        const double dlogp = (cfg.update_policy && surr1 <= surr2) ? -adv[i] * ratio * inv_b : 0.0;
        for (std::size_t k = 0; k < kNumActions; ++k) {
            const double p = o.action_probs[k];
            double g = dlogp * ((k == a ? 1.0 : 0.0) - p);
            if (cfg.entropy_coef != 0.0 && cfg.update_policy) {
                // loss term -c * H, dH/dz_k = -p_k (log p_k + H)
                g += cfg.entropy_coef * inv_b * p * (std::log(p) + h);
            }
            up[s][k] += g;
        }
        up_v[s] += cfg.value_coef * 2.0 * verr * inv_b;
    }
    out.clip_fraction = static_cast<double>(clipped) * inv_b;
    out.total = out.policy_loss + cfg.value_coef * out.value_loss - cfg.entropy_coef * out.entropy;
    if (!std::isfinite(out.total)) {
        throw NumericalError("non-finite PPO loss (policy " + std::to_string(out.policy_loss) +
                             ", value " + std::to_string(out.value_loss) + ")");
    }
    if (grad) {
        grad->assign(model.num_parameters(), 0.0);
        for (std::size_t s = 0; s < models::kNumStates; ++s) {
            const bool any = up_v[s] != 0.0 ||
                             std::any_of(up[s].begin(), up[s].end(), [](double x) { return x != 0.0; });
            if (any) {
                model.backward(s, up[s], up_v[s], *grad);
            }
        }
    }
    return out;
}

/// Loss over the whole buffer treated as one batch (no gradient).
template <PolicyValueModel M>
LossTerms evaluate_loss(const M &model, const RolloutBuffer &buf, const PpoConfig &cfg) {
    std::vector<std::size_t> all(buf.size());
    std::iota(all.begin(), all.end(), 0);
    return minibatch_loss(model, buf, all, cfg, nullptr);
}

/**
 * @brief epochs_per_update passes over shuffled minibatches; one clipped Adam
 * step per minibatch.
 */
template <PolicyValueModel M>
UpdateDiagnostics ppo_update(M &model, Adam &opt, const RolloutBuffer &rollout,
                             const PpoConfig &cfg, Rng &rng) {
    if (rollout.advantage.size() != rollout.size()) {
        throw ContractViolation("compute_gae must run before ppo_update");
    }
    RolloutBuffer normalized;
    if (cfg.advantage_norm == AdvantageNorm::PerUpdate) {
        normalized = rollout;
        normalize_advantages(normalized.advantage);
    }
    const RolloutBuffer &buf =
        cfg.advantage_norm == AdvantageNorm::PerUpdate ? normalized : rollout;
    std::vector<std::size_t> order(buf.size());
    std::iota(order.begin(), order.end(), 0);
    UpdateDiagnostics d;
    std::vector<double> grad;
    for (std::size_t epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += cfg.minibatch_size) {
            const std::size_t len = std::min(cfg.minibatch_size, order.size() - start);
            const auto idx = std::span<const std::size_t>(order).subspan(start, len);
            const auto l = minibatch_loss(model, buf, idx, cfg, &grad);
            d.grad_norm += clip_grad_norm(grad, cfg.max_grad_norm);
            opt.step(model.parameters(), grad);
            d.policy_loss += l.policy_loss;
            d.value_loss += l.value_loss;
            d.entropy += l.entropy;
            d.total += l.total;
            d.approx_kl += l.approx_kl;
            d.clip_fraction += l.clip_fraction;
            ++d.minibatches;
        }
    }
    if (d.minibatches > 0) {
        const double k = 1.0 / static_cast<double>(d.minibatches);
        d.policy_loss *= k;
        d.value_loss *= k;
        d.entropy *= k;
        d.total *= k;
        d.approx_kl *= k;
        d.clip_fraction *= k;
        d.grad_norm *= k;
    }
    return d;
}

/// Runs episodes against a model, auto-resetting, and keeps episodic statistics.
class RolloutCollector {
  public:
    RolloutCollector(const lake::LakeModel &lake_model, std::uint64_t seed)
        : env_(lake_model), rng_(seed) {
        obs_ = env_.reset();
    }

    /// Collects `steps` transitions. `on_step` is called after every step with
    /// the collector, e.g. to record checkpoints.
    template <PolicyValueModel M, class OnStep>
    RolloutBuffer collect(const M &model, std::size_t steps, OnStep &&on_step) {
        RolloutBuffer buf;
        ForwardCache<M> fwd(model);
        for (std::size_t i = 0; i < steps; ++i) {
            const auto &o = fwd(obs_);
            const std::size_t a = rng_.categorical(o.action_probs);
            const auto st = env_.step(a, rng_);
            episode_return_ += st.reward;
            const double boot = st.truncated ? fwd(st.state).value : 0.0;
            buf.push(obs_, a, st.reward, st.done, st.truncated, boot, o.value,
                     std::log(o.action_probs[a]));
            if (st.done || st.truncated) {
                finished_.push_back(episode_return_);
                episode_return_ = 0.0;
                obs_ = env_.reset();
            } else {
                obs_ = st.state;
            }
            ++timesteps_;
            on_step(*this);
        }
        buf.last_value = fwd(obs_).value;
        buf.last_episode_end = buf.size() > 0 && buf.episode_end(buf.size() - 1);
        return buf;
    }

    template <PolicyValueModel M> RolloutBuffer collect(const M &model, std::size_t steps) {
        return collect(model, steps, [](const RolloutCollector &) {});
    }

    [[nodiscard]] std::size_t timesteps() const { return timesteps_; }
    [[nodiscard]] const std::vector<double> &episode_returns() const { return finished_; }

    /// Mean of the last `window` completed episode returns; 0 before any.
    [[nodiscard]] double trailing_mean(std::size_t window) const {
        if (finished_.empty()) {
            return 0.0;
        }
        const std::size_t n = std::min(window, finished_.size());
        double s = 0.0;
        for (std::size_t i = finished_.size() - n; i < finished_.size(); ++i) s += finished_[i];
        return s / static_cast<double>(n);
    }

    Rng &rng() { return rng_; }

  private:
    lake::LakeEnv env_;
    Rng rng_;
    std::size_t obs_ = 0;
    std::size_t timesteps_ = 0;
    double episode_return_ = 0.0;
    std::vector<double> finished_;
};

template <PolicyValueModel M> struct TrainResult {
    RewardSeries rewards;
    M model;
    std::vector<UpdateDiagnostics> updates;
    std::size_t timesteps = 0;
    std::size_t episodes = 0;
};

/// Seed streams derived from one run seed.
struct RunSeeds {
    std::uint64_t model, env, update;
    explicit RunSeeds(std::uint64_t seed) {
        Rng root(seed);
        model = root.split().below(UINT64_MAX);
        env = root.split().below(UINT64_MAX);
        update = root.split().below(UINT64_MAX);
    }
};

/**
 * @brief Alternates rollouts and updates until total_timesteps have been
 * collected (the last rollout may overshoot, as rollouts are never cut).
 * A checkpoint is appended at every multiple of eval_interval up to
 * total_timesteps.
 */
template <PolicyValueModel M>
TrainResult<M> train(M model, const PpoConfig &cfg, const EnvConfig &env_cfg,
                     void (*progress)(std::size_t, double) = nullptr) {
    cfg.validate();
    const lake::LakeModel lake_model(env_cfg.map, env_cfg.slip_prob, env_cfg.max_episode_steps);
    const RunSeeds seeds(cfg.seed);
    RolloutCollector collector(lake_model, seeds.env);
    Rng update_rng(seeds.update);
    Adam opt(model.num_parameters(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
             cfg.adam_eps);
    TrainResult<M> result{{}, std::move(model), {}, 0, 0};
    auto record = [&](const RolloutCollector &c) {
        const std::size_t t = c.timesteps();
        if (t % cfg.eval_interval == 0 && t <= cfg.total_timesteps) {
            const double r = c.trailing_mean(cfg.reward_window);
            result.rewards.checkpoints.emplace_back(t, r);
            if (progress) {
                progress(t, r);
            }
        }
    };
    while (collector.timesteps() < cfg.total_timesteps) {
        auto buf = collector.collect(result.model, cfg.rollout_length, record);
        compute_gae(buf, cfg.gamma, cfg.gae_lambda);
        result.updates.push_back(ppo_update(result.model, opt, buf, cfg, update_rng));
    }
    result.timesteps = collector.timesteps();
    result.episodes = collector.episode_returns().size();
    return result;
}

/// Model initialised from the run seed, then trained.
inline std::variant<TrainResult<models::HybridModel>, TrainResult<models::MlpModel>>
train(const models::SolutionId &id, const PpoConfig &cfg, const EnvConfig &env_cfg,
      void (*progress)(std::size_t, double) = nullptr) {
    const RunSeeds seeds(cfg.seed);
    if (id.kind == models::ModelKind::Hybrid) {
        return train(models::HybridModel::init(id.index, seeds.model), cfg, env_cfg, progress);
    }
    return train(models::MlpModel::init(static_cast<std::size_t>(id.index), seeds.model), cfg,
                 env_cfg, progress);
}

} // namespace qrl::ppo
