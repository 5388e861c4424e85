#pragma once

// PPO with a clipped surrogate, GAE and "rewind": every gradient step is
// snapshotted and undone if it pushes the policy further than the KL
// threshold from the behavior policy, which also ends the update.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "crowdrl/evaluation.hpp"
#include "crowdrl/nn.hpp"
#include "crowdrl/observation.hpp"
#include "crowdrl/rewards.hpp"
#include "crowdrl/rollout.hpp"
#include "crowdrl/scenarios.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

struct TrainConfig {
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_ratio = 0.2;
    double learning_rate = 3e-4;
    int epochs_per_batch = 10;
    int minibatch_size = 512;
    double kl_threshold = 0.02;
    int iterations = 300;
    int envs_parallel = 1;
    int steps_per_env = 1000;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    double max_grad_norm = 0.5;
    double initial_log_std = -0.5;
    bool normalize_rewards = true;
    std::vector<int> hidden{64, 64};
    int checkpoint_every = 0;  // 0 = only the final checkpoint
    std::uint64_t seed = 1;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline void validate(const TrainConfig& c) {
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    if (!(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0)) throw ConfigError("gae_lambda must lie in [0, 1]");
    if (!(c.clip_ratio > 0.0)) throw ConfigError("clip_ratio must be positive");
    if (!(c.kl_threshold > 0.0)) throw ConfigError("kl_threshold must be positive");
    if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (c.epochs_per_batch < 1 || c.minibatch_size < 1) throw ConfigError("epochs and minibatch size must be positive");
    if (c.iterations < 0 || c.envs_parallel < 1 || c.steps_per_env < 1) throw ConfigError("invalid rollout sizes");
    if (c.hidden.empty()) throw ConfigError("at least one hidden layer is required");
    for (int h : c.hidden)
        if (h < 1) throw ConfigError("hidden widths must be positive");
    if (c.value_coef < 0.0 || c.entropy_coef < 0.0 || !(c.max_grad_norm > 0.0)) throw ConfigError("invalid loss weights");
    if (c.checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
}

enum class StepFlag : std::uint8_t { Continue, Terminal, Truncated };

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// GAE over concatenated agent sequences. A Terminal step bootstraps with 0, a Truncated step with
/// `bootstrap[t]`, and both end the sequence; a Continue step uses values[t + 1].
inline GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                             std::span<const StepFlag> flags, std::span<const double> bootstrap, double gamma,
                             double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || flags.size() != n || bootstrap.size() != n)
        throw DomainError("GAE inputs must have equal length");
    if (n > 0 && flags[n - 1] == StepFlag::Continue) throw DomainError("GAE input ends mid-sequence");
    GaeResult r;
    r.advantages.assign(n, 0.0);
    r.returns.assign(n, 0.0);
    double next_adv = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        double next_value = 0.0;
        double carry = 0.0;
        switch (flags[k]) {
            case StepFlag::Continue:
                next_value = values[k + 1];
                carry = next_adv;
                break;
            case StepFlag::Terminal: break;
            case StepFlag::Truncated: next_value = bootstrap[k]; break;
        }
        const double delta = rewards[k] + gamma * next_value - values[k];
        next_adv = delta + gamma * lambda * carry;
        r.advantages[k] = next_adv;
        r.returns[k] = next_adv + values[k];
    }
    return r;
}

/// Convenience overload: a single sequence ending in a terminal state.
inline GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                             std::span<const StepFlag> flags, double gamma, double lambda) {
    const std::vector<double> zeros(rewards.size(), 0.0);
    return compute_gae(rewards, values, flags, zeros, gamma, lambda);
}

/// Pooled transitions of every agent, stored one column per transition.
struct RolloutBatch {
    Eigen::MatrixXf observations;   // obs_dim x N
    Eigen::MatrixXf actions;        // pre-squash samples, action_dim x N
    Eigen::MatrixXf behavior_mean;  // action_dim x N
    Eigen::VectorXf behavior_log_std;
    std::vector<double> log_probs;
    std::vector<double> rewards;    // as used for learning (possibly scaled)
    std::vector<double> values;
    std::vector<double> bootstrap;  // V(s') for truncated steps
    std::vector<StepFlag> flags;
    std::vector<int> agent_ids;
    std::vector<int> episode_ids;
    std::vector<double> advantages;
    std::vector<double> returns;

    std::size_t size() const { return rewards.size(); }
};

inline void normalize_advantages(std::vector<double>& adv) {
    if (adv.empty()) return;
    const double n = static_cast<double>(adv.size());
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + 1e-12);
    for (double& a : adv) a = (a - mean) * inv;
}

/// Diagonal Gaussian log density, summed over action dimensions (per column).
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaussian_log_prob(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& mean,
                                                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& log_std) {
    const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        Scalar s = 0;
        for (Eigen::Index d = 0; d < x.rows(); ++d) {
            const Scalar z = (x(d, i) - mean(d, i)) / std::exp(log_std[d]);
            s += Scalar(-0.5) * z * z - log_std[d] - half_log_2pi;
        }
        out[i] = s;
    }
    return out;
}

/// Mean KL(behavior || current) between diagonal Gaussians.
inline double mean_kl(const Eigen::MatrixXf& behavior_mean, const Eigen::VectorXf& behavior_log_std,
                      const Eigen::MatrixXf& current_mean, const Eigen::VectorXf& current_log_std) {
    const Eigen::Index n = behavior_mean.cols();
    if (n == 0) return 0.0;
    double total = 0.0;
    for (Eigen::Index d = 0; d < behavior_mean.rows(); ++d) {
        const double lb = behavior_log_std[d], lc = current_log_std[d];
        const double vb = std::exp(2.0 * lb), vc = std::exp(2.0 * lc);
        const double diff2 = (behavior_mean.row(d).cast<double>() - current_mean.row(d).cast<double>()).squaredNorm();
        total += n * (lc - lb + vb / (2.0 * vc) - 0.5) + diff2 / (2.0 * vc);
    }
    return total / static_cast<double>(n);
}

struct LossParts {
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

/// Minibatch view consumed by the loss; all arrays share the column count.
template <class Scalar>
struct LossBatch {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Matrix observations;
    Matrix actions;
    Vector old_log_probs;
    Vector advantages;
    Vector returns;
};

struct LossWeights {
    double clip_ratio = 0.2;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
};

/// Clipped surrogate + value regression - entropy bonus, and its gradient w.r.t. all parameters.
template <class Scalar>
LossParts ppo_loss(const ActorCritic<Scalar>& net, const LossBatch<Scalar>& b, const LossWeights& w,
                   typename ActorCritic<Scalar>::Vector* grad) {
    using Matrix = typename ActorCritic<Scalar>::Matrix;
    using Vector = typename ActorCritic<Scalar>::Vector;
    const auto cache = net.forward(b.observations);
    const Vector log_std = net.log_std();
    const Eigen::Index n = b.observations.cols();
    const Eigen::Index act = b.actions.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Vector logp = gaussian_log_prob<Scalar>(b.actions, cache.mean, log_std);

    LossParts parts;
    Matrix d_mean = Matrix::Zero(act, n);
    Matrix d_value = Matrix::Zero(1, n);
    Vector d_log_std = Vector::Zero(act);
    const double lo = 1.0 - w.clip_ratio, hi = 1.0 + w.clip_ratio;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ratio = std::exp(static_cast<double>(logp[i]) - static_cast<double>(b.old_log_probs[i]));
        const double adv = static_cast<double>(b.advantages[i]);
        const double unclipped = ratio * adv;
        const double clipped = std::clamp(ratio, lo, hi) * adv;
        parts.policy -= std::min(unclipped, clipped) * inv_n;
        const double err = static_cast<double>(cache.value(0, i)) - static_cast<double>(b.returns[i]);
        parts.value += 0.5 * err * err * inv_n;
        if (grad) {
            d_value(0, i) = Scalar(w.value_coef * err * inv_n);
            if (unclipped <= clipped) {
                const double d_logp = -adv * ratio * inv_n;
                for (Eigen::Index d = 0; d < act; ++d) {
                    const double sigma = std::exp(static_cast<double>(log_std[d]));
                    const double z = (static_cast<double>(b.actions(d, i)) - static_cast<double>(cache.mean(d, i))) / sigma;
                    d_mean(d, i) = Scalar(d_logp * z / sigma);
                    d_log_std[d] += Scalar(d_logp * (z * z - 1.0));
                }
            }
        }
    }
    const double entropy_per_dim = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    for (Eigen::Index d = 0; d < act; ++d) parts.entropy += static_cast<double>(log_std[d]) + entropy_per_dim;
    parts.total = parts.policy + w.value_coef * parts.value - w.entropy_coef * parts.entropy;
    if (grad) {
        d_log_std.array() -= Scalar(w.entropy_coef);
        *grad = net.backward(cache, d_mean, d_value, d_log_std);
    }
    return parts;
}

struct UpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double kl = 0.0;
    int rewinds = 0;
    int gradient_steps = 0;
    int epochs_completed = 0;
    bool aborted = false;  // non-finite loss encountered
};

/// One PPO update on `batch` (advantages must already be computed). Mutates `net` and `opt`.
template <class Rng>
UpdateStats ppo_update(Network& net, Adam<float>& opt, RolloutBatch& batch, const TrainConfig& cfg, Rng& rng) {
    UpdateStats st;
    const std::size_t n = batch.size();
    if (n == 0) throw DomainError("empty rollout batch");
    std::vector<double> adv = batch.advantages;
    normalize_advantages(adv);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const LossWeights lw{cfg.clip_ratio, cfg.value_coef, cfg.entropy_coef};
    const auto mb = static_cast<std::size_t>(cfg.minibatch_size);
    const Eigen::Index obs_dim = batch.observations.rows(), act_dim = batch.actions.rows();

    double pl = 0.0, vl = 0.0, ent = 0.0;
    bool stop = false;
    for (int epoch = 0; epoch < cfg.epochs_per_batch && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n && !stop; start += mb) {
            const std::size_t end = std::min(n, start + mb);
            const auto m = static_cast<Eigen::Index>(end - start);
            LossBatch<float> b;
            b.observations.resize(obs_dim, m);
            b.actions.resize(act_dim, m);
            b.old_log_probs.resize(m);
            b.advantages.resize(m);
            b.returns.resize(m);
            for (Eigen::Index c = 0; c < m; ++c) {
                const auto idx = order[start + static_cast<std::size_t>(c)];
                const auto col = static_cast<Eigen::Index>(idx);
                b.observations.col(c) = batch.observations.col(col);
                b.actions.col(c) = batch.actions.col(col);
                b.old_log_probs[c] = static_cast<float>(batch.log_probs[idx]);
                b.advantages[c] = static_cast<float>(adv[idx]);
                b.returns[c] = static_cast<float>(batch.returns[idx]);
            }

            const Network::Vector snapshot = net.parameters();
            const Adam<float> opt_snapshot = opt;
            Network::Vector grad;
            const LossParts parts = ppo_loss(net, b, lw, &grad);
            if (!std::isfinite(parts.total) || !grad.allFinite()) {
                net.parameters() = snapshot;
                opt = opt_snapshot;
                st.aborted = true;
                stop = true;
                break;
            }
            const double gnorm = static_cast<double>(grad.norm());
            if (gnorm > cfg.max_grad_norm) grad *= static_cast<float>(cfg.max_grad_norm / gnorm);
            opt.step(net.parameters(), grad);

            const auto cache = net.forward(batch.observations);
            const double kl = mean_kl(batch.behavior_mean, batch.behavior_log_std, cache.mean, net.log_std());
            if (!(kl <= cfg.kl_threshold)) {
                net.parameters() = snapshot;
                opt = opt_snapshot;
                ++st.rewinds;
                stop = true;
                break;
            }
            st.kl = kl;
            ++st.gradient_steps;
            pl += parts.policy;
            vl += parts.value;
            ent = parts.entropy;
        }
        if (!stop) ++st.epochs_completed;
    }
    if (st.gradient_steps > 0) {
        st.policy_loss = pl / st.gradient_steps;
        st.value_loss = vl / st.gradient_steps;
        st.entropy = ent;
    }
    return st;
}

/// Running variance of the discounted return, used to scale rewards.
class RewardScaler {
public:
    void update(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    double scale() const {
        if (count_ < 2) return 1.0;
        return 1.0 / std::sqrt(m2_ / static_cast<double>(count_) + 1e-8);
    }

private:
    long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct IterationMetrics {
    int iteration = 0;
    int phase = 0;
    int episodes = 0;
    std::size_t transitions = 0;
    double success_rate = 0.0;
    double energy_plus = 0.0;
    double mean_speed = 0.0;
    double mean_abs_accel = 0.0;
    double mean_episode_reward = 0.0;  // unscaled, per agent-episode
    UpdateStats update;
};

struct RolloutResult {
    RolloutBatch batch;
    std::vector<TrajectoryRecord> trajectories;
    std::vector<double> episode_rewards;  // unscaled return per agent-episode
    int episodes = 0;
};

/// Owns the policy, optimizer and RNG streams of one training run.
class Trainer {
public:
    Trainer(TrainConfig cfg, ScenarioSpec scenario, WorldConfig world, ObservationSpec obs, RewardConfig rewards)
        : cfg_(std::move(cfg)),
          scenario_(std::move(scenario)),
          world_(world),
          obs_(obs),
          rewards_(std::move(rewards)),
          rng_(derive_seed(cfg_.seed, 0x7041, 0)) {
        validate(cfg_);
        validate(scenario_);
        validate(world_);
        validate(obs_);
        validate(rewards_.schedule);
        if (rewards_.discount) cfg_.gamma = *rewards_.discount;
        net_ = Network(Architecture{obs_.size(), cfg_.hidden, 2});
        std::mt19937_64 init_rng(derive_seed(cfg_.seed, 0x1417, 0));
        net_.initialize(init_rng, static_cast<float>(cfg_.initial_log_std));
        opt_ = Adam<float>(net_.parameter_count(), cfg_.learning_rate);
    }

    const TrainConfig& config() const { return cfg_; }
    const Network& network() const { return net_; }
    Network& network() { return net_; }
    int iteration() const { return iteration_; }
    double gamma() const { return cfg_.gamma; }

    /// Collects at least steps_per_env world steps per environment, always finishing episodes.
    RolloutResult collect_rollouts(const RewardWeights& weights) {
        RolloutResult res;
        struct Pending {
            std::vector<float> obs, act, mean;
            double log_prob, reward, value, bootstrap;
            StepFlag flag;
        };
        std::vector<std::vector<Pending>> sequences;
        std::vector<int> seq_agent, seq_episode;
        std::normal_distribution<float> normal(0.0f, 1.0f);
        const Eigen::VectorXf log_std = net_.log_std();
        const Eigen::VectorXf std_dev = log_std.array().exp();

        for (int env = 0; env < cfg_.envs_parallel; ++env) {
            int steps = 0;
            while (steps < cfg_.steps_per_env) {
                ScenarioSpec spec = scenario_;
                spec.seed = derive_seed(cfg_.seed, static_cast<std::uint64_t>(env) + 1, episode_counter_++);
                World world = build(spec, world_).make_world();
                const std::size_t n_agents = world.agents().size();
                auto records = start_records(world);
                std::vector<std::vector<Pending>> seq(n_agents);
                std::vector<double> raw_return(n_agents, 0.0), disc_return(n_agents, 0.0);
                std::vector<ControlAction> actions(n_agents);

                while (!world.done()) {
                    const auto ids = alive_ids(world);
                    const Eigen::MatrixXf obs = observe(world, ids, obs_);
                    const auto cache = net_.forward(obs);
                    Eigen::MatrixXf u(2, static_cast<Eigen::Index>(ids.size()));
                    for (Eigen::Index c = 0; c < u.cols(); ++c)
                        for (Eigen::Index d = 0; d < 2; ++d) u(d, c) = cache.mean(d, c) + std_dev[d] * normal(rng_);
                    const auto logp = gaussian_log_prob<float>(u, cache.mean, log_std);
                    std::fill(actions.begin(), actions.end(), ControlAction{});
                    for (std::size_t c = 0; c < ids.size(); ++c) {
                        const auto col = static_cast<Eigen::Index>(c);
                        actions[ids[c]] = squash(u(0, col), u(1, col), world_);
                    }
                    const auto out = world.step(actions);
                    ++steps;
                    record_step(records, out, world);

                    std::vector<std::size_t> truncated;
                    for (std::size_t c = 0; c < ids.size(); ++c) {
                        const std::size_t i = ids[c];
                        const auto& info = out.agents[i];
                        const auto col = static_cast<Eigen::Index>(c);
                        TransitionContext ctx{info.v_prev,
                                              info.v_cur,
                                              world_.dt,
                                              info.goal_distance_before,
                                              info.goal_distance_after,
                                              info.goal_direction,
                                              world.agents()[i].energy,
                                              info.collided_agent || info.collided_obstacle,
                                              info.reached_goal};
                        double r = step_reward(weights, ctx);
                        StepFlag flag = StepFlag::Continue;
                        if (info.reached_goal) {
                            flag = StepFlag::Terminal;
                        } else if (world.done()) {
                            flag = StepFlag::Truncated;
                            r += terminal_adjustment(weights, records[i].summary(), records[i].energy);
                            truncated.push_back(i);
                        }
                        raw_return[i] += r;
                        Pending p;
                        p.obs.assign(obs.col(col).data(), obs.col(col).data() + obs.rows());
                        p.act = {u(0, col), u(1, col)};
                        p.mean = {cache.mean(0, col), cache.mean(1, col)};
                        p.log_prob = logp[col];
                        p.reward = r;
                        p.value = cache.value(0, col);
                        p.bootstrap = 0.0;
                        p.flag = flag;
                        seq[i].push_back(std::move(p));
                    }
                    if (!truncated.empty()) {
                        const auto tail = net_.forward(observe(world, truncated, obs_));
                        for (std::size_t c = 0; c < truncated.size(); ++c)
                            seq[truncated[c]].back().bootstrap = tail.value(0, static_cast<Eigen::Index>(c));
                    }
                }

                for (std::size_t i = 0; i < n_agents; ++i) {
                    if (seq[i].empty()) continue;
                    if (cfg_.normalize_rewards) {
                        for (auto& p : seq[i]) {
                            disc_return[i] = disc_return[i] * cfg_.gamma + p.reward;
                            scaler_.update(disc_return[i]);
                        }
                    }
                    sequences.push_back(std::move(seq[i]));
                    seq_agent.push_back(static_cast<int>(i));
                    seq_episode.push_back(res.episodes);
                    res.episode_rewards.push_back(raw_return[i]);
                }
                res.trajectories.insert(res.trajectories.end(), std::make_move_iterator(records.begin()),
                                        std::make_move_iterator(records.end()));
                ++res.episodes;
            }
        }

        std::size_t total = 0;
        for (const auto& s : sequences) total += s.size();
        auto& b = res.batch;
        const Eigen::Index obs_dim = obs_.size();
        b.observations.resize(obs_dim, static_cast<Eigen::Index>(total));
        b.actions.resize(2, static_cast<Eigen::Index>(total));
        b.behavior_mean.resize(2, static_cast<Eigen::Index>(total));
        b.behavior_log_std = log_std;
        const double scale = cfg_.normalize_rewards ? scaler_.scale() : 1.0;
        Eigen::Index col = 0;
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            for (const auto& p : sequences[s]) {
                b.observations.col(col) = Eigen::Map<const Eigen::VectorXf>(p.obs.data(), obs_dim);
                b.actions.col(col) = Eigen::Map<const Eigen::Vector2f>(p.act.data());
                b.behavior_mean.col(col) = Eigen::Map<const Eigen::Vector2f>(p.mean.data());
                b.log_probs.push_back(p.log_prob);
                b.rewards.push_back(p.reward * scale);
                b.values.push_back(p.value);
                b.bootstrap.push_back(p.bootstrap);
                b.flags.push_back(p.flag);
                b.agent_ids.push_back(seq_agent[s]);
                b.episode_ids.push_back(seq_episode[s]);
                ++col;
            }
        }
        auto gae = compute_gae(b.rewards, b.values, b.flags, b.bootstrap, cfg_.gamma, cfg_.gae_lambda);
        b.advantages = std::move(gae.advantages);
        b.returns = std::move(gae.returns);
        return res;
    }

    /// One collect + update cycle under the curriculum phase active at the current iteration.
    IterationMetrics run_iteration() {
        IterationMetrics m;
        m.iteration = iteration_;
        m.phase = static_cast<int>(active_phase(rewards_.schedule, iteration_));
        const RewardWeights& weights = active_weights(rewards_.schedule, iteration_);
        auto roll = collect_rollouts(weights);
        m.episodes = roll.episodes;
        m.transitions = roll.batch.size();
        const auto report = summarize(std::move(roll.trajectories), world_.a_max);
        m.success_rate = report.success_rate;
        m.energy_plus = report.energy_plus_mean;
        m.mean_speed = report.mean_speed;
        m.mean_abs_accel = report.acceleration.mean;
        if (!roll.episode_rewards.empty())
            m.mean_episode_reward = std::accumulate(roll.episode_rewards.begin(), roll.episode_rewards.end(), 0.0) /
                                    static_cast<double>(roll.episode_rewards.size());
        if (roll.batch.size() > 0) m.update = ppo_update(net_, opt_, roll.batch, cfg_, rng_);
        ++iteration_;
        return m;
    }

    /// Runs the configured number of iterations, reporting each one.
    void train(const std::function<void(const IterationMetrics&, const Trainer&)>& on_iteration = {}) {
        while (iteration_ < cfg_.iterations) {
            const auto m = run_iteration();
            if (on_iteration) on_iteration(m, *this);
        }
    }

private:
    TrainConfig cfg_;
    ScenarioSpec scenario_;
    WorldConfig world_;
    ObservationSpec obs_;
    RewardConfig rewards_;
    Network net_;
    Adam<float> opt_;
    std::mt19937_64 rng_;
    RewardScaler scaler_;
    std::uint64_t episode_counter_ = 0;
    int iteration_ = 0;
};

}  // namespace crowdrl
