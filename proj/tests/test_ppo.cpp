#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include "crowdrl/ppo.hpp"
#include "oracles.hpp"

using namespace crowdrl;

namespace {

ScenarioSpec open_plane() { return *named_scenario("open-1"); }

TrainConfig small_config(std::uint64_t seed = 3) {
    TrainConfig c;
    c.hidden = {16, 16};
    c.steps_per_env = 250;
    c.minibatch_size = 64;
    c.epochs_per_batch = 2;
    c.seed = seed;
    return c;
}

RolloutBatch synthetic_batch(const Network& net, std::mt19937_64& rng, int n) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    RolloutBatch b;
    b.observations = Eigen::MatrixXf::NullaryExpr(net.architecture().obs_dim, n, [&] { return normal(rng); });
    const auto cache = net.forward(b.observations);
    b.behavior_mean = cache.mean;
    b.behavior_log_std = net.log_std();
    b.actions = cache.mean + Eigen::MatrixXf::NullaryExpr(2, n, [&] { return 0.6f * normal(rng); });
    const auto logp = gaussian_log_prob<float>(b.actions, cache.mean, b.behavior_log_std);
    for (int i = 0; i < n; ++i) {
        b.log_probs.push_back(logp[i]);
        b.rewards.push_back(normal(rng));
        b.values.push_back(cache.value(0, i));
        b.bootstrap.push_back(0.0);
        b.flags.push_back(StepFlag::Terminal);
        b.agent_ids.push_back(0);
        b.episode_ids.push_back(i);
        b.advantages.push_back(normal(rng));
        b.returns.push_back(normal(rng));
    }
    return b;
}

Network small_network(std::uint64_t seed) {
    Network net(Architecture{6, {16, 16}, 2});
    std::mt19937_64 rng(seed);
    net.initialize(rng, -0.5f);
    return net;
}

}  // namespace

TEST(Gae, SingleTerminalTransition) {
    const auto g = compute_gae(std::vector<double>{1.0}, std::vector<double>{0.0}, std::vector<StepFlag>{StepFlag::Terminal},
                               0.99, 0.95);
    EXPECT_EQ(g.advantages[0], 1.0);
    EXPECT_EQ(g.returns[0], 1.0);
}

TEST(Gae, ZeroLambdaIsOneStepTd) {
    const std::vector<double> r{0.5, -1.0, 2.0}, v{0.1, 0.2, 0.3};
    const std::vector<StepFlag> f{StepFlag::Continue, StepFlag::Continue, StepFlag::Terminal};
    const auto g = compute_gae(r, v, f, 0.9, 0.0);
    EXPECT_DOUBLE_EQ(g.advantages[0], 0.5 + 0.9 * 0.2 - 0.1);
    EXPECT_DOUBLE_EQ(g.advantages[1], -1.0 + 0.9 * 0.3 - 0.2);
    EXPECT_DOUBLE_EQ(g.advantages[2], 2.0 - 0.3);
}

TEST(Gae, ThreeStepHandCase) {
    const std::vector<double> r{0, 0, 1}, v{0.5, 0.5, 0.5};
    const std::vector<StepFlag> f{StepFlag::Continue, StepFlag::Continue, StepFlag::Terminal};
    const auto g = compute_gae(r, v, f, 0.9, 0.95);
    const auto oracle = oracle::brute_force_gae(r, v, f, {0, 0, 0}, 0.9, 0.95);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.advantages[i], oracle[i], 1e-12);
    // delta = (-0.05, -0.05, 0.5)
    EXPECT_NEAR(g.advantages[2], 0.5, 1e-12);
    EXPECT_NEAR(g.advantages[1], -0.05 + 0.855 * 0.5, 1e-12);
    EXPECT_NEAR(g.advantages[0], -0.05 + 0.855 * (-0.05 + 0.855 * 0.5), 1e-12);
}

TEST(Gae, TruncationBootstrapsFromValue) {
    const std::vector<double> r{1.0, 2.0}, v{0.3, 0.4}, boot{0.0, 0.7};
    const std::vector<StepFlag> f{StepFlag::Continue, StepFlag::Truncated};
    const auto g = compute_gae(r, v, f, boot, 0.99, 0.95);
    EXPECT_NEAR(g.returns[1], 2.0 + 0.99 * 0.7, 1e-12);
    EXPECT_NEAR(g.advantages[0], (1.0 + 0.99 * 0.4 - 0.3) + 0.99 * 0.95 * (2.0 + 0.99 * 0.7 - 0.4), 1e-12);
    const auto terminal = compute_gae(r, v, std::vector<StepFlag>{StepFlag::Continue, StepFlag::Terminal}, boot, 0.99, 0.95);
    EXPECT_NEAR(terminal.returns[1], 2.0, 1e-12);
}

TEST(Gae, RejectsMalformedInput) {
    const std::vector<double> two{1, 2}, one{1};
    EXPECT_THROW(compute_gae(two, one, std::vector<StepFlag>{StepFlag::Continue, StepFlag::Terminal}, 0.9, 0.9), DomainError);
    EXPECT_THROW(compute_gae(two, two, std::vector<StepFlag>{StepFlag::Terminal, StepFlag::Continue}, 0.9, 0.9), DomainError);
}

TEST(Gae, MatchesBruteForceOnRandomSequences) {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-3.0, 3.0), gam(0.5, 1.0), lam(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 6), segs(1, 4), kind(0, 1);
    for (int c = 0; c < 1000; ++c) {
        std::vector<double> r, v, boot;
        std::vector<StepFlag> f;
        const int s = segs(rng);
        for (int k = 0; k < s; ++k) {
            const int n = len(rng);
            for (int t = 0; t < n; ++t) {
                r.push_back(u(rng));
                v.push_back(u(rng));
                boot.push_back(u(rng));
                f.push_back(t + 1 < n ? StepFlag::Continue : (kind(rng) ? StepFlag::Terminal : StepFlag::Truncated));
            }
        }
        const double g = gam(rng), l = lam(rng);
        const auto got = compute_gae(r, v, f, boot, g, l);
        const auto want = oracle::brute_force_gae(r, v, f, boot, g, l);
        for (std::size_t t = 0; t < r.size(); ++t) {
            ASSERT_NEAR(got.advantages[t], want[t], 1e-10) << "case " << c;
            ASSERT_NEAR(got.returns[t], want[t] + v[t], 1e-10);
        }
    }
}

TEST(Advantages, NormalizedToZeroMeanUnitVariance) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal(3.0, 7.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(200 + trial);
        for (double& x : a) x = normal(rng);
        normalize_advantages(a);
        double mean = 0.0, var = 0.0;
        for (double x : a) mean += x;
        mean /= static_cast<double>(a.size());
        for (double x : a) var += (x - mean) * (x - mean);
        var /= static_cast<double>(a.size());
        ASSERT_LT(std::abs(mean), 1e-9);
        ASSERT_NEAR(var, 1.0, 1e-6);
    }
}

TEST(PpoLoss, UnitRatioGivesMeanAdvantage) {
    Network net = small_network(1);
    std::mt19937_64 rng(2);
    auto b = synthetic_batch(net, rng, 20);
    LossBatch<float> lb;
    lb.observations = b.observations;
    lb.actions = b.actions;
    lb.old_log_probs = gaussian_log_prob<float>(b.actions, net.forward(b.observations).mean, net.log_std());
    lb.advantages = Eigen::VectorXf::NullaryExpr(20, [&] { return std::normal_distribution<float>()(rng); });
    lb.returns = Eigen::VectorXf::Zero(20);
    const auto parts = ppo_loss(net, lb, {0.2, 0.0, 0.0}, nullptr);
    EXPECT_NEAR(parts.policy, -lb.advantages.cast<double>().mean(), 1e-6);
}

TEST(PpoLoss, ClippedRatioUsesBoundAndStopsGradient) {
    Network net = small_network(4);
    std::mt19937_64 rng(5);
    auto b = synthetic_batch(net, rng, 1);
    LossBatch<float> lb;
    lb.observations = b.observations;
    lb.actions = b.actions;
    const float logp = gaussian_log_prob<float>(b.actions, net.forward(b.observations).mean, net.log_std())[0];
    lb.old_log_probs = Eigen::VectorXf::Constant(1, logp - std::log(1.5f));
    lb.advantages = Eigen::VectorXf::Constant(1, 2.0f);
    lb.returns = Eigen::VectorXf::Zero(1);
    Network::Vector grad;
    const auto parts = ppo_loss(net, lb, {0.2, 0.0, 0.0}, &grad);
    EXPECT_NEAR(parts.policy, -1.2 * 2.0, 1e-5);
    EXPECT_EQ(grad.norm(), 0.0f);
    lb.advantages[0] = -2.0f;  // pessimistic branch keeps the unclipped 1.5 A
    const auto neg = ppo_loss(net, lb, {0.2, 0.0, 0.0}, &grad);
    EXPECT_NEAR(neg.policy, 1.5 * 2.0, 1e-5);
    EXPECT_GT(grad.norm(), 0.0f);
}

TEST(MeanKl, ZeroForIdenticalAndMatchesClosedForm) {
    Eigen::MatrixXf m = Eigen::MatrixXf::Random(2, 5);
    Eigen::VectorXf ls(2);
    ls << -0.5f, 0.1f;
    EXPECT_NEAR(mean_kl(m, ls, m, ls), 0.0, 1e-12);
    Eigen::MatrixXf m2 = m.array() + 0.3f;
    Eigen::VectorXf ls2(2);
    ls2 << -0.2f, 0.1f;
    double want = 0.0;
    for (int d = 0; d < 2; ++d) {
        const double s1 = std::exp(ls[d]), s2 = std::exp(ls2[d]);
        want += std::log(s2 / s1) + (s1 * s1 + 0.09) / (2.0 * s2 * s2) - 0.5;
    }
    EXPECT_NEAR(mean_kl(m, ls, m2, ls2), want, 1e-5);
}

TEST(PpoUpdate, RewindRestoresSnapshotExactly) {
    const Network start = small_network(11);
    std::mt19937_64 data_rng(12);
    const RolloutBatch batch0 = synthetic_batch(start, data_rng, 128);
    TrainConfig cfg;
    cfg.learning_rate = 2e-3;
    cfg.minibatch_size = 128;  // one gradient step per epoch
    cfg.max_grad_norm = 1e9;

    // reference runs with rewinding disabled: parameters after k full steps and their KL
    auto run = [&](int epochs, double threshold) {
        Network net = start;
        Adam<float> opt(net.parameter_count(), cfg.learning_rate);
        RolloutBatch b = batch0;
        std::mt19937_64 rng(99);
        TrainConfig c = cfg;
        c.epochs_per_batch = epochs;
        c.kl_threshold = threshold;
        const auto st = ppo_update(net, opt, b, c, rng);
        const double kl = mean_kl(b.behavior_mean, b.behavior_log_std, net.forward(b.observations).mean, net.log_std());
        return std::make_tuple(net, st, kl);
    };
    const double inf = std::numeric_limits<double>::infinity();
    const auto [p1, s1, kl1] = run(1, inf);
    const auto [p2, s2, kl2] = run(2, inf);
    const auto [p3, s3, kl3] = run(3, inf);
    ASSERT_EQ(s3.gradient_steps, 3);
    ASSERT_LT(std::max(kl1, kl2), kl3) << "batch must drift further on the third step";
    const double threshold = 0.5 * (std::max(kl1, kl2) + kl3);

    const auto [net, st, kl] = run(10, threshold);
    EXPECT_EQ(st.rewinds, 1);
    EXPECT_EQ(st.gradient_steps, 2);
    EXPECT_EQ(st.epochs_completed, 2);
    EXPECT_EQ(net.parameters(), p2.parameters());
    EXPECT_LE(kl, threshold);
}

TEST(PpoUpdate, FinalPolicyNeverExceedsKlThreshold) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Network net = small_network(seed);
        std::mt19937_64 rng(seed + 100);
        RolloutBatch b = synthetic_batch(net, rng, 300);
        TrainConfig cfg;
        cfg.learning_rate = 1e-2 * static_cast<double>(seed);
        cfg.minibatch_size = 50;
        Adam<float> opt(net.parameter_count(), cfg.learning_rate);
        const auto st = ppo_update(net, opt, b, cfg, rng);
        const double kl = mean_kl(b.behavior_mean, b.behavior_log_std, net.forward(b.observations).mean, net.log_std());
        EXPECT_LE(kl, cfg.kl_threshold) << seed;
        EXPECT_LE(st.rewinds, 1);
    }
}

TEST(PpoUpdate, EmptyBatchIsAnError) {
    Network net = small_network(1);
    Adam<float> opt(net.parameter_count(), 1e-3);
    RolloutBatch b;
    std::mt19937_64 rng(1);
    EXPECT_THROW(ppo_update(net, opt, b, TrainConfig{}, rng), DomainError);
}

TEST(RewardScalerTest, ScaleIsInverseStd) {
    RewardScaler s;
    EXPECT_EQ(s.scale(), 1.0);
    for (double x : {1.0, 3.0, 5.0, 7.0}) s.update(x);
    EXPECT_NEAR(s.scale(), 1.0 / std::sqrt(5.0 + 1e-8), 1e-12);
}

TEST(Trainer, RolloutSequencesFollowRemovalSemantics) {
    auto spec = *named_scenario("circle-8");
    spec.circle_radius = 1.5;
    spec.circle_obstacles = 0;
    spec.noise = 0.0;
    Trainer t(small_config(), spec, WorldConfig{}, ObservationSpec{}, preset("a"));
    const auto res = t.collect_rollouts(preset("a").schedule.phases[0].weights);
    const auto& b = res.batch;
    ASSERT_EQ(b.size(), static_cast<std::size_t>(b.observations.cols()));
    std::map<std::pair<int, int>, std::vector<std::size_t>> seqs;
    for (std::size_t k = 0; k < b.size(); ++k) seqs[{b.episode_ids[k], b.agent_ids[k]}].push_back(k);
    ASSERT_EQ(seqs.size(), res.trajectories.size());
    for (const auto& [key, idx] : seqs) {
        const auto& traj = res.trajectories[static_cast<std::size_t>(key.first * 8 + key.second)];
        ASSERT_EQ(idx.size(), static_cast<std::size_t>(traj.steps()));
        for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
            ASSERT_EQ(idx[j + 1], idx[j] + 1);
            ASSERT_EQ(b.flags[idx[j]], StepFlag::Continue);
        }
        ASSERT_EQ(b.flags[idx.back()], traj.finished ? StepFlag::Terminal : StepFlag::Truncated);
        if (b.flags[idx.back()] == StepFlag::Truncated)
            EXPECT_NEAR(b.returns[idx.back()], b.rewards[idx.back()] + t.gamma() * b.bootstrap[idx.back()], 1e-9);
        else
            EXPECT_NEAR(b.returns[idx.back()], b.rewards[idx.back()], 1e-12);
    }
    EXPECT_GE(static_cast<int>(b.size()), 250);
}

TEST(Trainer, ArrivalEndsTheAgentSequence) {
    // goal inside the arrival radius after any first step: one transition, flagged terminal
    ScenarioSpec spec = open_plane();
    spec.circle_radius = 0.2;
    Trainer t(small_config(), spec, WorldConfig{}, ObservationSpec{}, preset("a"));
    const auto res = t.collect_rollouts(preset("a").schedule.phases[0].weights);
    ASSERT_EQ(res.batch.size(), 250u);
    for (std::size_t k = 0; k < res.batch.size(); ++k) EXPECT_EQ(res.batch.flags[k], StepFlag::Terminal);
    for (const auto& tr : res.trajectories) EXPECT_EQ(tr.steps(), 1);
}

TEST(Trainer, CollectionIsDeterministic) {
    Trainer a(small_config(7), open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    Trainer b(small_config(7), open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    const auto w = preset("a").schedule.phases[0].weights;
    const auto ra = a.collect_rollouts(w), rb = b.collect_rollouts(w);
    EXPECT_EQ(ra.batch.observations, rb.batch.observations);
    EXPECT_EQ(ra.batch.actions, rb.batch.actions);
    EXPECT_EQ(ra.batch.rewards, rb.batch.rewards);
    EXPECT_EQ(ra.batch.advantages, rb.batch.advantages);
    Trainer c(small_config(8), open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    EXPECT_NE(c.collect_rollouts(w).batch.actions, ra.batch.actions);
}

TEST(Trainer, TrainingIsDeterministic) {
    auto cfg = small_config(5);
    cfg.iterations = 3;
    Trainer a(cfg, open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    Trainer b(cfg, open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    a.train();
    b.train();
    EXPECT_EQ(a.network().parameters(), b.network().parameters());
    EXPECT_EQ(a.iteration(), 3);
}

TEST(Trainer, CurriculumSwitchesAtTwoHundredIterations) {
    auto cfg = small_config(2);
    cfg.steps_per_env = 1;
    cfg.epochs_per_batch = 1;
    cfg.iterations = 202;
    Trainer t(cfg, open_plane(), WorldConfig{}, ObservationSpec{}, preset("a"));
    std::vector<int> phases;
    t.train([&](const IterationMetrics& m, const Trainer&) { phases.push_back(m.phase); });
    ASSERT_EQ(phases.size(), 202u);
    EXPECT_EQ(phases[0], 0);
    EXPECT_EQ(phases[199], 0);
    EXPECT_EQ(phases[200], 1);
    EXPECT_EQ(phases[201], 1);
}

TEST(Trainer, DiscountOverrideFromPreset) {
    Trainer t(small_config(), open_plane(), WorldConfig{}, ObservationSpec{}, preset("G"));
    EXPECT_EQ(t.gamma(), 1.0);
    Trainer u(small_config(), open_plane(), WorldConfig{}, ObservationSpec{}, preset("F"));
    EXPECT_EQ(u.gamma(), 0.99);
}

TEST(TrainConfigValidation, RejectsBadValues) {
    TrainConfig c;
    c.gamma = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.clip_ratio = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.kl_threshold = -1.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.hidden = {};
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_NO_THROW(validate(TrainConfig{}));
}
