#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "crowdrl/rewards.hpp"

using namespace crowdrl;

namespace {

constexpr EnergyParams kE{2.23, 1.26};

TransitionContext at_rest() {
    TransitionContext c;
    c.goal_distance_before = c.goal_distance_after = 5.0;
    c.goal_direction = {1.0, 0.0};
    return c;
}

}  // namespace

TEST(StepReward, EnergyPhaseAtRestIsBasalOnly) {
    const auto& w = active_weights(preset("a").schedule, 200);
    EXPECT_NEAR(step_reward(w, at_rest()), -0.223, 1e-15);
}

TEST(StepReward, PotentialAtOptimalSpeed) {
    RewardWeights w;
    w.potential = 1.0;
    const double v = optimal_speed(kE);
    auto c = at_rest();
    c.v_prev = c.v_cur = {v, 0.0};
    c.goal_distance_after = c.goal_distance_before - v * 0.1;
    const double expected = 2.0 * std::sqrt(2.23 * 1.26) * v * 0.1;
    EXPECT_NEAR(step_reward(w, c), expected, 1e-12);
    EXPECT_NEAR(step_reward(w, c), 2.0 * 2.23 * 0.1, 1e-12);
    EXPECT_NEAR(expected, 2.23 * 0.1 + 1.26 * v * v * 0.1, 1e-12);
}

TEST(StepReward, SpeedingPenalty) {
    RewardWeights w;
    w.speeding = 1.0;
    w.speed_exponent = 2.0;
    auto c = at_rest();
    c.v_prev = c.v_cur = {optimal_speed(kE) + 0.5, 0.0};
    EXPECT_NEAR(step_reward(w, c), -0.025, 1e-12);
    c.v_cur = {optimal_speed(kE) - 0.5, 0.0};
    EXPECT_EQ(step_reward(w, c), 0.0);
}

TEST(StepReward, SpeedMatchIsSymmetric) {
    RewardWeights w;
    w.speed_match = 1.0;
    auto c = at_rest();
    c.v_cur = {optimal_speed(kE) + 0.3, 0.0};
    const double above = step_reward(w, c);
    c.v_cur = {0.0, optimal_speed(kE) - 0.3};
    EXPECT_NEAR(step_reward(w, c), above, 1e-15);
    EXPECT_NEAR(above, -0.09 * 0.1, 1e-15);
}

TEST(StepReward, ExponentialMatchingPeaksAtTargetVelocity) {
    const auto& w = preset("j").schedule.phases[0].weights;
    auto c = at_rest();
    c.v_cur = c.goal_direction * optimal_speed(kE);
    EXPECT_NEAR(step_reward_terms(w, c).exp_match, -10.0 * 0.1, 1e-12);
    c.v_cur = {0.0, 0.0};
    EXPECT_NEAR(step_reward_terms(w, c).exp_match, -10.0 * std::exp(0.85 * optimal_speed(kE)) * 0.1, 1e-12);
}

TEST(StepReward, GoalAndCollisionTerms) {
    const auto& w = preset("g").schedule.phases[0].weights;
    auto c = at_rest();
    c.reached_goal = true;
    c.collided = true;
    const auto t = step_reward_terms(w, c);
    EXPECT_EQ(t.goal, kDefaultGoalReward);
    EXPECT_EQ(t.collision, -kDefaultCollisionPenalty);
}

TEST(TerminalAdjustment, FinishedHasNoPenalty) {
    const auto& w = active_weights(preset("a").schedule, 300);
    const EpisodeSummary s{0.0, 10.0, 80, 0.1, 10.0, true};
    EXPECT_EQ(terminal_adjustment(w, s, kE), 0.0);
}

TEST(TerminalAdjustment, OptimalHeuristic) {
    const auto& w = active_weights(preset("d").schedule, 300);
    const EpisodeSummary s{10.0, 12.0, 200, 0.1, 2.0, false};
    EXPECT_NEAR(terminal_adjustment(w, s, kE), -2.0 * std::sqrt(2.23 * 1.26) * 10.0, 1e-12);
    EXPECT_NEAR(terminal_adjustment(w, s, kE), -33.5249, 1e-4);
}

TEST(TerminalAdjustment, AverageHeuristicFloorsSpeed) {
    const auto& w = active_weights(preset("a").schedule, 300);
    const EpisodeSummary s{20.0, 20.4, 200, 0.1, 0.4, false};  // raw progress speed 0.02
    EXPECT_NEAR(s.average_speed(), 0.1, 1e-15);
    EXPECT_NEAR(terminal_adjustment(w, s, kE), -(2.23 + 1.26 * 0.01) * 200.0, 1e-9);
    EXPECT_NEAR(terminal_adjustment(w, s, kE), -448.52, 1e-9);
}

TEST(TerminalAdjustment, BothHeuristicsRejected) {
    RewardWeights w;
    w.optimal_heuristic = w.average_heuristic = 1.0;
    EXPECT_THROW(terminal_adjustment(w, EpisodeSummary{}, kE), ConfigError);
    EXPECT_THROW(validate(w), ConfigError);
}

TEST(TerminalAdjustment, AverageHeuristicNeverPositive) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-30.0, 30.0), d(0.0, 40.0);
    RewardWeights w;
    w.average_heuristic = 1.0;
    for (int i = 0; i < 10000; ++i) {
        const EpisodeSummary s{d(rng), d(rng), 1 + static_cast<int>(d(rng) * 5), 0.1, u(rng), false};
        ASSERT_LE(terminal_adjustment(w, s, kE), 0.0);
    }
}

TEST(RewardProperties, PotentialTelescopes) {
    RewardWeights w;
    w.potential = 1.0;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> step(-0.3, 0.3);
    for (int trial = 0; trial < 100; ++trial) {
        Vec2 p{8.0, -3.0};
        const Vec2 goal{0.5, 0.5};
        const double d0 = norm(goal - p);
        double sum = 0.0;
        for (int t = 0; t < 150; ++t) {
            TransitionContext c;
            c.energy = kE;
            c.goal_distance_before = norm(goal - p);
            p += Vec2{step(rng), step(rng)};
            c.goal_distance_after = norm(goal - p);
            sum += step_reward_terms(w, c).potential;
        }
        ASSERT_NEAR(sum, 2.0 * std::sqrt(2.23 * 1.26) * (d0 - norm(goal - p)), 1e-10);
    }
}

TEST(RewardProperties, InvariantModeNetsZeroAtOptimalSpeed) {
    RewardWeights w;
    w.basal = w.velocity = w.potential = 1.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> es(1.5, 3.0), ew(0.8, 1.6);
    for (int i = 0; i < 1000; ++i) {
        const EnergyParams e{es(rng), ew(rng)};
        const double v = optimal_speed(e);
        TransitionContext c;
        c.energy = e;
        c.v_prev = c.v_cur = {v, 0.0};
        c.goal_distance_before = 10.0;
        c.goal_distance_after = 10.0 - v * c.dt;
        ASSERT_NEAR(step_reward(w, c), 0.0, 1e-12);
        c.v_prev = c.v_cur = {};
        c.goal_distance_after = 10.0;
        ASSERT_NEAR(step_reward(w, c), -e.e_s * c.dt, 1e-15);
    }
}

TEST(RewardProperties, EnergyTermsMatchEnergyModel) {
    RewardWeights w;
    w.basal = w.dynamics = 1.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int i = 0; i < 10000; ++i) {
        TransitionContext c;
        c.energy = kE;
        c.dt = i % 2 ? 0.1 : 0.01;
        c.v_prev = {u(rng), u(rng)};
        c.v_cur = {u(rng), u(rng)};
        const auto t = step_reward_terms(w, c);
        const double e = energy_step_accel(kE, {c.v_prev, c.v_cur, c.dt});
        ASSERT_NEAR(-(t.basal + t.dynamics), e, 1e-14 * e);
    }
}

TEST(Presets, AllNamedPresetsConstruct) {
    EXPECT_EQ(kPresetNames.size(), 17u);
    for (auto name : kPresetNames) {
        const auto cfg = preset(name);
        EXPECT_EQ(cfg.name, name);
        EXPECT_NO_THROW(validate(cfg.schedule)) << name;
        EXPECT_FALSE(preset_title(name).empty()) << name;
    }
    EXPECT_THROW(preset("z"), ConfigError);
}

TEST(Presets, BaseCurriculumSwitchesAtTwoHundred) {
    const auto a = preset("a");
    ASSERT_EQ(a.schedule.phases.size(), 2u);
    EXPECT_EQ(a.schedule.phases[1].start_iteration, 200);
    const auto& warm = a.schedule.phases[0].weights;
    EXPECT_EQ(warm.potential, 1.0);
    EXPECT_EQ(warm.speeding, 1.0);
    EXPECT_EQ(warm.speed_exponent, 2.0);
    EXPECT_EQ(warm.basal, 0.0);
    const auto& energy = a.schedule.phases[1].weights;
    EXPECT_EQ(energy.basal, 1.0);
    EXPECT_EQ(energy.dynamics, 1.0);
    EXPECT_EQ(energy.potential, 1.0);
    EXPECT_EQ(energy.average_heuristic, 1.0);
    EXPECT_EQ(energy.velocity, 0.0);
    EXPECT_FALSE(a.discount.has_value());
}

TEST(Presets, AccelerationEnergyWithoutCurriculum) {
    const auto e = preset("e");
    ASSERT_EQ(e.schedule.phases.size(), 1u);
    const auto& w = e.schedule.phases[0].weights;
    EXPECT_EQ(w.basal, 1.0);
    EXPECT_EQ(w.dynamics, 1.0);
    EXPECT_EQ(w.potential, 1.0);
    EXPECT_EQ(w.velocity, 0.0);
    EXPECT_EQ(w.average_heuristic, 0.0);
    EXPECT_EQ(w.goal, kDefaultGoalReward);
    EXPECT_EQ(w.collision, kDefaultCollisionPenalty);
}

TEST(Presets, PureEnergyWithoutDiscount) {
    const auto g = preset("G");
    ASSERT_TRUE(g.discount.has_value());
    EXPECT_EQ(*g.discount, 1.0);
    EXPECT_FALSE(preset("F").discount.has_value());
    const auto& w = g.schedule.phases[1].weights;
    EXPECT_EQ(w.potential, 0.0);
    EXPECT_EQ(w.goal, 0.0);
    EXPECT_EQ(w.collision, 0.0);
}

TEST(Presets, NoPotentialFamilyKeepsHeuristic) {
    const auto& w = preset("B").schedule.phases[1].weights;
    EXPECT_EQ(w.potential, 0.0);
    EXPECT_EQ(w.average_heuristic, 1.0);
    EXPECT_EQ(preset("B").schedule.phases[0].weights, preset("a").schedule.phases[0].weights);
}

TEST(Presets, CustomSwitchIteration) {
    EXPECT_EQ(preset("a", 50).schedule.phases[1].start_iteration, 50);
    EXPECT_THROW(preset("a", 0), ConfigError);
}

TEST(Curriculum, ActiveWeights) {
    const auto a = preset("a");
    EXPECT_EQ(active_phase(a.schedule, 0), 0u);
    EXPECT_EQ(active_phase(a.schedule, 199), 0u);
    EXPECT_EQ(active_phase(a.schedule, 200), 1u);
    EXPECT_EQ(active_phase(a.schedule, 100000), 1u);
    const auto g = preset("g");
    EXPECT_EQ(active_phase(g.schedule, 0), 0u);
    EXPECT_EQ(active_phase(g.schedule, 5000), 0u);
    EXPECT_THROW(active_phase(a.schedule, -1), DomainError);
}

TEST(Curriculum, ValidationRejectsBadSchedules) {
    CurriculumSchedule s;
    EXPECT_THROW(validate(s), ConfigError);
    s.phases = {{RewardWeights{}, 5}};
    EXPECT_THROW(validate(s), ConfigError);
    s.phases = {{RewardWeights{}, 0}, {RewardWeights{}, 0}};
    EXPECT_THROW(validate(s), ConfigError);
}

TEST(RewardWeightsValidation, Bounds) {
    RewardWeights w;
    w.potential = 1.0;
    w.potential_coeff = 1.0;
    EXPECT_THROW(validate(w), ConfigError);
    w.potential_coeff = 2.0;
    EXPECT_NO_THROW(validate(w));
    w.basal = 0.5;
    EXPECT_THROW(validate(w), ConfigError);
    w = {};
    w.exp_match = 1.0;
    EXPECT_THROW(validate(w), ConfigError);
}
