#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "crowdrl/sim.hpp"

using namespace crowdrl;

namespace {

constexpr double kPi = std::numbers::pi;

AgentState agent_at(Vec2 p, Vec2 goal, double heading = 0.0, double speed = 0.0) {
    AgentState a;
    a.position = p;
    a.goal = goal;
    a.heading = heading;
    a.speed = speed;
    return a;
}

// Normalizes by repeated +-2pi into (-pi, pi].
double slow_wrap(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

// Brute-force point to segment distance by dense sampling along the segment.
double sampled_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    double best = 1e300;
    for (int i = 0; i <= 100000; ++i) best = std::min(best, norm(p - (a + (b - a) * (i / 100000.0))));
    return best;
}

}  // namespace

TEST(Integrate, ZeroActionCoasts) {
    const WorldConfig cfg;
    const auto s = integrate(agent_at({0, 0}, {10, 0}, 0.0, 1.3), {}, cfg, 0.1);
    EXPECT_NEAR(s.position.x, 0.13, 1e-15);
    EXPECT_EQ(s.position.y, 0.0);
    EXPECT_EQ(s.speed, 1.3);
}

TEST(Integrate, AcceleratesFromRest) {
    const WorldConfig cfg;
    EXPECT_DOUBLE_EQ(integrate(agent_at({0, 0}, {1, 0}), {1.0, 0.0}, cfg, 0.1).speed, 0.1);
}

TEST(Integrate, HeadingWrapsLikeRepeatedNormalization) {
    WorldConfig cfg;
    cfg.omega_max = 10.0;
    const auto s = integrate(agent_at({0, 0}, {1, 0}, 3.0 * kPi / 4.0), {0.0, kPi}, cfg, 0.5);
    EXPECT_NEAR(s.heading, slow_wrap(3.0 * kPi / 4.0 + kPi / 2.0), 1e-12);
    EXPECT_GT(s.heading, -kPi);
    EXPECT_LE(s.heading, kPi);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = u(rng);
        ASSERT_NEAR(wrap_angle(a), slow_wrap(a), 1e-12);
    }
    EXPECT_EQ(wrap_angle(kPi), kPi);
    EXPECT_EQ(wrap_angle(-kPi), kPi);
}

TEST(Integrate, ClampsActions) {
    const WorldConfig cfg;
    const auto s = integrate(agent_at({0, 0}, {1, 0}, 0.0, 1.0), {100.0, 100.0}, cfg, 0.1);
    EXPECT_DOUBLE_EQ(s.speed, 1.0 + cfg.a_max * 0.1);
    EXPECT_DOUBLE_EQ(s.heading, cfg.omega_max * 0.1);
    EXPECT_EQ(integrate(agent_at({0, 0}, {1, 0}, 0.0, 0.05), {-2.0, 0.0}, cfg, 0.1).speed, 0.0);
    EXPECT_EQ(integrate(agent_at({0, 0}, {1, 0}, 0.0, 2.55), {2.0, 0.0}, cfg, 0.1).speed, cfg.v_max);
}

TEST(VelocityVector, Examples) {
    const auto still = agent_at({0, 0}, {1, 0});
    const auto [a, b] = velocity_vector(still, still);
    EXPECT_EQ(a, (Vec2{0, 0}));
    EXPECT_EQ(b, (Vec2{0, 0}));
    const auto [p, q] = velocity_vector(agent_at({0, 0}, {1, 0}, 0.0, 1.3), agent_at({0, 0}, {1, 0}, kPi / 2.0, 2.0));
    EXPECT_EQ(p, (Vec2{1.3, 0.0}));
    EXPECT_NEAR(q.x, 0.0, 1e-12);
    EXPECT_NEAR(q.y, 2.0, 1e-12);
}

TEST(DetectCollisions, OpenThresholdBetweenAgents) {
    const double r = 0.3;
    std::vector<AgentState> agents{agent_at({0, 0}, {5, 0}), agent_at({2 * r + 1e-9, 0}, {5, 0})};
    auto f = detect_collisions(agents, {}, r);
    EXPECT_FALSE(f[0].with_agent);
    EXPECT_FALSE(f[1].with_agent);
    agents[1].position = {0, 0};
    f = detect_collisions(agents, {}, r);
    EXPECT_TRUE(f[0].with_agent);
    EXPECT_TRUE(f[1].with_agent);
}

TEST(DetectCollisions, BareSegmentWithinHalfRadius) {
    const double r = 0.3;
    const Vec2 a{-1.0, 0.0}, b{1.0, 0.5};
    const Vec2 normal = Vec2{-0.5, 2.0} / norm(Vec2{-0.5, 2.0});
    const Vec2 p = (a + b) / 2.0 + normal * (r / 2.0);
    const double oracle = sampled_segment_distance(p, a, b);
    EXPECT_NEAR(oracle, r / 2.0, 1e-4);
    EXPECT_NEAR(signed_distance(p, Segment{a, b, 0.0}), oracle, 1e-4);
    const std::vector<AgentState> agents{agent_at(p, {5, 0})};
    const std::vector<Obstacle> obstacles{{Segment{a, b, 0.0}, {}}};
    const auto f = detect_collisions(agents, obstacles, r);
    EXPECT_TRUE(f[0].with_obstacle);
    EXPECT_FALSE(f[0].with_agent);
}

TEST(DetectCollisions, DeadAgentsNeverCollide) {
    std::vector<AgentState> agents{agent_at({0, 0}, {5, 0}), agent_at({0, 0}, {5, 0})};
    agents[1].alive = false;
    const auto f = detect_collisions(agents, {}, 0.3);
    EXPECT_FALSE(f[0].any());
    EXPECT_FALSE(f[1].any());
}

TEST(DetectCollisions, SymmetricFlags) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<AgentState> agents;
        for (int i = 0; i < 8; ++i) agents.push_back(agent_at({u(rng), u(rng)}, {9, 9}));
        const auto f = detect_collisions(agents, {}, 0.3);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            bool any = false;
            for (std::size_t j = 0; j < agents.size(); ++j)
                if (i != j && norm(agents[i].position - agents[j].position) < 0.6) any = true;
            ASSERT_EQ(f[i].with_agent, any);
        }
    }
}

TEST(WorldStep, AllAtGoalFinishesAfterOneStep) {
    World w({}, {agent_at({0, 0}, {0, 0}), agent_at({3, 0}, {3, 0.1})}, {});
    const std::vector<ControlAction> act(2);
    const auto out = w.step(act);
    EXPECT_TRUE(out.done);
    EXPECT_TRUE(out.agents[0].reached_goal);
    EXPECT_TRUE(out.agents[1].reached_goal);
    EXPECT_EQ(w.alive_count(), 0u);
    EXPECT_THROW(w.step(act), UsageError);
}

TEST(WorldStep, TimeLimitEndsEpisode) {
    World w({}, {agent_at({0, 0}, {30, 0})}, {});
    const std::vector<ControlAction> act(1);
    for (int t = 1; t < 200; ++t) ASSERT_FALSE(w.step(act).done) << t;
    EXPECT_TRUE(w.step(act).done);
    EXPECT_EQ(w.step_count(), 200);
}

TEST(WorldStep, RejectsWrongActionCount) {
    World w({}, {agent_at({0, 0}, {30, 0})}, {});
    EXPECT_THROW(w.step(std::vector<ControlAction>(2)), UsageError);
}

TEST(WorldStep, MovingObstacleTranslatesLinearly) {
    const double s = 1.5;
    World w({}, {agent_at({-20, -20}, {-25, -20})}, {{Segment{{0, -1}, {0, 1}, 2.0}, {0.0, s}}});
    const std::vector<ControlAction> act(1);
    for (int t = 1; t <= 10; ++t) {
        w.step(act);
        const auto& seg = std::get<Segment>(w.obstacles()[0].shape);
        ASSERT_NEAR(seg.a.y, -1.0 + s * 0.1 * t, 1e-12);
        ASSERT_NEAR(seg.b.y, 1.0 + s * 0.1 * t, 1e-12);
        ASSERT_EQ(seg.a.x, 0.0);
    }
}

TEST(WorldStep, RemovedAgentsStayFrozen) {
    World w({}, {agent_at({0, 0}, {0.2, 0}), agent_at({5, 0}, {30, 0}, 0.0, 1.0)}, {});
    const std::vector<ControlAction> act{{2.0, 1.0}, {0.0, 0.0}};
    const auto first = w.step(act);
    ASSERT_TRUE(first.agents[0].reached_goal);
    const AgentState frozen = w.agents()[0];
    for (int t = 0; t < 20; ++t) {
        const auto out = w.step(act);
        EXPECT_FALSE(out.agents[0].acted);
        EXPECT_FALSE(out.agents[0].collided_agent);
        EXPECT_FALSE(out.agents[0].reached_goal);
    }
    EXPECT_EQ(w.agents()[0].position, frozen.position);
    EXPECT_EQ(w.agents()[0].speed, frozen.speed);
    EXPECT_EQ(w.agents()[0].steps_alive, frozen.steps_alive);
}

TEST(WorldStep, OverlappingAgentsArePushedApart) {
    World w({}, {agent_at({0, 0}, {10, 0}), agent_at({0.2, 0}, {-10, 0})}, {});
    const auto out = w.step(std::vector<ControlAction>(2));
    EXPECT_TRUE(out.agents[0].collided_agent);
    EXPECT_TRUE(out.agents[1].collided_agent);
    EXPECT_NEAR(norm(w.agents()[1].position - w.agents()[0].position), 0.6, 1e-12);
}

TEST(WorldStep, PathProgressAccumulates) {
    World w({}, {agent_at({0, 0}, {10, 0}, 0.0, 1.0)}, {});
    const std::vector<ControlAction> act(1);
    for (int t = 0; t < 10; ++t) w.step(act);
    EXPECT_NEAR(w.agents()[0].path_progress, 1.0, 1e-12);
}

namespace {

struct RandomRun {
    std::vector<AgentState> states;
    std::vector<bool> flags;
};

RandomRun random_run(std::uint64_t seed, bool check_invariants) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-6.0, 6.0), acc(-3.0, 3.0), turn(-4.0, 4.0);
    std::vector<AgentState> agents;
    for (int i = 0; i < 10; ++i) agents.push_back(agent_at({pos(rng), pos(rng)}, {pos(rng), pos(rng)}, pos(rng), 1.0));
    const std::vector<Obstacle> obstacles{{Circle{{-3, 0}, 1.0}, {}},
                                          {Segment{{3, -2}, {3, 2}, 0.4}, {}},
                                          {Circle{{0, 4}, 0.5}, {0.3, 0.0}}};
    WorldConfig cfg;
    cfg.bounds_min = {-8, -8};
    cfg.bounds_max = {8, 8};
    World w(cfg, agents, obstacles);
    RandomRun run;
    while (!w.done()) {
        std::vector<ControlAction> act(agents.size());
        for (auto& a : act) a = {acc(rng), turn(rng)};
        const auto out = w.step(act);
        for (std::size_t i = 0; i < out.agents.size(); ++i) {
            run.flags.push_back(out.agents[i].collided_agent);
            run.flags.push_back(out.agents[i].collided_obstacle);
        }
        for (const auto& a : w.agents()) {
            run.states.push_back(a);
            if (!check_invariants || !a.alive) continue;
            EXPECT_GE(a.speed, 0.0);
            EXPECT_LE(a.speed, cfg.v_max);
            EXPECT_GT(a.heading, -kPi);
            EXPECT_LE(a.heading, kPi);
            for (const auto& o : w.obstacles()) EXPECT_GE(signed_distance(a.position, o.shape), cfg.agent_radius - 1e-9);
        }
    }
    return run;
}

}  // namespace

TEST(WorldProperties, DeterministicReplay) {
    const auto a = random_run(42, false), b = random_run(42, false);
    ASSERT_EQ(a.states.size(), b.states.size());
    EXPECT_EQ(a.flags, b.flags);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        ASSERT_EQ(a.states[i].position, b.states[i].position);
        ASSERT_EQ(a.states[i].heading, b.states[i].heading);
        ASSERT_EQ(a.states[i].speed, b.states[i].speed);
        ASSERT_EQ(a.states[i].alive, b.states[i].alive);
    }
}

TEST(WorldProperties, SpeedClampHeadingRangeAndImpermeability) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) random_run(seed, true);
}

TEST(WorldConfigValidation, RejectsBadValues) {
    WorldConfig c;
    c.dt = 0.0;
    EXPECT_THROW(validate(c), DomainError);
    c = {};
    c.max_steps = 0;
    EXPECT_THROW(validate(c), DomainError);
    c = {};
    c.bounds_min = {1, 0};
    c.bounds_max = {0, 1};
    EXPECT_THROW(validate(c), DomainError);
    EXPECT_NO_THROW(validate(WorldConfig{}));
}
