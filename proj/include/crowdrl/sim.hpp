#pragma once

// Discrete-time 2D crowd world: unicycle-like agents driven by tangential
// acceleration and turn rate, circular and capsule obstacles that may move
// at constant velocity, positional collision response and goal removal.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"
#include "crowdrl/geometry.hpp"

namespace crowdrl {

struct WorldConfig {
    double dt = 0.1;
    int max_steps = 200;
    double agent_radius = 0.3;
    double goal_radius = 0.5;
    double v_max = 2.6;
    double a_max = 2.0;
    double omega_max = 3.0;
    Vec2 bounds_min{-50.0, -50.0};
    Vec2 bounds_max{50.0, 50.0};

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

inline void validate(const WorldConfig& c) {
    if (!(c.dt > 0.0)) throw DomainError("world dt must be positive");
    if (c.max_steps <= 0) throw DomainError("max_steps must be positive");
    if (!(c.agent_radius > 0.0) || !(c.goal_radius > 0.0)) throw DomainError("radii must be positive");
    if (!(c.v_max > 0.0) || !(c.a_max > 0.0) || !(c.omega_max > 0.0)) throw DomainError("limits must be positive");
    if (!(c.bounds_min.x < c.bounds_max.x) || !(c.bounds_min.y < c.bounds_max.y))
        throw DomainError("arena bounds are empty");
}

struct AgentState {
    Vec2 position;
    double heading = 0.0;  // (-pi, pi]
    double speed = 0.0;    // [0, v_max]
    Vec2 goal;
    EnergyParams energy = kDefaultEnergy;
    bool alive = true;
    int steps_alive = 0;
    double path_progress = 0.0;  // accumulated decrease of goal distance

    double goal_distance() const { return norm(goal - position); }
    Vec2 velocity() const { return unit(heading) * speed; }
};

struct ControlAction {
    double tangential_accel = 0.0;
    double turn_rate = 0.0;
};

struct Obstacle {
    Shape shape;
    Vec2 velocity;

    bool moving() const { return velocity.x != 0.0 || velocity.y != 0.0; }
};

/// Advances one agent by `dt`: turn first, then accelerate, then move along the new heading.
inline AgentState integrate(AgentState s, ControlAction a, const WorldConfig& cfg, double dt) {
    const double accel = std::clamp(a.tangential_accel, -cfg.a_max, cfg.a_max);
    const double turn = std::clamp(a.turn_rate, -cfg.omega_max, cfg.omega_max);
    s.heading = wrap_angle(s.heading + turn * dt);
    s.speed = std::clamp(s.speed + accel * dt, 0.0, cfg.v_max);
    s.position += unit(s.heading) * (s.speed * dt);
    return s;
}

inline AgentState integrate(const AgentState& s, ControlAction a, const WorldConfig& cfg) {
    return integrate(s, a, cfg, cfg.dt);
}

/// Velocity vectors of the same agent at two consecutive steps.
inline std::pair<Vec2, Vec2> velocity_vector(const AgentState& prev, const AgentState& cur) {
    return {prev.velocity(), cur.velocity()};
}

struct CollisionFlags {
    bool with_agent = false;
    bool with_obstacle = false;

    bool any() const { return with_agent || with_obstacle; }
};

/// Overlap test on the current positions of alive agents. Dead agents never collide.
inline std::vector<CollisionFlags> detect_collisions(std::span<const AgentState> agents,
                                                     std::span<const Obstacle> obstacles, double agent_radius) {
    std::vector<CollisionFlags> flags(agents.size());
    const double contact2 = 4.0 * agent_radius * agent_radius;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!agents[i].alive) continue;
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            if (!agents[j].alive) continue;
            if (squared_norm(agents[i].position - agents[j].position) < contact2) {
                flags[i].with_agent = true;
                flags[j].with_agent = true;
            }
        }
        for (const auto& o : obstacles) {
            if (signed_distance(agents[i].position, o.shape) < agent_radius) {
                flags[i].with_obstacle = true;
                break;
            }
        }
    }
    return flags;
}

/// Everything that happened to one agent during a world step.
struct AgentStepInfo {
    bool acted = false;  // alive at the start of the step
    bool collided_agent = false;
    bool collided_obstacle = false;
    bool reached_goal = false;
    Vec2 v_prev;
    Vec2 v_cur;
    double goal_distance_before = 0.0;
    double goal_distance_after = 0.0;
    Vec2 goal_direction;  // unit vector towards the goal before the step
};

struct StepOutcome {
    std::vector<AgentStepInfo> agents;
    bool done = false;
};

class World {
public:
    World(WorldConfig config, std::vector<AgentState> agents, std::vector<Obstacle> obstacles)
        : config_(config), agents_(std::move(agents)), obstacles_(std::move(obstacles)) {
        validate(config_);
        for (auto& a : agents_) {
            validate(a.energy);
            a.heading = wrap_angle(a.heading);
            a.speed = std::clamp(a.speed, 0.0, config_.v_max);
        }
    }

    const WorldConfig& config() const { return config_; }
    std::span<const AgentState> agents() const { return agents_; }
    std::span<const Obstacle> obstacles() const { return obstacles_; }
    int step_count() const { return steps_; }
    bool done() const { return done_; }
    std::size_t alive_count() const {
        return static_cast<std::size_t>(std::count_if(agents_.begin(), agents_.end(), [](const AgentState& a) { return a.alive; }));
    }

    /// Synchronous update. `actions` is indexed by agent; entries of dead agents are ignored.
    StepOutcome step(std::span<const ControlAction> actions) {
        if (done_) throw UsageError("step on a finished episode");
        if (actions.size() != agents_.size()) throw UsageError("one action slot per agent is required");

        StepOutcome out;
        out.agents.resize(agents_.size());
        const std::vector<AgentState> before = agents_;

        for (std::size_t i = 0; i < agents_.size(); ++i) {
            if (!before[i].alive) continue;
            auto& info = out.agents[i];
            info.acted = true;
            info.v_prev = before[i].velocity();
            info.goal_distance_before = before[i].goal_distance();
            info.goal_direction = info.goal_distance_before > 0.0
                                      ? (before[i].goal - before[i].position) / info.goal_distance_before
                                      : Vec2{};
            agents_[i] = integrate(before[i], actions[i], config_);
        }
        for (auto& o : obstacles_)
            if (o.moving()) o.shape = translated(o.shape, o.velocity * config_.dt);

        const auto flags = detect_collisions(agents_, obstacles_, config_.agent_radius);
        resolve_penetrations();

        for (std::size_t i = 0; i < agents_.size(); ++i) {
            auto& info = out.agents[i];
            if (!info.acted) continue;
            auto& a = agents_[i];
            info.collided_agent = flags[i].with_agent;
            info.collided_obstacle = flags[i].with_obstacle;
            info.v_cur = a.velocity();
            info.goal_distance_after = a.goal_distance();
            a.path_progress += info.goal_distance_before - info.goal_distance_after;
            a.steps_alive += 1;
            if (info.goal_distance_after < config_.goal_radius) {
                info.reached_goal = true;
                a.alive = false;
            }
        }

        ++steps_;
        done_ = steps_ >= config_.max_steps || alive_count() == 0;
        out.done = done_;
        return out;
    }

private:
    void resolve_penetrations() {
        const double r = config_.agent_radius;
        for (int pass = 0; pass < 4; ++pass) {
            bool moved = false;
            for (std::size_t i = 0; i < agents_.size(); ++i) {
                if (!agents_[i].alive) continue;
                for (std::size_t j = i + 1; j < agents_.size(); ++j) {
                    if (!agents_[j].alive) continue;
                    Vec2 d = agents_[j].position - agents_[i].position;
                    const double dist = norm(d);
                    const double pen = 2.0 * r - dist;
                    if (pen <= 0.0) continue;
                    const Vec2 n = dist > 0.0 ? d / dist : Vec2{1.0, 0.0};
                    agents_[i].position -= n * (0.5 * pen);
                    agents_[j].position += n * (0.5 * pen);
                    moved = true;
                }
            }
            if (!moved) break;
        }
        for (auto& a : agents_) {
            if (!a.alive) continue;
            for (int pass = 0; pass < 8; ++pass) {
                bool moved = false;
                for (const auto& o : obstacles_) {
                    const double sd = signed_distance(a.position, o.shape);
                    if (sd < r) {
                        a.position += outward_normal(a.position, o.shape) * (r - sd);
                        moved = true;
                    }
                }
                if (!moved) break;
            }
            a.position.x = std::clamp(a.position.x, config_.bounds_min.x + r, config_.bounds_max.x - r);
            a.position.y = std::clamp(a.position.y, config_.bounds_min.y + r, config_.bounds_max.y - r);
        }
    }

    WorldConfig config_;
    std::vector<AgentState> agents_;
    std::vector<Obstacle> obstacles_;
    int steps_ = 0;
    bool done_ = false;
};

}  // namespace crowdrl
