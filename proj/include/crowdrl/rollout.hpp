#pragma once

// Running a shared Gaussian policy over every agent of a world: action
// squashing, per-episode trajectory recording and deterministic evaluation.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "crowdrl/evaluation.hpp"
#include "crowdrl/nn.hpp"
#include "crowdrl/observation.hpp"
#include "crowdrl/rewards.hpp"
#include "crowdrl/scenarios.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

/// SplitMix64 finalizer; used to derive independent seeds from (seed, stream, index).
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

using Network = ActorCritic<float>;

/// Maps an unbounded policy sample onto the control box with tanh.
inline ControlAction squash(float u_accel, float u_turn, const WorldConfig& w) {
    return {std::tanh(static_cast<double>(u_accel)) * w.a_max, std::tanh(static_cast<double>(u_turn)) * w.omega_max};
}

/// Observations of the listed agents, one column each.
inline Eigen::MatrixXf observe(const World& world, std::span<const std::size_t> ids, const ObservationSpec& spec) {
    Eigen::MatrixXd obs(spec.size(), static_cast<Eigen::Index>(ids.size()));
    for (std::size_t c = 0; c < ids.size(); ++c)
        encode(world, ids[c], spec, std::span<double>(obs.col(static_cast<Eigen::Index>(c)).data(), obs.rows()));
    return obs.cast<float>();
}

inline std::vector<std::size_t> alive_ids(const World& world) {
    std::vector<std::size_t> ids;
    const auto agents = world.agents();
    for (std::size_t i = 0; i < agents.size(); ++i)
        if (agents[i].alive) ids.push_back(i);
    return ids;
}

/// Starts one trajectory per agent of a freshly built world.
inline std::vector<TrajectoryRecord> start_records(const World& world) {
    std::vector<TrajectoryRecord> rec(world.agents().size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const auto& a = world.agents()[i];
        rec[i].dt = world.config().dt;
        rec[i].energy = a.energy;
        rec[i].initial_goal_distance = a.goal_distance();
        rec[i].final_goal_distance = rec[i].initial_goal_distance;
    }
    return rec;
}

inline void record_step(std::vector<TrajectoryRecord>& rec, const StepOutcome& out, const World& world) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const auto& info = out.agents[i];
        if (!info.acted) continue;
        rec[i].velocities.push_back(info.v_cur);
        rec[i].collisions.push_back(info.collided_agent || info.collided_obstacle);
        rec[i].final_goal_distance = info.goal_distance_after;
        rec[i].path_progress = world.agents()[i].path_progress;
        rec[i].finished = rec[i].finished || info.reached_goal;
    }
}

/// Runs one episode with the policy mean as the action. Returns one record per agent.
inline std::vector<TrajectoryRecord> run_deterministic_episode(const Network& net, const Scenario& scenario,
                                                               const ObservationSpec& obs_spec) {
    World world = scenario.make_world();
    auto records = start_records(world);
    std::vector<ControlAction> actions(world.agents().size());
    while (!world.done()) {
        const auto ids = alive_ids(world);
        const auto cache = net.forward(observe(world, ids, obs_spec));
        std::fill(actions.begin(), actions.end(), ControlAction{});
        for (std::size_t c = 0; c < ids.size(); ++c) {
            const auto col = static_cast<Eigen::Index>(c);
            actions[ids[c]] = squash(cache.mean(0, col), cache.mean(1, col), world.config());
        }
        const auto out = world.step(actions);
        record_step(records, out, world);
    }
    return records;
}

struct EvaluationReport {
    std::vector<TrajectoryRecord> trajectories;  // agent-episodes in (episode, agent) order
    double energy_plus_mean = 0.0;
    double energy_base_mean = 0.0;
    double success_rate = 0.0;
    double mean_speed = 0.0;
    AccelerationStats acceleration;
};

inline EvaluationReport summarize(std::vector<TrajectoryRecord> trajectories, double a_max) {
    EvaluationReport r;
    r.trajectories = std::move(trajectories);
    if (r.trajectories.empty()) return r;
    double ep = 0.0, eb = 0.0;
    for (const auto& t : r.trajectories) {
        ep += energy_plus(t);
        eb += trajectory_energy_base(t);
    }
    const double n = static_cast<double>(r.trajectories.size());
    r.energy_plus_mean = ep / n;
    r.energy_base_mean = eb / n;
    r.success_rate = success_rate(r.trajectories);
    r.mean_speed = mean_speed(r.trajectories);
    r.acceleration = acceleration_stats(r.trajectories, a_max);
    return r;
}

/// Deterministic evaluation over `episodes` worlds whose seeds derive from `seed`.
inline EvaluationReport evaluate_policy(const Network& net, const ScenarioSpec& scenario, const WorldConfig& world,
                                        const ObservationSpec& obs_spec, int episodes, std::uint64_t seed) {
    if (episodes < 1) throw DomainError("evaluation needs at least one episode");
    std::vector<TrajectoryRecord> all;
    for (int e = 0; e < episodes; ++e) {
        ScenarioSpec s = scenario;
        s.seed = derive_seed(seed, 0xE7A1, static_cast<std::uint64_t>(e));
        auto recs = run_deterministic_episode(net, build(s, world), obs_spec);
        all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    return summarize(std::move(all), world.a_max);
}

}  // namespace crowdrl
