#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"
#include "crowdrl/geometry.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

struct ObservationSpec {
    int neighbors = 4;
    int rays = 16;
    double ray_range = 8.0;
    double goal_range = 30.0;
    EnergyParams energy_reference = kDefaultEnergy;

    static constexpr int kHeaderSize = 6;

    int size() const { return kHeaderSize + 4 * neighbors + rays; }

    friend bool operator==(const ObservationSpec&, const ObservationSpec&) = default;
};

inline void validate(const ObservationSpec& s) {
    if (s.neighbors < 0 || s.rays < 0) throw DomainError("observation counts must be non-negative");
    if (!(s.ray_range > 0.0) || !(s.goal_range > 0.0)) throw DomainError("observation ranges must be positive");
    validate(s.energy_reference);
}

/// Egocentric encoding, x forward along the heading and y to the left:
///
///   [0]    speed / v_max
///   [1]    min(goal distance, goal_range) / goal_range
///   [2, 3] sin, cos of the goal bearing
///   [4, 5] e_s / e_s_ref - 1, e_w / e_w_ref - 1
///   then per neighbor (nearest first, alive, within ray_range; zero padded):
///          relative position / ray_range, relative velocity / v_max (clipped to [-1, 1])
///   then ray_count obstacle distances / ray_range, 1 when nothing is hit.
///
/// Rays are spread evenly over the full circle starting straight ahead.
inline void encode(const World& world, std::size_t agent_id, const ObservationSpec& spec, std::span<double> out) {
    const auto agents = world.agents();
    if (agent_id >= agents.size()) throw UsageError("agent id out of range");
    const AgentState& self = agents[agent_id];
    if (!self.alive) throw UsageError("cannot observe a removed agent");
    if (out.size() != static_cast<std::size_t>(spec.size())) throw UsageError("observation buffer has wrong size");

    const WorldConfig& cfg = world.config();
    const double heading = self.heading;
    std::size_t k = 0;

    out[k++] = self.speed / cfg.v_max;
    const Vec2 to_goal = to_frame(self.goal - self.position, heading);
    const double goal_dist = norm(to_goal);
    out[k++] = std::min(goal_dist, spec.goal_range) / spec.goal_range;
    if (goal_dist > 0.0) {
        out[k++] = to_goal.y / goal_dist;
        out[k++] = to_goal.x / goal_dist;
    } else {
        out[k++] = 0.0;
        out[k++] = 1.0;
    }
    out[k++] = self.energy.e_s / spec.energy_reference.e_s - 1.0;
    out[k++] = self.energy.e_w / spec.energy_reference.e_w - 1.0;

    if (spec.neighbors > 0) {
        struct Near {
            double dist;
            std::size_t id;
        };
        std::vector<Near> near;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            if (j == agent_id || !agents[j].alive) continue;
            const double d = norm(agents[j].position - self.position);
            if (d <= spec.ray_range) near.push_back({d, j});
        }
        std::sort(near.begin(), near.end(),
                  [](const Near& a, const Near& b) { return a.dist < b.dist || (a.dist == b.dist && a.id < b.id); });
        const Vec2 own_velocity = self.velocity();
        for (int n = 0; n < spec.neighbors; ++n) {
            if (static_cast<std::size_t>(n) < near.size()) {
                const AgentState& o = agents[near[static_cast<std::size_t>(n)].id];
                const Vec2 rel_p = to_frame(o.position - self.position, heading) / spec.ray_range;
                const Vec2 rel_v = to_frame(o.velocity() - own_velocity, heading) / cfg.v_max;
                out[k++] = rel_p.x;
                out[k++] = rel_p.y;
                out[k++] = std::clamp(rel_v.x, -1.0, 1.0);
                out[k++] = std::clamp(rel_v.y, -1.0, 1.0);
            } else {
                for (int z = 0; z < 4; ++z) out[k++] = 0.0;
            }
        }
    }

    const auto obstacles = world.obstacles();
    for (int r = 0; r < spec.rays; ++r) {
        const Vec2 dir = unit(heading + 2.0 * std::numbers::pi * r / spec.rays);
        double best = spec.ray_range;
        for (const auto& o : obstacles)
            if (auto t = ray_cast(self.position, dir, o.shape); t && *t < best) best = *t;
        out[k++] = best / spec.ray_range;
    }
}

inline std::vector<double> encode(const World& world, std::size_t agent_id, const ObservationSpec& spec) {
    std::vector<double> out(static_cast<std::size_t>(spec.size()));
    encode(world, agent_id, spec, out);
    return out;
}

}  // namespace crowdrl
