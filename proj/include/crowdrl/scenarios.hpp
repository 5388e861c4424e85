#pragma once

// The five benchmark layouts: Circle, Corridor, Crossing, Choke and Car.
// Dimensions are configurable; the defaults below are the reference layouts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"
#include "crowdrl/geometry.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Circle, Corridor, Crossing, Choke, Car };

inline constexpr std::array<std::string_view, 5> kScenarioKindNames{"circle", "corridor", "crossing", "choke", "car"};

constexpr std::string_view to_string(ScenarioKind k) { return kScenarioKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
    for (std::size_t i = 0; i < kScenarioKindNames.size(); ++i)
        if (kScenarioKindNames[i] == s) return static_cast<ScenarioKind>(i);
    return std::nullopt;
}

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Circle;
    int agent_count = 8;

    double circle_radius = 10.0;
    int circle_obstacles = 2;
    double circle_obstacle_radius = 0.8;

    double corridor_length = 20.0;
    double corridor_width = 4.0;

    double crossing_arm_width = 4.0;
    double crossing_arm_length = 10.0;

    double choke_opening = 1.2;

    double car_speed = 1.5;
    double car_length = 4.0;
    double car_width = 2.0;
    double car_gap = 3.0;

    double noise = 0.5;  // start/goal perturbation amplitude, m
    EnergyParams energy_base = kDefaultEnergy;
    double energy_spread = 0.15;
    std::uint64_t seed = 0;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct Scenario {
    WorldConfig world;
    std::vector<AgentState> agents;
    std::vector<Obstacle> obstacles;

    World make_world() const { return World(world, agents, obstacles); }
};

/// Draws each coefficient uniformly from base * [1 - spread, 1 + spread].
template <class Rng>
EnergyParams sample_energy_params(Rng& rng, const EnergyParams& base, double spread) {
    if (!(spread >= 0.0 && spread <= 0.5)) throw DomainError("energy spread must lie in [0, 0.5]");
    if (spread == 0.0) return base;
    std::uniform_real_distribution<double> u(1.0 - spread, 1.0 + spread);
    EnergyParams p;
    p.e_s = base.e_s * u(rng);
    p.e_w = base.e_w * u(rng);
    return p;
}

namespace detail {

inline constexpr double kWallThickness = 0.2;
inline constexpr double kLaneSpacing = 0.8;
inline constexpr double kColumnSpacing = 1.3;

inline Obstacle wall(Vec2 a, Vec2 b) { return {Segment{a, b, kWallThickness}, {}}; }

// Lateral lane offsets that fit inside a channel of the given width.
inline std::vector<double> lanes(double width, double agent_radius) {
    const double usable = width - 2.0 * (0.5 * kWallThickness + agent_radius + 0.05);
    if (usable < 0.0) throw ScenarioError("channel narrower than an agent");
    const int n = static_cast<int>(std::floor(usable / kLaneSpacing)) + 1;
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(-0.5 * (n - 1) * kLaneSpacing + k * kLaneSpacing);
    return out;
}

// `count` slots along +axis starting at `front`, receding by column spacing, `lanes` wide.
// Returns (along, across) pairs; along decreases away from the front.
inline std::vector<std::pair<double, double>> block(int count, double front, double depth_limit,
                                                    const std::vector<double>& lane_offsets) {
    std::vector<std::pair<double, double>> slots;
    const int per_column = static_cast<int>(lane_offsets.size());
    for (int i = 0; i < count; ++i) {
        const int col = i / per_column;
        const double along = front - col * kColumnSpacing;
        if (along < depth_limit) throw ScenarioError("infeasible packing: not enough room for agents");
        slots.emplace_back(along, lane_offsets[static_cast<std::size_t>(i % per_column)]);
    }
    return slots;
}

inline double heading_to(Vec2 from, Vec2 to) {
    const Vec2 d = to - from;
    return (d.x == 0.0 && d.y == 0.0) ? 0.0 : std::atan2(d.y, d.x);
}

inline bool overlaps_any(Vec2 p, const std::vector<AgentState>& placed, const std::vector<Obstacle>& obstacles,
                         double r) {
    for (const auto& a : placed)
        if (norm(a.position - p) < 2.0 * r + 0.05) return true;
    for (const auto& o : obstacles)
        if (signed_distance(p, o.shape) < r + 0.05) return true;
    return false;
}

}  // namespace detail

inline void validate(const ScenarioSpec& s) {
    if (s.agent_count < 1) throw ScenarioError("agent_count must be at least 1");
    const double positives[] = {s.circle_radius,   s.circle_obstacle_radius, s.corridor_length, s.corridor_width,
                                s.crossing_arm_width, s.crossing_arm_length, s.choke_opening,  s.car_length,
                                s.car_width,       s.car_gap};
    for (double v : positives)
        if (!(v > 0.0)) throw ScenarioError("geometry parameters must be positive");
    if (s.circle_obstacles < 0) throw ScenarioError("circle_obstacles must be non-negative");
    if (!(s.noise >= 0.0)) throw ScenarioError("noise must be non-negative");
    if (!(s.car_speed >= 0.0)) throw ScenarioError("car_speed must be non-negative");
    validate(s.energy_base);
}

/// Builds the initial world for one episode. Identical specs (seed included) give identical worlds.
inline Scenario build(const ScenarioSpec& spec, const WorldConfig& world = {}) {
    validate(spec);
    validate(world);
    std::mt19937_64 rng(spec.seed);
    Scenario sc;
    sc.world = world;
    const double r = world.agent_radius;
    const int n = spec.agent_count;

    std::vector<std::pair<Vec2, Vec2>> starts_goals;  // (start, goal)
    auto jitter = [&rng](double amp) {
        std::uniform_real_distribution<double> u(-amp, amp);
        return Vec2{u(rng), u(rng)};
    };

    switch (spec.kind) {
        case ScenarioKind::Circle: {
            const double R = spec.circle_radius;
            if (spec.circle_obstacles > 0) {
                const int m = spec.circle_obstacles;
                const double ring = m == 1 ? 0.0 : 2.0 * spec.circle_obstacle_radius;
                for (int k = 0; k < m; ++k) {
                    const Vec2 c = unit(2.0 * std::numbers::pi * k / m) * ring;
                    sc.obstacles.push_back({Circle{c, spec.circle_obstacle_radius}, {}});
                }
            }
            std::vector<AgentState> placed;
            for (int i = 0; i < n; ++i) {
                const double angle = 2.0 * std::numbers::pi * i / n;
                const Vec2 nominal = unit(angle) * R;
                const Vec2 nominal_goal = unit(angle + std::numbers::pi) * R;
                Vec2 start = nominal;
                bool ok = false;
                for (int attempt = 0; attempt < 1000; ++attempt) {
                    start = nominal + (spec.noise > 0.0 ? jitter(spec.noise) : Vec2{});
                    if (!detail::overlaps_any(start, placed, sc.obstacles, r)) {
                        ok = true;
                        break;
                    }
                    if (spec.noise == 0.0) break;
                }
                if (!ok) throw ScenarioError("infeasible packing: circle too small for agent count");
                const Vec2 goal = nominal_goal + (spec.noise > 0.0 ? jitter(spec.noise) : Vec2{});
                AgentState a;
                a.position = start;
                a.goal = goal;
                placed.push_back(a);
                starts_goals.emplace_back(start, goal);
            }
            break;
        }
        case ScenarioKind::Corridor: {
            const double L = spec.corridor_length, w = spec.corridor_width;
            sc.obstacles.push_back(detail::wall({-0.5 * L, 0.5 * w}, {0.5 * L, 0.5 * w}));
            sc.obstacles.push_back(detail::wall({-0.5 * L, -0.5 * w}, {0.5 * L, -0.5 * w}));
            const auto lanes = detail::lanes(w, r);
            const int west = (n + 1) / 2, east = n / 2;
            const double amp = std::min(spec.noise, 0.1);
            // front rows sit a quarter of the way in from each end
            for (auto [along, across] : detail::block(west, -0.25 * L, -0.5 * L + 0.5, lanes)) {
                const Vec2 s{along, across};
                starts_goals.emplace_back(s + jitter(amp), Vec2{-along, across} + jitter(amp));
            }
            for (auto [along, across] : detail::block(east, -0.25 * L, -0.5 * L + 0.5, lanes)) {
                const Vec2 s{-along, across};
                starts_goals.emplace_back(s + jitter(amp), Vec2{along, across} + jitter(amp));
            }
            break;
        }
        case ScenarioKind::Crossing: {
            const double w = spec.crossing_arm_width, L = spec.crossing_arm_length;
            for (double sx : {-1.0, 1.0})
                for (double sy : {-1.0, 1.0}) {
                    const Vec2 corner{sx * 0.5 * w, sy * 0.5 * w};
                    sc.obstacles.push_back(detail::wall(corner, {sx * 0.5 * w, sy * L}));
                    sc.obstacles.push_back(detail::wall(corner, {sx * L, sy * 0.5 * w}));
                }
            const auto lanes = detail::lanes(w, r);
            const int south = (n + 1) / 2, west = n / 2;
            const double amp = std::min(spec.noise, 0.1);
            const double front = -0.5 * w - 1.5;
            for (auto [along, across] : detail::block(south, front, -L + 0.5, lanes))
                starts_goals.emplace_back(Vec2{across, along} + jitter(amp), Vec2{across, -along} + jitter(amp));
            for (auto [along, across] : detail::block(west, front, -L + 0.5, lanes))
                starts_goals.emplace_back(Vec2{along, across} + jitter(amp), Vec2{-along, across} + jitter(amp));
            break;
        }
        case ScenarioKind::Choke: {
            const double half = 0.5 * spec.choke_opening + 0.5 * detail::kWallThickness;
            sc.obstacles.push_back(detail::wall({0.0, half}, {0.0, 12.0}));
            sc.obstacles.push_back(detail::wall({0.0, -half}, {0.0, -12.0}));
            const auto lanes = detail::lanes(8.0, r);
            const double amp = std::min(spec.noise, 0.1);
            for (auto [along, across] : detail::block(n, -3.0, -12.0, lanes))
                starts_goals.emplace_back(Vec2{along, across} + jitter(amp), Vec2{-along, across} + jitter(amp));
            break;
        }
        case ScenarioKind::Car: {
            const double half = 0.5 * spec.car_gap + 0.5 * detail::kWallThickness;
            sc.obstacles.push_back(detail::wall({0.0, half}, {0.0, 15.0}));
            sc.obstacles.push_back(detail::wall({0.0, -half}, {0.0, -15.0}));
            const double core = std::max(spec.car_length - spec.car_width, 0.0);
            sc.obstacles.push_back(
                {Segment{{0.0, -0.5 * core}, {0.0, 0.5 * core}, spec.car_width}, {0.0, spec.car_speed}});
            const auto lanes = detail::lanes(6.0, r);
            const double amp = std::min(spec.noise, 0.1);
            for (auto [along, across] : detail::block(n, -2.5, -14.0, lanes))
                starts_goals.emplace_back(Vec2{along, across} + jitter(amp), Vec2{-along, across} + jitter(amp));
            break;
        }
    }

    for (const auto& [start, goal] : starts_goals) {
        AgentState a;
        a.position = start;
        a.goal = goal;
        a.heading = detail::heading_to(start, goal);
        a.speed = 0.0;
        a.energy = sample_energy_params(rng, spec.energy_base, spec.energy_spread);
        sc.agents.push_back(a);
    }

    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
        const Vec2 p = sc.agents[i].position;
        for (std::size_t j = 0; j < i; ++j)
            if (norm(sc.agents[j].position - p) < 2.0 * r) throw ScenarioError("infeasible packing: agents overlap");
        for (const auto& o : sc.obstacles)
            if (signed_distance(p, o.shape) < r) throw ScenarioError("infeasible packing: agent inside an obstacle");
    }
    return sc;
}

/// Named layouts: full-size ones plus reduced desk variants suffixed with their agent count.
struct NamedScenario {
    std::string_view name;
    std::string_view description;
    ScenarioSpec spec;
};

inline std::vector<NamedScenario> scenario_catalog() {
    auto make = [](ScenarioKind kind, int count) {
        ScenarioSpec s;
        s.kind = kind;
        s.agent_count = count;
        return s;
    };
    ScenarioSpec open = make(ScenarioKind::Circle, 1);
    open.circle_radius = 5.0;
    open.circle_obstacles = 0;
    open.noise = 0.0;
    ScenarioSpec circle8 = make(ScenarioKind::Circle, 8);
    circle8.circle_radius = 4.0;

    return {
        {"circle", "40 agents swap antipodal points around central obstacles", make(ScenarioKind::Circle, 40)},
        {"corridor", "20 agents in two opposing groups along a corridor", make(ScenarioKind::Corridor, 20)},
        {"crossing", "20 agents crossing perpendicular corridors", make(ScenarioKind::Crossing, 20)},
        {"choke", "20 agents squeezing through a narrow opening", make(ScenarioKind::Choke, 20)},
        {"car", "20 agents waiting for a moving obstacle to clear a passage", make(ScenarioKind::Car, 20)},
        {"circle-8", "desk variant of circle", circle8},
        {"corridor-8", "desk variant of corridor", make(ScenarioKind::Corridor, 8)},
        {"crossing-8", "desk variant of crossing", make(ScenarioKind::Crossing, 8)},
        {"choke-8", "desk variant of choke", make(ScenarioKind::Choke, 8)},
        {"car-8", "desk variant of car", make(ScenarioKind::Car, 8)},
        {"open-1", "single agent on an empty plane, goal 10 m away", open},
    };
}

inline std::optional<ScenarioSpec> named_scenario(std::string_view name) {
    for (const auto& s : scenario_catalog())
        if (s.name == name) return s.spec;
    return std::nullopt;
}

}  // namespace crowdrl
