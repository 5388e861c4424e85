#pragma once

// Reward components, terminal heuristics, the named reward presets and the
// curriculum schedule that switches between them.
//
// Component numbering:
//   (1) basal energy          -e_s dt
//   (2) velocity energy       -e_w |v|^2 dt
//   (3) dynamics energy       -|v . a + e_w v0 . v| dt
//   (4) guiding potential     c_p sqrt(e_s e_w) (goal distance decrease)
//   (5) speed matching        -w_s | |v| - v* |^c_e dt
//   (6) speeding penalty      -w_z max(|v| - v*, 0)^c_e dt
//   (7) exponential matching  w_m exp(sigma_v |v - v* g|) dt     (w_m < 0)
//   (8) optimal heuristic     -2 sqrt(e_s e_w) d                  (terminal)
//   (9) average heuristic     -(e_s + e_w vbar^2) d / vbar        (terminal)
//   (10) goal bonus           +r_g once on arrival
//   (11) collision penalty    -r_c per colliding frame

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"

namespace crowdrl {

inline constexpr double kMinAverageSpeed = 0.1;

struct RewardWeights {
    double basal = 0.0;
    double velocity = 0.0;
    double dynamics = 0.0;
    double potential = 0.0;
    double speed_match = 0.0;
    double speeding = 0.0;
    double speed_exponent = 2.0;  // c_e, shared by (5) and (6)
    double exp_match = 0.0;       // w_m, negative when enabled
    double exp_sigma = 0.85;      // sigma_v
    double optimal_heuristic = 0.0;
    double average_heuristic = 0.0;
    double goal = 0.0;       // bonus paid on arrival
    double collision = 0.0;  // penalty magnitude per colliding frame
    double potential_coeff = 2.0;  // c_p; the potential scale is c_p sqrt(e_s e_w)

    friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

inline void validate(const RewardWeights& w) {
    for (double unit_weight : {w.basal, w.velocity, w.dynamics, w.potential, w.optimal_heuristic, w.average_heuristic})
        if (unit_weight != 0.0 && unit_weight != 1.0)
            throw ConfigError("physics-based reward components take weight 0 or 1");
    if (w.optimal_heuristic != 0.0 && w.average_heuristic != 0.0)
        throw ConfigError("optimal and average non-finishing heuristics are mutually exclusive");
    if (w.potential != 0.0 && !(w.potential_coeff > 1.0))
        throw ConfigError("potential coefficient must exceed 1 so moving beats standing still");
    if (!(w.speed_exponent > 0.0)) throw ConfigError("speed exponent must be positive");
    if (w.speed_match < 0.0 || w.speeding < 0.0) throw ConfigError("speed penalty weights must be non-negative");
    if (w.exp_match > 0.0) throw ConfigError("exponential matching weight must be non-positive");
    if (w.exp_match != 0.0 && !(w.exp_sigma > 0.0)) throw ConfigError("exponential matching sigma must be positive");
    if (w.goal < 0.0 || w.collision < 0.0) throw ConfigError("goal bonus and collision penalty are magnitudes");
}

struct TransitionContext {
    Vec2 v_prev;
    Vec2 v_cur;
    double dt = 0.1;
    double goal_distance_before = 0.0;
    double goal_distance_after = 0.0;
    Vec2 goal_direction;  // unit vector from the agent towards its goal
    EnergyParams energy = kDefaultEnergy;
    bool collided = false;
    bool reached_goal = false;
};

/// Per-component values of one transition; the reward is their sum.
struct RewardTerms {
    double basal = 0.0;
    double velocity = 0.0;
    double dynamics = 0.0;
    double potential = 0.0;
    double speed_match = 0.0;
    double speeding = 0.0;
    double exp_match = 0.0;
    double goal = 0.0;
    double collision = 0.0;

    double total() const {
        return basal + velocity + dynamics + potential + speed_match + speeding + exp_match + goal + collision;
    }
};

inline RewardTerms step_reward_terms(const RewardWeights& w, const TransitionContext& c) {
    const EnergyParams& e = c.energy;
    const double dt = c.dt;
    const double speed = norm(c.v_cur);
    const double v_star = std::sqrt(e.e_s / e.e_w);
    RewardTerms t;
    if (w.basal != 0.0) t.basal = -w.basal * e.e_s * dt;
    if (w.velocity != 0.0) t.velocity = -w.velocity * e.e_w * speed * speed * dt;
    if (w.dynamics != 0.0) t.dynamics = -w.dynamics * std::abs(work_rate(e, {c.v_prev, c.v_cur, dt})) * dt;
    if (w.potential != 0.0)
        t.potential = w.potential * w.potential_coeff * std::sqrt(e.e_s * e.e_w) *
                      (c.goal_distance_before - c.goal_distance_after);
    if (w.speed_match != 0.0) t.speed_match = -w.speed_match * std::pow(std::abs(speed - v_star), w.speed_exponent) * dt;
    if (w.speeding != 0.0) t.speeding = -w.speeding * std::pow(std::max(speed - v_star, 0.0), w.speed_exponent) * dt;
    if (w.exp_match != 0.0)
        t.exp_match = w.exp_match * std::exp(w.exp_sigma * norm(c.v_cur - c.goal_direction * v_star)) * dt;
    if (c.reached_goal) t.goal = w.goal;
    if (c.collided) t.collision = -w.collision;
    return t;
}

inline double step_reward(const RewardWeights& w, const TransitionContext& c) { return step_reward_terms(w, c).total(); }

struct EpisodeSummary {
    double final_goal_distance = 0.0;
    double initial_goal_distance = 0.0;
    int elapsed_steps = 0;
    double dt = 0.1;
    double path_progress = 0.0;
    bool finished = false;

    /// Progress speed towards the goal, floored at 0.1 m/s.
    double average_speed() const {
        const double elapsed = elapsed_steps * dt;
        const double raw = elapsed > 0.0 ? path_progress / elapsed : 0.0;
        return std::max(raw, kMinAverageSpeed);
    }
};

/// Remaining-energy estimate at the assumed optimal speed.
inline double optimal_heuristic_penalty(const EnergyParams& e, double distance) {
    return -2.0 * std::sqrt(e.e_s * e.e_w) * distance;
}

/// Remaining-energy estimate at the agent's own (floored) progress speed.
inline double average_heuristic_penalty(const EnergyParams& e, double distance, double average_speed) {
    const double v = std::max(average_speed, kMinAverageSpeed);
    return -(e.e_s + e.e_w * v * v) * (distance / v);
}

/// Non-finishing penalty charged on an agent's last transition. Zero for agents that reached
/// their goal; the arrival bonus itself is paid by step_reward.
inline double terminal_adjustment(const RewardWeights& w, const EpisodeSummary& s, const EnergyParams& e) {
    if (w.optimal_heuristic != 0.0 && w.average_heuristic != 0.0)
        throw ConfigError("optimal and average non-finishing heuristics are mutually exclusive");
    if (s.finished) return 0.0;
    const double d = s.final_goal_distance;
    if (w.optimal_heuristic != 0.0) return w.optimal_heuristic * optimal_heuristic_penalty(e, d);
    if (w.average_heuristic != 0.0) return w.average_heuristic * average_heuristic_penalty(e, d, s.average_speed());
    return 0.0;
}

struct CurriculumPhase {
    RewardWeights weights;
    int start_iteration = 0;

    friend bool operator==(const CurriculumPhase&, const CurriculumPhase&) = default;
};

struct CurriculumSchedule {
    std::vector<CurriculumPhase> phases;

    friend bool operator==(const CurriculumSchedule&, const CurriculumSchedule&) = default;
};

inline void validate(const CurriculumSchedule& s) {
    if (s.phases.empty()) throw ConfigError("curriculum needs at least one phase");
    if (s.phases.front().start_iteration != 0) throw ConfigError("first curriculum phase must start at iteration 0");
    for (std::size_t i = 1; i < s.phases.size(); ++i)
        if (s.phases[i].start_iteration <= s.phases[i - 1].start_iteration)
            throw ConfigError("curriculum start iterations must be strictly increasing");
    for (const auto& p : s.phases) validate(p.weights);
}

/// Index of the last phase that has started by `iteration`.
inline std::size_t active_phase(const CurriculumSchedule& s, int iteration) {
    if (iteration < 0) throw DomainError("iteration must be non-negative");
    if (s.phases.empty()) throw ConfigError("empty curriculum");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < s.phases.size(); ++i)
        if (s.phases[i].start_iteration <= iteration) idx = i;
    return idx;
}

inline const RewardWeights& active_weights(const CurriculumSchedule& s, int iteration) {
    return s.phases[active_phase(s, iteration)].weights;
}

struct RewardConfig {
    std::string name;
    CurriculumSchedule schedule;
    std::optional<double> discount;  // overrides the trainer's gamma when set
};

inline constexpr double kDefaultGoalReward = 10.0;
inline constexpr double kDefaultCollisionPenalty = 0.5;
inline constexpr int kDefaultSwitchIteration = 200;

inline constexpr std::array<std::string_view, 17> kPresetNames{"a", "b", "c", "d", "e", "f", "g", "h", "i",
                                                               "j", "A", "B", "C", "D", "E", "F", "G"};

inline constexpr std::string_view preset_title(std::string_view name) {
    constexpr std::array<std::string_view, 17> titles{
        "Base curriculum",
        "Base curriculum (no acceleration)",
        "Base curriculum (no heuristic)",
        "Base curriculum (optimal heuristic)",
        "Energy (acceleration)",
        "Energy (no acceleration)",
        "Energy (no potential)",
        "Speed matching",
        "Speeding penalty",
        "Exponential velocity matching",
        "Base curriculum (baseline)",
        "No potential",
        "No potential and final penalty",
        "No potential and goal",
        "No potential and goal, optimal heuristic",
        "Pure energy",
        "Pure energy, no discounting",
    };
    for (std::size_t i = 0; i < kPresetNames.size(); ++i)
        if (kPresetNames[i] == name) return titles[i];
    return {};
}

namespace detail {

inline RewardWeights with_goal_and_collision(RewardWeights w) {
    w.goal = kDefaultGoalReward;
    w.collision = kDefaultCollisionPenalty;
    return w;
}

inline RewardWeights warmup_phase() {
    RewardWeights w;
    w.potential = 1.0;
    w.speeding = 1.0;
    w.speed_exponent = 2.0;
    return with_goal_and_collision(w);
}

inline RewardWeights energy_phase() {
    RewardWeights w;
    w.basal = 1.0;
    w.dynamics = 1.0;
    w.potential = 1.0;
    w.average_heuristic = 1.0;
    return with_goal_and_collision(w);
}

inline RewardConfig curriculum(std::string_view name, RewardWeights second, int switch_iteration) {
    return {std::string(name), {{{warmup_phase(), 0}, {second, switch_iteration}}}, std::nullopt};
}

inline RewardConfig single(std::string_view name, RewardWeights w) {
    return {std::string(name), {{{w, 0}}}, std::nullopt};
}

}  // namespace detail

/// Builds a named reward preset. Curriculum presets switch phases at `switch_iteration`.
/// The potential-ablation family (B)-(G) keeps the warm-up phase of (A) and only edits the
/// energy phase.
inline RewardConfig preset(std::string_view name, int switch_iteration = kDefaultSwitchIteration) {
    using namespace detail;
    if (switch_iteration <= 0) throw ConfigError("curriculum switch iteration must be positive");
    RewardWeights w = energy_phase();
    if (name == "a" || name == "A") return curriculum(name, w, switch_iteration);
    if (name == "b") {
        w.dynamics = 0.0;
        w.velocity = 1.0;
        return curriculum(name, w, switch_iteration);
    }
    if (name == "c") {
        w.average_heuristic = 0.0;
        return curriculum(name, w, switch_iteration);
    }
    if (name == "d") {
        w.average_heuristic = 0.0;
        w.optimal_heuristic = 1.0;
        return curriculum(name, w, switch_iteration);
    }
    RewardWeights s = with_goal_and_collision({});
    if (name == "e") {
        s.basal = s.dynamics = s.potential = 1.0;
        return single(name, s);
    }
    if (name == "f") {
        s.basal = s.velocity = s.potential = 1.0;
        return single(name, s);
    }
    if (name == "g") {
        s.basal = s.velocity = 1.0;
        return single(name, s);
    }
    if (name == "h") {
        s.potential = 1.0;
        s.speed_match = 1.0;
        s.speed_exponent = 2.0;
        return single(name, s);
    }
    if (name == "i") {
        s.potential = 1.0;
        s.speeding = 1.0;
        s.speed_exponent = 1.0;
        return single(name, s);
    }
    if (name == "j") {
        s.exp_match = -10.0;
        s.exp_sigma = 0.85;
        return single(name, s);
    }
    w.potential = 0.0;
    if (name == "B") return curriculum(name, w, switch_iteration);
    if (name == "C") {
        w.average_heuristic = 0.0;
        return curriculum(name, w, switch_iteration);
    }
    if (name == "D") {
        w.goal = 0.0;
        return curriculum(name, w, switch_iteration);
    }
    if (name == "E") {
        w.goal = 0.0;
        w.average_heuristic = 0.0;
        w.optimal_heuristic = 1.0;
        return curriculum(name, w, switch_iteration);
    }
    if (name == "F" || name == "G") {
        w.goal = 0.0;
        w.collision = 0.0;
        w.average_heuristic = 0.0;
        auto cfg = curriculum(name, w, switch_iteration);
        if (name == "G") cfg.discount = 1.0;
        return cfg;
    }
    throw ConfigError("unknown reward preset '" + std::string(name) + "'");
}

}  // namespace crowdrl
