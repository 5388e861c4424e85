#pragma once

// Per-unit-mass walking energy: the classic basal + drag model and the
// acceleration-aware variant that charges for the work needed to change
// velocity against drag.

#include <cmath>
#include <string_view>

#include "crowdrl/common.hpp"

namespace crowdrl {

struct EnergyParams {
    double e_s = 2.23;  // basal rate, W/kg
    double e_w = 1.26;  // drag coefficient, 1/s

    friend constexpr bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

inline constexpr EnergyParams kDefaultEnergy{2.23, 1.26};

inline void validate(const EnergyParams& p) {
    if (!(std::isfinite(p.e_s) && std::isfinite(p.e_w)) || p.e_s <= 0.0 || p.e_w <= 0.0)
        throw DomainError("energy parameters must be finite and positive");
}

struct VelocitySample {
    Vec2 v_prev;
    Vec2 v_cur;
    double dt = 0.1;

    Vec2 acceleration() const { return (v_cur - v_prev) / dt; }
};

enum class MotionRegime { Constant, Accelerating, PassiveDeceleration, ActiveDeceleration };

constexpr std::string_view to_string(MotionRegime r) {
    switch (r) {
        case MotionRegime::Constant: return "constant";
        case MotionRegime::Accelerating: return "accelerating";
        case MotionRegime::PassiveDeceleration: return "passive-deceleration";
        case MotionRegime::ActiveDeceleration: return "active-deceleration";
    }
    return "?";
}

/// Comfortable walking speed sqrt(e_s / e_w).
inline double optimal_speed(const EnergyParams& p) {
    validate(p);
    return std::sqrt(p.e_s / p.e_w);
}

/// (e_s + e_w v^2) dt
inline double energy_step_base(const EnergyParams& p, double speed, double dt) {
    validate(p);
    if (!std::isfinite(speed) || speed < 0.0) throw DomainError("speed must be finite and non-negative");
    if (!std::isfinite(dt) || dt <= 0.0) throw DomainError("dt must be positive");
    return (p.e_s + p.e_w * speed * speed) * dt;
}

/// Work term v . a + e_w (v0 . v) of the acceleration-aware model, per unit time.
inline double work_rate(const EnergyParams& p, const VelocitySample& s) {
    return dot(s.v_cur, s.acceleration()) + p.e_w * dot(s.v_prev, s.v_cur);
}

/// (e_s + |v . a + e_w (v0 . v)|) dt. Never below the basal floor e_s dt.
inline double energy_step_accel(const EnergyParams& p, const VelocitySample& s) {
    validate(p);
    if (!std::isfinite(s.dt) || s.dt <= 0.0) throw DomainError("dt must be positive");
    if (!is_finite(s.v_prev) || !is_finite(s.v_cur)) throw DomainError("velocities must be finite");
    return (p.e_s + std::abs(work_rate(p, s))) * s.dt;
}

/// Energy to cover `distance` in a straight line at constant `speed`.
inline double straight_line_energy(const EnergyParams& p, double distance, double speed) {
    validate(p);
    if (!std::isfinite(distance) || distance < 0.0) throw DomainError("distance must be non-negative");
    if (!std::isfinite(speed) || speed <= 0.0) throw DomainError("speed must be positive");
    return (p.e_s + p.e_w * speed * speed) * distance / speed;
}

/// Speed reached after one step of coasting from v0 under drag alone.
inline double passive_threshold(const EnergyParams& p, double v0, double dt) {
    return (1.0 - p.e_w * dt) * v0;
}

/// Classifies collinear motion from speed v0 to v. The passive threshold itself
/// counts as passive deceleration.
inline MotionRegime classify_regime(const EnergyParams& p, double v0, double v, double dt) {
    if (v == v0) return MotionRegime::Constant;
    if (v > v0) return MotionRegime::Accelerating;
    if (v >= passive_threshold(p, v0, dt)) return MotionRegime::PassiveDeceleration;
    return MotionRegime::ActiveDeceleration;
}

}  // namespace crowdrl
