#pragma once

// Continuous-time discounted return of a constant-speed straight-line walk
// rewarded with negative energy plus a guiding potential, and the tools to
// locate and compare its maximizing speed across discount factors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"

namespace crowdrl {

struct StraightLineProblem {
    EnergyParams energy = kDefaultEnergy;
    double c_p = 2.0;       // dimensionless potential coefficient
    double distance = 20.0;  // m
    double gamma = 0.99;     // per second, (0, 1]

    double potential_scale() const { return c_p * std::sqrt(energy.e_s * energy.e_w); }
};

inline void validate(const StraightLineProblem& p) {
    validate(p.energy);
    if (!(p.distance > 0.0)) throw DomainError("distance must be positive");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
    if (!std::isfinite(p.c_p)) throw DomainError("c_p must be finite");
}

/// Reward per unit time while walking at speed v straight at the goal.
inline double reward_rate(const StraightLineProblem& p, double v) {
    return -p.energy.e_w * v * v + p.potential_scale() * v - p.energy.e_s;
}

/// Discounted return until arrival. At v = 0 with gamma < 1 the agent never arrives and the
/// return is the infinite-horizon basal limit -e_s / (-ln gamma).
inline double discounted_return(const StraightLineProblem& p, double v) {
    validate(p);
    if (!std::isfinite(v) || v < 0.0) throw DomainError("speed must be non-negative");
    if (p.gamma == 1.0) {
        if (v == 0.0) throw DomainError("undiscounted return diverges at zero speed");
        return p.distance / v * reward_rate(p, v);
    }
    const double log_gamma = std::log(p.gamma);
    if (v == 0.0) return -p.energy.e_s / -log_gamma;
    // 1 - gamma^(d/v) computed without cancellation
    const double horizon_weight = -std::expm1(log_gamma * p.distance / v);
    return horizon_weight / -log_gamma * reward_rate(p, v);
}

/// Evenly spaced speeds from lo to hi inclusive.
inline std::vector<double> speed_grid(double lo = 0.0, double hi = 2.6, double step = 1e-3) {
    if (!(step > 0.0) || !(hi >= lo)) throw DomainError("invalid speed grid");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

struct SpeedOptimum {
    double speed = 0.0;
    double value = 0.0;
};

/// Grid argmax of the discounted return; ties go to the lower speed.
inline SpeedOptimum optimal_speed_search(const StraightLineProblem& p, std::span<const double> grid) {
    if (grid.empty()) throw DomainError("empty speed grid");
    SpeedOptimum best{0.0, -std::numeric_limits<double>::infinity()};
    bool found = false;
    for (double v : grid) {
        if (p.gamma == 1.0 && v == 0.0) continue;  // diverges
        const double r = discounted_return(p, v);
        if (!found || r > best.value || (r == best.value && v < best.speed)) {
            best = {v, r};
            found = true;
        }
    }
    if (!found) throw DomainError("speed grid has no admissible point");
    return best;
}

/// Golden-section refinement of a grid optimum within +-`bracket`, to tolerance `tol`.
inline SpeedOptimum refine_optimum(const StraightLineProblem& p, SpeedOptimum start, double bracket = 1e-3,
                                   double tol = 1e-6) {
    double lo = std::max(start.speed - bracket, p.gamma == 1.0 ? tol : 0.0);
    double hi = start.speed + bracket;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
    double fa = discounted_return(p, a), fb = discounted_return(p, b);
    while (hi - lo > tol) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = discounted_return(p, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = discounted_return(p, a);
        }
    }
    const double v = 0.5 * (lo + hi);
    SpeedOptimum refined{v, discounted_return(p, v)};
    return refined.value >= start.value ? refined : start;
}

/// Spread (max - min) of the grid-optimal speed across discount factors.
inline double invariance_spread(const EnergyParams& e, double c_p, double distance, std::span<const double> gammas,
                                std::span<const double> grid) {
    if (gammas.empty()) throw DomainError("empty gamma set");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double g : gammas) {
        const double v = optimal_speed_search({e, c_p, distance, g}, grid).speed;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

/// d/dv of the discounted return (gamma < 1); zero at interior optima.
inline double stationarity_residual(const StraightLineProblem& p, double v) {
    validate(p);
    if (!(v > 0.0)) throw DomainError("speed must be positive");
    if (!(p.gamma < 1.0)) throw DomainError("stationarity residual needs gamma < 1");
    const double cp = p.potential_scale();
    const double es = p.energy.e_s, ew = p.energy.e_w, d = p.distance;
    const double log_gamma = std::log(p.gamma);
    const double g = std::exp(log_gamma * d / v);
    return -d * g * (cp / v - es / (v * v) - ew) - (-std::expm1(log_gamma * d / v)) * (cp - 2.0 * ew * v) / log_gamma;
}

/// Episode length above which walking to the goal at v* beats standing still: 2 d / v*.
inline double crossover_time(const EnergyParams& e, double distance) {
    if (!(distance >= 0.0)) throw DomainError("distance must be non-negative");
    return 2.0 * distance / optimal_speed(e);
}

}  // namespace crowdrl
