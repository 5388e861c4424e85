#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/energy.hpp"
#include "crowdrl/rewards.hpp"

namespace crowdrl {

/// Kinematic history of one agent over one episode. velocities[t] is the velocity after step t;
/// the agent starts at rest.
struct TrajectoryRecord {
    std::vector<Vec2> velocities;
    std::vector<bool> collisions;
    double dt = 0.1;
    double initial_goal_distance = 0.0;
    double final_goal_distance = 0.0;
    double path_progress = 0.0;
    bool finished = false;
    EnergyParams energy = kDefaultEnergy;

    int steps() const { return static_cast<int>(velocities.size()); }

    EpisodeSummary summary() const {
        return {final_goal_distance, initial_goal_distance, steps(), dt, path_progress, finished};
    }
};

/// Acceleration-aware energy summed over the trajectory (first step paired with rest).
inline double trajectory_energy(const TrajectoryRecord& t) {
    double total = 0.0;
    Vec2 prev{};
    for (const Vec2& v : t.velocities) {
        total += energy_step_accel(t.energy, {prev, v, t.dt});
        prev = v;
    }
    return total;
}

/// Basal + drag energy summed over the trajectory, ignoring acceleration.
inline double trajectory_energy_base(const TrajectoryRecord& t) {
    double total = 0.0;
    for (const Vec2& v : t.velocities) total += energy_step_base(t.energy, norm(v), t.dt);
    return total;
}

/// Energy+: acceleration-aware energy plus the average-speed estimate of what an unfinished
/// agent would still have to spend.
inline double energy_plus(const TrajectoryRecord& t) {
    if (t.velocities.empty()) throw DomainError("energy_plus of an empty trajectory");
    double e = trajectory_energy(t);
    if (!t.finished) {
        const auto s = t.summary();
        e -= average_heuristic_penalty(t.energy, s.final_goal_distance, s.average_speed());
    }
    return e;
}

inline double success_rate(std::span<const TrajectoryRecord> episodes) {
    if (episodes.empty()) throw DomainError("success_rate needs at least one trajectory");
    const auto finished =
        std::count_if(episodes.begin(), episodes.end(), [](const TrajectoryRecord& t) { return t.finished; });
    return static_cast<double>(finished) / static_cast<double>(episodes.size());
}

/// Mean speed over every recorded step of every trajectory.
inline double mean_speed(std::span<const TrajectoryRecord> trajectories) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : trajectories)
        for (const Vec2& v : t.velocities) {
            sum += norm(v);
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

struct AccelerationStats {
    static constexpr int kBins = 50;
    double mean = 0.0;
    double range = 2.0;              // histogram covers [0, range]; larger values land in the last bin
    std::array<long, kBins> histogram{};
    std::vector<double> samples;     // pooled |a|
};

/// Pools |v_t - v_{t-1}| / dt over consecutive recorded steps of every trajectory.
inline AccelerationStats acceleration_stats(std::span<const TrajectoryRecord> trajectories, double a_max = 2.0) {
    if (!(a_max > 0.0)) throw DomainError("histogram range must be positive");
    AccelerationStats s;
    s.range = a_max;
    for (const auto& t : trajectories)
        for (std::size_t i = 1; i < t.velocities.size(); ++i)
            s.samples.push_back(norm(t.velocities[i] - t.velocities[i - 1]) / t.dt);
    if (s.samples.empty()) return s;
    s.mean = std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / static_cast<double>(s.samples.size());
    for (double a : s.samples) {
        auto bin = static_cast<long>(std::floor(a / a_max * AccelerationStats::kBins));
        bin = std::clamp(bin, 0L, static_cast<long>(AccelerationStats::kBins - 1));
        ++s.histogram[static_cast<std::size_t>(bin)];
    }
    return s;
}

/// Survival function of the Kolmogorov distribution, P(K > x).
inline double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // small-x form of the CDF converges fast here
        constexpr double pi2_8 = std::numbers::pi * std::numbers::pi / 8.0;
        double sum = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double k = 2.0 * j - 1.0;
            sum += std::exp(-k * k * pi2_8 / (x * x));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        sum += (j % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at effective size nm/(n+m).
inline KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw DomainError("ks_two_sample needs two non-empty samples");
    std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    const double effective = n * m / (n + m);
    return {d, kolmogorov_survival(std::sqrt(effective) * d)};
}

struct RunAggregate {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) standard deviation
};

inline RunAggregate aggregate_runs(std::span<const double> values) {
    if (values.size() < 2) throw DomainError("aggregate_runs needs at least two runs for a standard deviation");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace crowdrl
