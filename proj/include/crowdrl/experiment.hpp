#pragma once

// End-to-end drivers behind the command line: a training run with its output
// directory, checkpoint evaluation, and the closed-form analyses.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "crowdrl/config.hpp"
#include "crowdrl/discount.hpp"
#include "crowdrl/energy.hpp"
#include "crowdrl/evaluation.hpp"
#include "crowdrl/io.hpp"
#include "crowdrl/ppo.hpp"
#include "crowdrl/rollout.hpp"

namespace crowdrl {

inline const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols{
        "iteration",  "phase",         "episodes",    "transitions",  "success_rate", "energy_plus",
        "mean_speed", "mean_abs_accel", "mean_reward", "policy_loss",  "value_loss",   "entropy",
        "kl",         "rewinds",       "gradient_steps"};
    return cols;
}

inline std::vector<std::string> metrics_fields(const IterationMetrics& m) {
    const auto& u = m.update;
    return {std::to_string(m.iteration), std::to_string(m.phase), std::to_string(m.episodes),
            std::to_string(m.transitions), format_number(m.success_rate), format_number(m.energy_plus),
            format_number(m.mean_speed), format_number(m.mean_abs_accel), format_number(m.mean_episode_reward),
            format_number(u.policy_loss), format_number(u.value_loss), format_number(u.entropy),
            format_number(u.kl), std::to_string(u.rewinds), std::to_string(u.gradient_steps)};
}

inline CheckpointInfo checkpoint_info(const ExperimentConfig& c, int iteration, const Network& net) {
    return {net.architecture(), content_hash(serialize_config(c)), iteration, c.reward.preset, c.observation, c.world};
}

struct TrainRun {
    fs::path directory;
    Network network;
    std::vector<IterationMetrics> metrics;
};

/// Trains per `c` and writes into the resolved output directory:
///   config.yaml, run_manifest.txt, metrics.csv, checkpoint.{manifest,weights}
///   and checkpoint_<iteration>.{manifest,weights} every `checkpoint_every` iterations.
inline TrainRun run_training(const ExperimentConfig& c, std::ostream* log = nullptr) {
    validate(c);
    TrainRun run;
    run.directory = resolve_output(c.output_dir);
    ensure_directory(run.directory);
    const std::string config_text = serialize_config(c);
    write_text(run.directory / "config.yaml", config_text);
    write_text(run.directory / "run_manifest.txt",
               format_manifest({{"format_version", std::to_string(kConfigFormatVersion)},
                                {"code_version", kVersion},
                                {"seed", std::to_string(c.seed)},
                                {"config_file", "config.yaml"},
                                {"config_hash", content_hash(config_text)},
                                {"preset", c.reward.preset},
                                {"scenario", c.scenario_name.empty() ? std::string(to_string(c.scenario.kind)) : c.scenario_name},
                                {"metrics_file", "metrics.csv"},
                                {"csv_format_version", std::to_string(kCsvFormatVersion)}}));

    Trainer trainer(c.train, c.scenario, c.world, c.observation, resolve_rewards(c.reward));
    const fs::path metrics_path = run.directory / "metrics.csv";
    std::ofstream metrics(metrics_path, std::ios::binary);
    if (!metrics) throw IoError("cannot write '" + metrics_path.string() + "'");
    metrics << CsvTable(metrics_columns()).str();
    metrics.flush();

    trainer.train([&](const IterationMetrics& m, const Trainer& t) {
        const auto fields = metrics_fields(m);
        for (std::size_t i = 0; i < fields.size(); ++i) metrics << (i ? "," : "") << fields[i];
        metrics << '\n';
        metrics.flush();
        run.metrics.push_back(m);
        const int done = m.iteration + 1;
        if (c.train.checkpoint_every > 0 && done % c.train.checkpoint_every == 0 && done < c.train.iterations) {
            char stem[32];
            std::snprintf(stem, sizeof stem, "checkpoint_%05d", done);
            save_checkpoint(run.directory / stem, t.network(), checkpoint_info(c, done, t.network()));
        }
        if (log)
            *log << "iteration " << m.iteration << " phase " << m.phase << " success " << format_number(m.success_rate)
                 << " energy+ " << format_number(m.energy_plus) << " speed " << format_number(m.mean_speed) << " kl "
                 << format_number(m.update.kl) << " rewinds " << m.update.rewinds << '\n';
    });
    if (!metrics) throw IoError("write failed for '" + metrics_path.string() + "'");
    save_checkpoint(run.directory / "checkpoint", trainer.network(), checkpoint_info(c, trainer.iteration(), trainer.network()));
    run.network = trainer.network();
    return run;
}

struct EvalOptions {
    std::string scenario = "circle-8";
    int episodes = 100;
    std::uint64_t seed = 1;
    EnergyReduction energy_reduction = EnergyReduction::Mean;
    bool svg = false;
};

inline const std::vector<std::string>& eval_columns() {
    static const std::vector<std::string> cols{"scenario", "preset", "seed", "energy_plus_mean", "success_rate",
                                               "mean_abs_accel"};
    return cols;
}

/// Evaluates a checkpoint deterministically and writes eval_report.csv and eval_histogram.csv
/// (plus eval_histogram.svg when requested) into `out_dir`.
inline EvaluationReport run_evaluation(const LoadedCheckpoint& ckpt, const EvalOptions& opt, const fs::path& out_dir) {
    const auto spec = named_scenario(opt.scenario);
    if (!spec) throw ConfigError("unknown scenario '" + opt.scenario + "'");
    if (opt.episodes < 1) throw ConfigError("--episodes must be positive");
    ScenarioSpec s = *spec;
    s.seed = opt.seed;
    auto report = evaluate_policy(ckpt.network, s, ckpt.info.world, ckpt.info.observation, opt.episodes, opt.seed);
    double energy = report.energy_plus_mean;
    if (opt.energy_reduction == EnergyReduction::Sum) energy *= static_cast<double>(s.agent_count);

    ensure_directory(out_dir);
    CsvTable table(eval_columns());
    table.row({opt.scenario, ckpt.info.preset, std::to_string(opt.seed), format_number(energy),
               format_number(report.success_rate), format_number(report.acceleration.mean)});
    table.save(out_dir / "eval_report.csv");

    const auto& acc = report.acceleration;
    CsvTable hist({"bin_lo", "bin_hi", "count"});
    std::vector<double> edges;
    for (int i = 0; i <= AccelerationStats::kBins; ++i) edges.push_back(acc.range * i / AccelerationStats::kBins);
    for (int i = 0; i < AccelerationStats::kBins; ++i)
        hist.row({format_number(edges[i]), format_number(edges[i + 1]), std::to_string(acc.histogram[i])});
    hist.save(out_dir / "eval_histogram.csv");
    if (opt.svg)
        write_text(out_dir / "eval_histogram.svg",
                   svg_histogram(edges, {std::vector<long>(acc.histogram.begin(), acc.histogram.end())}, {ckpt.info.preset},
                                 "acceleration magnitude, " + opt.scenario, "|a| (m/s^2)"));
    return report;
}

struct InvarianceParams {
    std::vector<double> c_p{2.0};
    std::vector<double> gammas{0.9, 0.95, 0.99, 0.999};
    std::vector<double> distances{5.0, 20.0, 100.0};
    double grid_step = 1e-3;
    double v_hi = 2.6;
    EnergyParams energy = kDefaultEnergy;
};

/// Writes invariance.csv (gamma, d, c_p, v_opt, R_opt, spread); spread is max - min of v_opt over
/// all (gamma, d) pairs sharing the c_p.
inline CsvTable analyze_invariance(const InvarianceParams& p, const fs::path& out_dir, bool svg) {
    if (p.c_p.empty() || p.gammas.empty() || p.distances.empty()) throw ConfigError("analysis ranges must be non-empty");
    const auto grid = speed_grid(0.0, p.v_hi, p.grid_step);
    CsvTable table({"gamma", "d", "c_p", "v_opt", "R_opt", "spread"});
    std::vector<Series> curves;
    for (double cp : p.c_p) {
        std::vector<std::vector<std::string>> rows;
        double lo = 1e300, hi = -1e300;
        for (double g : p.gammas)
            for (double d : p.distances) {
                const StraightLineProblem prob{p.energy, cp, d, g};
                try {
                    validate(prob);
                } catch (const DomainError& e) {
                    throw ConfigError(e.what());
                }
                const auto opt = optimal_speed_search(prob, grid);
                lo = std::min(lo, opt.speed);
                hi = std::max(hi, opt.speed);
                rows.push_back({format_number(g), format_number(d), format_number(cp), format_number(opt.speed),
                                format_number(opt.value), ""});
            }
        for (auto& r : rows) {
            r.back() = format_number(hi - lo);
            table.row(r);
        }
        const double d_plot = p.distances.size() > 1 ? p.distances[1] : p.distances[0];
        for (double g : p.gammas) {
            Series s{"c_p=" + format_number(cp) + " gamma=" + format_number(g), {}, {}};
            const StraightLineProblem prob{p.energy, cp, d_plot, g};
            const double peak = optimal_speed_search(prob, grid).value;
            for (std::size_t i = 1; i < grid.size(); i += 10) {
                s.x.push_back(grid[i]);
                s.y.push_back(discounted_return(prob, grid[i]) / std::abs(peak));
            }
            curves.push_back(std::move(s));
        }
    }
    ensure_directory(out_dir);
    table.save(out_dir / "invariance.csv");
    if (svg)
        write_text(out_dir / "invariance.svg",
                   svg_line_plot(curves, "discounted return / |optimum|", "speed (m/s)", "normalized return"));
    return table;
}

struct EnergyCurveParams {
    double v0 = 1.3;
    double dt = 0.01;
    double v_hi = 2.6;
    double step = 1e-5;
    std::vector<double> distances{20.0, 100.0};
    double gamma = 0.99;
    EnergyParams energy = kDefaultEnergy;
};

/// Writes energy_curves.csv (per-step energy after one step from v0 to v), energy_curves_summary.csv
/// (the curve minimum and the passive threshold) and return_curves.csv (energy-only discounted return).
inline double analyze_energy_curves(const EnergyCurveParams& p, const fs::path& out_dir, bool svg) {
    if (!(p.dt > 0.0) || !(p.v0 >= 0.0) || !(p.step > 0.0) || !(p.v_hi > 0.0)) throw ConfigError("invalid energy-curve parameters");
    try {
        validate(p.energy);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto grid = speed_grid(0.0, p.v_hi, p.step);
    CsvTable curve({"v", "energy_accel", "energy_base"});
    double best_v = 0.0, best_e = 1e300;
    Series accel{"with acceleration", {}, {}}, base{"constant speed", {}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid[i];
        const double e = energy_step_accel(p.energy, {{p.v0, 0.0}, {v, 0.0}, p.dt});
        const double b = energy_step_base(p.energy, v, p.dt);
        // stopping dead also costs no work; the curve minimum of interest is the moving one
        if (v > 0.0 && e < best_e) {
            best_e = e;
            best_v = v;
        }
        if (i % 100 == 0) {
            curve.row({format_number(v), format_number(e), format_number(b)});
            accel.x.push_back(v);
            accel.y.push_back(e);
            base.x.push_back(v);
            base.y.push_back(b);
        }
    }
    CsvTable summary({"v0", "dt", "v_min", "energy_min", "passive_threshold"});
    summary.row({format_number(p.v0), format_number(p.dt), format_number(best_v), format_number(best_e),
                 format_number(passive_threshold(p.energy, p.v0, p.dt))});

    CsvTable returns({"gamma", "d", "c_p", "v", "R"});
    std::vector<Series> rcurves;
    const auto rgrid = speed_grid(0.0, p.v_hi, 1e-2);
    for (double d : p.distances) {
        Series s{"d=" + format_number(d), {}, {}};
        const StraightLineProblem prob{p.energy, 0.0, d, p.gamma};
        for (double v : rgrid) {
            if (p.gamma == 1.0 && v == 0.0) continue;
            const double r = discounted_return(prob, v);
            returns.row({format_number(p.gamma), format_number(d), "0", format_number(v), format_number(r)});
            s.x.push_back(v);
            s.y.push_back(r);
        }
        rcurves.push_back(std::move(s));
    }
    ensure_directory(out_dir);
    curve.save(out_dir / "energy_curves.csv");
    summary.save(out_dir / "energy_curves_summary.csv");
    returns.save(out_dir / "return_curves.csv");
    if (svg) {
        write_text(out_dir / "energy_curves.svg",
                   svg_line_plot({accel, base}, "energy of one step from v0 = " + format_number(p.v0), "v (m/s)", "energy (J/kg)"));
        write_text(out_dir / "return_curves.svg",
                   svg_line_plot(rcurves, "energy-only discounted return, gamma = " + format_number(p.gamma), "speed (m/s)", "return"));
    }
    return best_v;
}

/// Writes crossover.csv: the episode length above which walking the distance at v* costs less
/// than standing still for the whole episode.
inline double analyze_crossover(double distance, const EnergyParams& e, const fs::path& out_dir) {
    if (!(distance > 0.0)) throw ConfigError("distance must be positive");
    const double v = optimal_speed(e);
    const double t = crossover_time(e, distance);
    CsvTable table({"d", "v_star", "walk_energy", "crossover_time"});
    table.row({format_number(distance), format_number(v), format_number(straight_line_energy(e, distance, v)), format_number(t)});
    ensure_directory(out_dir);
    table.save(out_dir / "crossover.csv");
    return t;
}

}  // namespace crowdrl
