#include <CLI11.hpp>
#include <malloc.h>

#include <iostream>
#include <string>
#include <vector>

#include "crowdrl/experiment.hpp"

using namespace crowdrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Large rollout matrices are allocated every gradient step; keeping them off mmap avoids page-fault churn.
void tune_allocator() {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
}

EnergyReduction parse_reduction(const std::string& s) {
    if (s == "mean") return EnergyReduction::Mean;
    if (s == "sum") return EnergyReduction::Sum;
    throw ConfigError("--energy-reduction must be 'mean' or 'sum'");
}

}  // namespace

int main(int argc, char** argv) {
    tune_allocator();
    CLI::App app{"Energy-based reward study for multi-agent crowd navigation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    bool quiet = false;
    auto* train = app.add_subcommand("train", "train a shared policy from a YAML config");
    train->add_option("config", config_path, "experiment config file")->required();
    train->add_flag("-q,--quiet", quiet, "suppress per-iteration progress");

    std::string checkpoint;
    EvalOptions eval_opt;
    std::string eval_out, reduction = "mean";
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with the deterministic policy");
    eval->add_option("checkpoint", checkpoint, "checkpoint manifest or training output directory")->required();
    eval->add_option("--scenario", eval_opt.scenario, "scenario name (see `scenarios list`)")->required();
    eval->add_option("--episodes", eval_opt.episodes, "evaluation episodes")->required();
    eval->add_option("--seed", eval_opt.seed, "evaluation seed")->capture_default_str();
    eval->add_option("--out", eval_out, "output directory (default eval/<scenario>)");
    eval->add_option("--energy-reduction", reduction, "mean (per agent) or sum (per episode)")->capture_default_str();
    eval->add_flag("--svg", eval_opt.svg, "also write an SVG histogram");

    std::string kind, analyze_out;
    bool analyze_svg = false;
    InvarianceParams inv;
    EnergyCurveParams curves;
    double crossover_d = 10.0;
    auto* analyze = app.add_subcommand("analyze", "closed-form analyses: invariance | energy-curves | crossover");
    analyze->add_option("kind", kind, "analysis kind")->required()->check(CLI::IsMember({"invariance", "energy-curves", "crossover"}));
    analyze->add_option("--cp", inv.c_p, "potential coefficients (invariance)")->delimiter(',');
    analyze->add_option("--gammas", inv.gammas, "discount factors per second (invariance)")->delimiter(',');
    analyze->add_option("--distances", inv.distances, "goal distances in m (invariance)")->delimiter(',');
    analyze->add_option("--grid-step", inv.grid_step, "speed grid resolution (invariance)")->capture_default_str();
    analyze->add_option("--v0", curves.v0, "initial speed (energy-curves)")->capture_default_str();
    analyze->add_option("--dt", curves.dt, "time step (energy-curves)")->capture_default_str();
    analyze->add_option("--gamma", curves.gamma, "discount factor for return curves (energy-curves)")->capture_default_str();
    analyze->add_option("--d", crossover_d, "goal distance (crossover)")->capture_default_str();
    analyze->add_option("--out", analyze_out, "output directory (default analyze/<kind>)");
    analyze->add_flag("--svg", analyze_svg, "also write SVG plots");

    std::string scenarios_action;
    auto* scenarios = app.add_subcommand("scenarios", "scenario catalog");
    scenarios->add_option("action", scenarios_action, "list")->required()->check(CLI::IsMember({"list"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train) {
            const auto cfg = load_config(config_path);
            const auto run = run_training(cfg, quiet ? nullptr : &std::cout);
            std::cout << "wrote " << run.directory.string() << '\n';
        } else if (*eval) {
            eval_opt.energy_reduction = parse_reduction(reduction);
            const auto ckpt = load_checkpoint(checkpoint);
            const fs::path out = resolve_output(eval_out.empty() ? fs::path("eval") / eval_opt.scenario : fs::path(eval_out));
            const auto report = run_evaluation(ckpt, eval_opt, out);
            std::cout << "success_rate " << format_number(report.success_rate) << " energy_plus_mean "
                      << format_number(report.energy_plus_mean) << " mean_abs_accel " << format_number(report.acceleration.mean)
                      << "\nwrote " << out.string() << '\n';
        } else if (*analyze) {
            const fs::path out = resolve_output(analyze_out.empty() ? fs::path("analyze") / kind : fs::path(analyze_out));
            if (kind == "invariance") {
                const auto table = analyze_invariance(inv, out, analyze_svg);
                std::cout << table.str();
            } else if (kind == "energy-curves") {
                const double v = analyze_energy_curves(curves, out, analyze_svg);
                std::cout << "per-step energy minimum at v = " << format_number(v) << " m/s\n";
            } else {
                const double t = analyze_crossover(crossover_d, kDefaultEnergy, out);
                std::cout << "crossover time " << format_number(t) << " s\n";
            }
            std::cout << "wrote " << out.string() << '\n';
        } else if (*scenarios) {
            for (const auto& s : scenario_catalog())
                std::cout << s.name << "\t" << to_string(s.spec.kind) << "\t" << s.spec.agent_count << (s.spec.agent_count == 1 ? " agent\t" : " agents\t") << s.description
                          << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
