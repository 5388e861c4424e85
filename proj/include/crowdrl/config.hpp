#pragma once

// Experiment configuration as YAML. Every section is optional and falls back
// to defaults; unknown keys are rejected with their line number.
//
//   format_version: 1
//   seed: 1
//   output_dir: runs/example
//   scenario:    { name, kind, agent_count, circle_radius, ..., energy_base: {e_s, e_w} }
//   world:       { dt, max_steps, agent_radius, goal_radius, v_max, a_max, omega_max, bounds_min, bounds_max }
//   observation: { neighbors, rays, ray_range, goal_range, energy_reference: {e_s, e_w} }
//   reward:      { preset, switch_iteration, overrides: {potential_coeff, goal, collision, discount} }
//   train:       { gamma, gae_lambda, ..., hidden: [64, 64], checkpoint_every }
//   evaluation:  { episodes, energy_reduction: mean | sum }

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "crowdrl/observation.hpp"
#include "crowdrl/ppo.hpp"
#include "crowdrl/rewards.hpp"
#include "crowdrl/scenarios.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

inline constexpr int kConfigFormatVersion = 1;

enum class EnergyReduction { Mean, Sum };

struct EvaluationConfig {
    int episodes = 100;
    EnergyReduction energy_reduction = EnergyReduction::Mean;  // per agent, or summed over the agents of an episode

    friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct RewardSelection {
    std::string preset = "a";
    int switch_iteration = kDefaultSwitchIteration;
    std::map<std::string, double> overrides;

    friend bool operator==(const RewardSelection&, const RewardSelection&) = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "runs/default";
    std::string scenario_name;  // catalog entry the scenario section starts from; may be empty
    ScenarioSpec scenario;
    WorldConfig world;
    ObservationSpec observation;
    RewardSelection reward;
    TrainConfig train;
    EvaluationConfig evaluation;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline const std::set<std::string>& reward_override_keys() {
    static const std::set<std::string> keys{"potential_coeff", "goal", "collision", "discount"};
    return keys;
}

/// Resolves the preset and applies overrides. goal/collision overrides replace the magnitude in
/// every phase that uses the component.
inline RewardConfig resolve_rewards(const RewardSelection& r) {
    RewardConfig cfg = preset(r.preset, r.switch_iteration);
    for (const auto& [key, value] : r.overrides) {
        if (!reward_override_keys().contains(key)) throw ConfigError("unknown reward override '" + key + "'");
        if (key == "discount") {
            cfg.discount = value;
            continue;
        }
        for (auto& phase : cfg.schedule.phases) {
            auto& w = phase.weights;
            if (key == "potential_coeff") w.potential_coeff = value;
            if (key == "goal" && w.goal != 0.0) w.goal = value;
            if (key == "collision" && w.collision != 0.0) w.collision = value;
        }
    }
    for (const auto& phase : cfg.schedule.phases) validate(phase.weights);
    if (cfg.discount && !(*cfg.discount > 0.0 && *cfg.discount <= 1.0))
        throw ConfigError("reward discount override must lie in (0, 1]");
    return cfg;
}

/// Sets the scenario seed and the trainer seed from the experiment seed.
inline void apply_seed(ExperimentConfig& c) {
    c.train.seed = c.seed;
    c.scenario.seed = c.seed;
}

inline void validate(const ExperimentConfig& c) {
    try {
        validate(c.scenario);
        validate(c.world);
        validate(c.observation);
    } catch (const ScenarioError& e) {
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    validate(c.train);
    resolve_rewards(c.reward);
    if (c.evaluation.episodes < 1) throw ConfigError("evaluation.episodes must be positive");
    if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) throw ConfigError("'" + key + "' must be a scalar", line_of(n));
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("'" + key + "' has an invalid value '" + n.Scalar() + "'", line_of(n));
    }
}

/// Walks a mapping, dispatching each key to `handlers`; unknown keys are errors.
template <class Handlers>
void for_each_key(const YAML::Node& map, const std::string& section, Handlers&& handlers) {
    if (!map.IsMap()) throw ConfigError("'" + section + "' must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!handlers(key, kv.second))
            throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'", line_of(kv.first));
    }
}

inline void read_energy(const YAML::Node& n, const std::string& section, EnergyParams& e) {
    for_each_key(n, section, [&](const std::string& k, const YAML::Node& v) {
        if (k == "e_s") e.e_s = scalar<double>(v, section + ".e_s");
        else if (k == "e_w") e.e_w = scalar<double>(v, section + ".e_w");
        else return false;
        return true;
    });
}

inline Vec2 read_vec2(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence() || n.size() != 2) throw ConfigError("'" + key + "' must be a two-element list", line_of(n));
    return {scalar<double>(n[0], key), scalar<double>(n[1], key)};
}

inline void read_scenario(const YAML::Node& n, ExperimentConfig& c) {
    // the catalog name is applied first so explicit fields override it regardless of order
    if (n.IsMap() && n["name"]) {
        c.scenario_name = scalar<std::string>(n["name"], "scenario.name");
        auto base = named_scenario(c.scenario_name);
        if (!base) throw ConfigError("unknown scenario '" + c.scenario_name + "'", line_of(n["name"]));
        c.scenario = *base;
    }
    auto& s = c.scenario;
    for_each_key(n, "scenario", [&](const std::string& k, const YAML::Node& v) {
        const std::string key = "scenario." + k;
        if (k == "name") return true;
        if (k == "kind") {
            const auto kind = parse_scenario_kind(scalar<std::string>(v, key));
            if (!kind) throw ConfigError("unknown scenario kind '" + v.Scalar() + "'", line_of(v));
            s.kind = *kind;
        } else if (k == "agent_count") s.agent_count = scalar<int>(v, key);
        else if (k == "circle_radius") s.circle_radius = scalar<double>(v, key);
        else if (k == "circle_obstacles") s.circle_obstacles = scalar<int>(v, key);
        else if (k == "circle_obstacle_radius") s.circle_obstacle_radius = scalar<double>(v, key);
        else if (k == "corridor_length") s.corridor_length = scalar<double>(v, key);
        else if (k == "corridor_width") s.corridor_width = scalar<double>(v, key);
        else if (k == "crossing_arm_width") s.crossing_arm_width = scalar<double>(v, key);
        else if (k == "crossing_arm_length") s.crossing_arm_length = scalar<double>(v, key);
        else if (k == "choke_opening") s.choke_opening = scalar<double>(v, key);
        else if (k == "car_speed") s.car_speed = scalar<double>(v, key);
        else if (k == "car_length") s.car_length = scalar<double>(v, key);
        else if (k == "car_width") s.car_width = scalar<double>(v, key);
        else if (k == "car_gap") s.car_gap = scalar<double>(v, key);
        else if (k == "noise") s.noise = scalar<double>(v, key);
        else if (k == "energy_base") read_energy(v, key, s.energy_base);
        else if (k == "energy_spread") s.energy_spread = scalar<double>(v, key);
        else return false;
        return true;
    });
}

inline void read_world(const YAML::Node& n, WorldConfig& w) {
    for_each_key(n, "world", [&](const std::string& k, const YAML::Node& v) {
        const std::string key = "world." + k;
        if (k == "dt") w.dt = scalar<double>(v, key);
        else if (k == "max_steps") w.max_steps = scalar<int>(v, key);
        else if (k == "agent_radius") w.agent_radius = scalar<double>(v, key);
        else if (k == "goal_radius") w.goal_radius = scalar<double>(v, key);
        else if (k == "v_max") w.v_max = scalar<double>(v, key);
        else if (k == "a_max") w.a_max = scalar<double>(v, key);
        else if (k == "omega_max") w.omega_max = scalar<double>(v, key);
        else if (k == "bounds_min") w.bounds_min = read_vec2(v, key);
        else if (k == "bounds_max") w.bounds_max = read_vec2(v, key);
        else return false;
        return true;
    });
}

inline void read_observation(const YAML::Node& n, ObservationSpec& o) {
    for_each_key(n, "observation", [&](const std::string& k, const YAML::Node& v) {
        const std::string key = "observation." + k;
        if (k == "neighbors") o.neighbors = scalar<int>(v, key);
        else if (k == "rays") o.rays = scalar<int>(v, key);
        else if (k == "ray_range") o.ray_range = scalar<double>(v, key);
        else if (k == "goal_range") o.goal_range = scalar<double>(v, key);
        else if (k == "energy_reference") read_energy(v, key, o.energy_reference);
        else return false;
        return true;
    });
}

inline void read_reward(const YAML::Node& n, RewardSelection& r) {
    for_each_key(n, "reward", [&](const std::string& k, const YAML::Node& v) {
        if (k == "preset") {
            r.preset = scalar<std::string>(v, "reward.preset");
            if (preset_title(r.preset).empty()) throw ConfigError("unknown key 'reward.preset': no preset named '" + r.preset + "'", line_of(v));
        } else if (k == "switch_iteration") {
            r.switch_iteration = scalar<int>(v, "reward.switch_iteration");
        } else if (k == "overrides") {
            for_each_key(v, "reward.overrides", [&](const std::string& ok, const YAML::Node& ov) {
                if (!reward_override_keys().contains(ok)) return false;
                r.overrides[ok] = scalar<double>(ov, "reward.overrides." + ok);
                return true;
            });
        } else {
            return false;
        }
        return true;
    });
}

inline void read_train(const YAML::Node& n, TrainConfig& t) {
    for_each_key(n, "train", [&](const std::string& k, const YAML::Node& v) {
        const std::string key = "train." + k;
        if (k == "gamma") t.gamma = scalar<double>(v, key);
        else if (k == "gae_lambda") t.gae_lambda = scalar<double>(v, key);
        else if (k == "clip_ratio") t.clip_ratio = scalar<double>(v, key);
        else if (k == "learning_rate") t.learning_rate = scalar<double>(v, key);
        else if (k == "epochs_per_batch") t.epochs_per_batch = scalar<int>(v, key);
        else if (k == "minibatch_size") t.minibatch_size = scalar<int>(v, key);
        else if (k == "kl_threshold") t.kl_threshold = scalar<double>(v, key);
        else if (k == "iterations") t.iterations = scalar<int>(v, key);
        else if (k == "envs_parallel") t.envs_parallel = scalar<int>(v, key);
        else if (k == "steps_per_env") t.steps_per_env = scalar<int>(v, key);
        else if (k == "value_coef") t.value_coef = scalar<double>(v, key);
        else if (k == "entropy_coef") t.entropy_coef = scalar<double>(v, key);
        else if (k == "max_grad_norm") t.max_grad_norm = scalar<double>(v, key);
        else if (k == "initial_log_std") t.initial_log_std = scalar<double>(v, key);
        else if (k == "normalize_rewards") t.normalize_rewards = scalar<bool>(v, key);
        else if (k == "checkpoint_every") t.checkpoint_every = scalar<int>(v, key);
        else if (k == "hidden") {
            if (!v.IsSequence()) throw ConfigError("'train.hidden' must be a list", line_of(v));
            t.hidden.clear();
            for (const auto& h : v) t.hidden.push_back(scalar<int>(h, key));
        } else return false;
        return true;
    });
}

inline void read_evaluation(const YAML::Node& n, EvaluationConfig& e) {
    for_each_key(n, "evaluation", [&](const std::string& k, const YAML::Node& v) {
        if (k == "episodes") {
            e.episodes = scalar<int>(v, "evaluation.episodes");
        } else if (k == "energy_reduction") {
            const auto s = scalar<std::string>(v, "evaluation.energy_reduction");
            if (s == "mean") e.energy_reduction = EnergyReduction::Mean;
            else if (s == "sum") e.energy_reduction = EnergyReduction::Sum;
            else throw ConfigError("evaluation.energy_reduction must be 'mean' or 'sum'", line_of(v));
        } else {
            return false;
        }
        return true;
    });
}

inline void with_line(const YAML::Node& n, const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        if (e.line > 0) throw;
        throw ConfigError(e.what(), line_of(n));
    }
}

}  // namespace detail

/// Parses a configuration document. Errors carry the offending line when it is known.
inline ExperimentConfig parse_config(const std::string& text) {
    using namespace detail;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
    if (!root["format_version"]) throw ConfigError("missing key 'format_version'");
    ExperimentConfig c;
    for_each_key(root, "", [&](const std::string& k, const YAML::Node& v) {
        if (k == "format_version") {
            const int version = scalar<int>(v, k);
            if (version != kConfigFormatVersion)
                throw ConfigError("unsupported format_version " + std::to_string(version), line_of(v));
        } else if (k == "seed") c.seed = scalar<std::uint64_t>(v, k);
        else if (k == "output_dir") c.output_dir = scalar<std::string>(v, k);
        else if (k == "scenario") with_line(v, [&] { read_scenario(v, c); });
        else if (k == "world") with_line(v, [&] { read_world(v, c.world); });
        else if (k == "observation") with_line(v, [&] { read_observation(v, c.observation); });
        else if (k == "reward") with_line(v, [&] { read_reward(v, c.reward); });
        else if (k == "train") with_line(v, [&] { read_train(v, c.train); });
        else if (k == "evaluation") with_line(v, [&] { read_evaluation(v, c.evaluation); });
        else return false;
        return true;
    });
    apply_seed(c);
    with_line(root, [&] { validate(c); });
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Emits every field, so parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    auto energy = [&](const char* key, const EnergyParams& e) {
        out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "e_s" << YAML::Value
            << e.e_s << YAML::Key << "e_w" << YAML::Value << e.e_w << YAML::EndMap;
    };
    auto vec2 = [&](const char* key, Vec2 v) {
        out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << v.x << v.y << YAML::EndSeq;
    };
    out << YAML::BeginMap;
    out << YAML::Key << "format_version" << YAML::Value << kConfigFormatVersion;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;

    const auto& s = c.scenario;
    out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
    if (!c.scenario_name.empty()) out << YAML::Key << "name" << YAML::Value << c.scenario_name;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.kind));
    out << YAML::Key << "agent_count" << YAML::Value << s.agent_count;
    out << YAML::Key << "circle_radius" << YAML::Value << s.circle_radius;
    out << YAML::Key << "circle_obstacles" << YAML::Value << s.circle_obstacles;
    out << YAML::Key << "circle_obstacle_radius" << YAML::Value << s.circle_obstacle_radius;
    out << YAML::Key << "corridor_length" << YAML::Value << s.corridor_length;
    out << YAML::Key << "corridor_width" << YAML::Value << s.corridor_width;
    out << YAML::Key << "crossing_arm_width" << YAML::Value << s.crossing_arm_width;
    out << YAML::Key << "crossing_arm_length" << YAML::Value << s.crossing_arm_length;
    out << YAML::Key << "choke_opening" << YAML::Value << s.choke_opening;
    out << YAML::Key << "car_speed" << YAML::Value << s.car_speed;
    out << YAML::Key << "car_length" << YAML::Value << s.car_length;
    out << YAML::Key << "car_width" << YAML::Value << s.car_width;
    out << YAML::Key << "car_gap" << YAML::Value << s.car_gap;
    out << YAML::Key << "noise" << YAML::Value << s.noise;
    energy("energy_base", s.energy_base);
    out << YAML::Key << "energy_spread" << YAML::Value << s.energy_spread;
    out << YAML::EndMap;

    const auto& w = c.world;
    out << YAML::Key << "world" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt" << YAML::Value << w.dt;
    out << YAML::Key << "max_steps" << YAML::Value << w.max_steps;
    out << YAML::Key << "agent_radius" << YAML::Value << w.agent_radius;
    out << YAML::Key << "goal_radius" << YAML::Value << w.goal_radius;
    out << YAML::Key << "v_max" << YAML::Value << w.v_max;
    out << YAML::Key << "a_max" << YAML::Value << w.a_max;
    out << YAML::Key << "omega_max" << YAML::Value << w.omega_max;
    vec2("bounds_min", w.bounds_min);
    vec2("bounds_max", w.bounds_max);
    out << YAML::EndMap;

    const auto& o = c.observation;
    out << YAML::Key << "observation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "neighbors" << YAML::Value << o.neighbors;
    out << YAML::Key << "rays" << YAML::Value << o.rays;
    out << YAML::Key << "ray_range" << YAML::Value << o.ray_range;
    out << YAML::Key << "goal_range" << YAML::Value << o.goal_range;
    energy("energy_reference", o.energy_reference);
    out << YAML::EndMap;

    out << YAML::Key << "reward" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "preset" << YAML::Value << c.reward.preset;
    out << YAML::Key << "switch_iteration" << YAML::Value << c.reward.switch_iteration;
    if (!c.reward.overrides.empty()) {
        out << YAML::Key << "overrides" << YAML::Value << YAML::BeginMap;
        for (const auto& [k, v] : c.reward.overrides) out << YAML::Key << k << YAML::Value << v;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    const auto& t = c.train;
    out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "gamma" << YAML::Value << t.gamma;
    out << YAML::Key << "gae_lambda" << YAML::Value << t.gae_lambda;
    out << YAML::Key << "clip_ratio" << YAML::Value << t.clip_ratio;
    out << YAML::Key << "learning_rate" << YAML::Value << t.learning_rate;
    out << YAML::Key << "epochs_per_batch" << YAML::Value << t.epochs_per_batch;
    out << YAML::Key << "minibatch_size" << YAML::Value << t.minibatch_size;
    out << YAML::Key << "kl_threshold" << YAML::Value << t.kl_threshold;
    out << YAML::Key << "iterations" << YAML::Value << t.iterations;
    out << YAML::Key << "envs_parallel" << YAML::Value << t.envs_parallel;
    out << YAML::Key << "steps_per_env" << YAML::Value << t.steps_per_env;
    out << YAML::Key << "value_coef" << YAML::Value << t.value_coef;
    out << YAML::Key << "entropy_coef" << YAML::Value << t.entropy_coef;
    out << YAML::Key << "max_grad_norm" << YAML::Value << t.max_grad_norm;
    out << YAML::Key << "initial_log_std" << YAML::Value << t.initial_log_std;
    out << YAML::Key << "normalize_rewards" << YAML::Value << t.normalize_rewards;
    out << YAML::Key << "hidden" << YAML::Value << YAML::Flow << t.hidden;
    out << YAML::Key << "checkpoint_every" << YAML::Value << t.checkpoint_every;
    out << YAML::EndMap;

    out << YAML::Key << "evaluation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "episodes" << YAML::Value << c.evaluation.episodes;
    out << YAML::Key << "energy_reduction" << YAML::Value
        << (c.evaluation.energy_reduction == EnergyReduction::Sum ? "sum" : "mean");
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace crowdrl
