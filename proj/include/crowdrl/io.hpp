#pragma once

// Persistence: checkpoints, CSV tables and minimal SVG line/bar plots.
//
// Checkpoint = two files sharing a stem:
//   <stem>.manifest  "key: value" lines (format, format_version, architecture, obs_dim, hidden,
//                    action_dim, parameter_count, weights_file, config_hash, iteration, preset,
//                    observation.*, world.*)
//   <stem>.weights   parameter_count little-endian float32 values in the network's flat layout

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crowdrl/common.hpp"
#include "crowdrl/nn.hpp"
#include "crowdrl/observation.hpp"
#include "crowdrl/sim.hpp"

namespace crowdrl {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr int kCsvFormatVersion = 1;
inline constexpr const char* kOutputRootVariable = "CROWDRL_OUTPUT_ROOT";

/// Raised for I/O failures (unwritable directory, short read).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string content_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// A relative `path` placed under $CROWDRL_OUTPUT_ROOT when that variable is set and non-empty.
inline fs::path resolve_output(const fs::path& path) {
    const char* root = std::getenv(kOutputRootVariable);
    if (!root || !*root || path.is_absolute()) return path;
    return fs::path(root) / path;
}

inline void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// In-memory CSV table; fields are written verbatim (callers keep them free of commas).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row(std::vector<std::string> fields) {
        if (fields.size() != header_.size()) throw UsageError("csv row arity mismatch");
        rows_.push_back(std::move(fields));
        return *this;
    }

    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& f) {
            for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
            os << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return os.str();
    }

    void save(const fs::path& path) const { write_text(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Parses a CSV written by CsvTable: header plus rows of plain fields.
inline std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    return rows;
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Line plot with linear axes and a legend. Output is deterministic.
inline std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                                 const std::string& y_label) {
    constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << format_number(xv) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << format_number(yv) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << px(s.x[i]) << "," << py(s.y[i]);
        os << "\"/>\n";
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" fill=\"" << color << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Histogram as vertical bars over equal-width bins.
inline std::string svg_histogram(const std::vector<double>& edges, const std::vector<std::vector<long>>& counts,
                                 const std::vector<std::string>& labels, const std::string& title, const std::string& x_label) {
    std::vector<Series> series;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        Series s{k < labels.size() ? labels[k] : "", {}, {}};
        long total = 0;
        for (long c : counts[k]) total += c;
        for (std::size_t i = 0; i < counts[k].size(); ++i) {
            const double density = total ? static_cast<double>(counts[k][i]) / static_cast<double>(total) : 0.0;
            s.x.insert(s.x.end(), {edges[i], edges[i + 1]});
            s.y.insert(s.y.end(), {density, density});
        }
        series.push_back(std::move(s));
    }
    return svg_line_plot(series, title, x_label, "fraction of samples");
}

/// Key-value text file: one "key: value" per line, '#' comments allowed.
inline std::map<std::string, std::string> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest '" + path.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ConfigError("malformed manifest line in '" + path.string() + "'", n);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value[0] == ' ') value.erase(0, 1);
        kv[line.substr(0, colon)] = value;
    }
    return kv;
}

inline std::string format_manifest(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ostringstream os;
    for (const auto& [k, v] : entries) os << k << ": " << v << '\n';
    return os.str();
}

struct CheckpointInfo {
    Architecture architecture;
    std::string config_hash;
    int iteration = 0;
    std::string preset;
    ObservationSpec observation;
    WorldConfig world;
};

inline void write_weights(const fs::path& path, const Eigen::VectorXf& params) {
    std::string bytes(static_cast<std::size_t>(params.size()) * 4, '\0');
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(params[i]);
        for (int b = 0; b < 4; ++b) bytes[static_cast<std::size_t>(i) * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    write_text(path, bytes);
}

inline Eigen::VectorXf read_weights(const fs::path& path, Eigen::Index count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read weights '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != static_cast<std::size_t>(count) * 4)
        throw IoError("weights file '" + path.string() + "' has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(count * 4));
    Eigen::VectorXf v(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[static_cast<std::size_t>(i) * 4 + b])) << (8 * b);
        v[i] = std::bit_cast<float>(bits);
    }
    return v;
}

/// Writes `<stem>.manifest` and `<stem>.weights`.
inline void save_checkpoint(const fs::path& stem, const ActorCritic<float>& net, const CheckpointInfo& info) {
    const auto& arch = net.architecture();
    std::string hidden;
    for (std::size_t i = 0; i < arch.hidden.size(); ++i) hidden += (i ? "," : "") + std::to_string(arch.hidden[i]);
    const fs::path weights = fs::path(stem.string() + ".weights");
    const auto& o = info.observation;
    const auto& w = info.world;
    const std::string manifest = format_manifest({
        {"format", "crowdrl-checkpoint"},
        {"format_version", std::to_string(kCheckpointFormatVersion)},
        {"architecture", arch.describe()},
        {"obs_dim", std::to_string(arch.obs_dim)},
        {"hidden", hidden},
        {"action_dim", std::to_string(arch.action_dim)},
        {"parameter_count", std::to_string(net.parameter_count())},
        {"weights_file", weights.filename().string()},
        {"weights_encoding", "float32-le"},
        {"config_hash", info.config_hash},
        {"iteration", std::to_string(info.iteration)},
        {"preset", info.preset},
        {"observation.neighbors", std::to_string(o.neighbors)},
        {"observation.rays", std::to_string(o.rays)},
        {"observation.ray_range", format_number(o.ray_range)},
        {"observation.goal_range", format_number(o.goal_range)},
        {"observation.energy_reference.e_s", format_number(o.energy_reference.e_s)},
        {"observation.energy_reference.e_w", format_number(o.energy_reference.e_w)},
        {"world.dt", format_number(w.dt)},
        {"world.max_steps", std::to_string(w.max_steps)},
        {"world.agent_radius", format_number(w.agent_radius)},
        {"world.goal_radius", format_number(w.goal_radius)},
        {"world.v_max", format_number(w.v_max)},
        {"world.a_max", format_number(w.a_max)},
        {"world.omega_max", format_number(w.omega_max)},
        {"world.bounds_min", format_number(w.bounds_min.x) + "," + format_number(w.bounds_min.y)},
        {"world.bounds_max", format_number(w.bounds_max.x) + "," + format_number(w.bounds_max.y)},
    });
    write_text(fs::path(stem.string() + ".manifest"), manifest);
    write_weights(weights, net.parameters());
}

struct LoadedCheckpoint {
    ActorCritic<float> network;
    CheckpointInfo info;
};

/// Loads from a manifest path, or from a directory holding checkpoint.manifest.
inline LoadedCheckpoint load_checkpoint(fs::path path) {
    if (fs::is_directory(path)) path /= "checkpoint.manifest";
    if (!fs::exists(path)) throw ConfigError("checkpoint '" + path.string() + "' does not exist");
    const auto kv = read_manifest(path);
    auto get = [&](const std::string& k) -> const std::string& {
        const auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("checkpoint manifest lacks '" + k + "'");
        return it->second;
    };
    auto number = [&](const std::string& k) {
        const std::string& s = get(k);
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') throw ConfigError("checkpoint manifest key '" + k + "' is not a number");
        return v;
    };
    auto integer = [&](const std::string& k) { return static_cast<int>(number(k)); };
    auto pair = [&](const std::string& k) {
        const std::string& s = get(k);
        const auto comma = s.find(',');
        if (comma == std::string::npos) throw ConfigError("checkpoint manifest key '" + k + "' needs two values");
        return Vec2{std::strtod(s.substr(0, comma).c_str(), nullptr), std::strtod(s.substr(comma + 1).c_str(), nullptr)};
    };
    if (get("format") != "crowdrl-checkpoint") throw ConfigError("not a checkpoint manifest");
    if (integer("format_version") != kCheckpointFormatVersion) throw ConfigError("unsupported checkpoint format_version");

    CheckpointInfo info;
    info.architecture.obs_dim = integer("obs_dim");
    info.architecture.action_dim = integer("action_dim");
    info.architecture.hidden.clear();
    std::stringstream hs(get("hidden"));
    for (std::string h; std::getline(hs, h, ',');) info.architecture.hidden.push_back(std::stoi(h));
    info.config_hash = get("config_hash");
    info.iteration = integer("iteration");
    info.preset = get("preset");
    auto& o = info.observation;
    o.neighbors = integer("observation.neighbors");
    o.rays = integer("observation.rays");
    o.ray_range = number("observation.ray_range");
    o.goal_range = number("observation.goal_range");
    o.energy_reference = {number("observation.energy_reference.e_s"), number("observation.energy_reference.e_w")};
    auto& w = info.world;
    w.dt = number("world.dt");
    w.max_steps = integer("world.max_steps");
    w.agent_radius = number("world.agent_radius");
    w.goal_radius = number("world.goal_radius");
    w.v_max = number("world.v_max");
    w.a_max = number("world.a_max");
    w.omega_max = number("world.omega_max");
    w.bounds_min = pair("world.bounds_min");
    w.bounds_max = pair("world.bounds_max");

    if (o.size() != info.architecture.obs_dim)
        throw ConfigError("checkpoint observation layout has " + std::to_string(o.size()) + " inputs but the network expects " +
                          std::to_string(info.architecture.obs_dim));
    if (info.architecture.action_dim != 2) throw ConfigError("checkpoint action arity must be 2");

    ActorCritic<float> net(info.architecture);
    if (integer("parameter_count") != net.parameter_count()) throw ConfigError("checkpoint parameter_count does not match architecture");
    net.parameters() = read_weights(path.parent_path() / get("weights_file"), net.parameter_count());
    if (!net.parameters().allFinite()) throw IoError("checkpoint weights are not finite");
    return {std::move(net), std::move(info)};
}

}  // namespace crowdrl
