#pragma once

// Measurement backends: something that can run an executable on one
// configuration and report its mean time and dynamic energy.
//
// Only simulated backends ship. A hardware backend would implement
// MeasurementBackend::run by applying the configuration (core affinity,
// DVFS, memory-controller binding, or the workgroup variable on GPUs),
// launching LaunchSpec::command, and reading an energy meter. Cells of a
// real sweep must run sequentially, since concurrent runs perturb readings.

#include "reoh/dataset.hpp"
#include "reoh/energy.hpp"
#include "reoh/error.hpp"
#include "reoh/io.hpp"
#include "reoh/platform.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace reoh {

/// Environment variable through which a GPU executable reads its workgroup size.
inline constexpr const char* kWorkgroupEnv = "REOH_WORKGROUP_SIZE";

struct ExecutableDescriptor {
    std::string name;
    /// Application row that a simulated backend replays for this executable.
    int app_id = 0;
    std::map<std::string, std::string> commands;  ///< platform name -> command line
    std::filesystem::path workdir;
    std::map<std::string, std::string> env;

    void validate() const {
        if (commands.empty()) throw InvalidArgument("executable '" + name + "' has no platform command");
    }

    const std::string& command_for(const std::string& platform) const {
        const auto it = commands.find(platform);
        if (it == commands.end())
            throw InvalidArgument("executable '" + name + "' has no command for platform '" + platform + "'");
        return it->second;
    }
};

/// [executable] name, app_id, workdir; [commands] <platform> = <command line>;
/// [env] KEY = VALUE
inline ExecutableDescriptor load_executable(const std::filesystem::path& path) {
    const auto tree = io::read_key_value(path);
    ExecutableDescriptor d;
    const std::string where = path.string();
    d.name = io::trim(tree.get<std::string>("executable.name", path.stem().string()));
    d.app_id = static_cast<int>(io::parse_int(io::trim(tree.get<std::string>("executable.app_id", "0")), where));
    if (auto w = tree.get_optional<std::string>("executable.workdir")) d.workdir = io::trim(*w);
    if (auto c = tree.get_child_optional("commands"))
        for (const auto& [k, v] : *c) d.commands[k] = io::trim(v.data());
    if (auto e = tree.get_child_optional("env"))
        for (const auto& [k, v] : *e) d.env[k] = io::trim(v.data());
    try {
        d.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
    }
    return d;
}

inline void save_executable(const std::filesystem::path& path, const ExecutableDescriptor& d) {
    d.validate();
    io::KeyValueTree tree;
    tree.put("executable.name", d.name);
    tree.put("executable.app_id", d.app_id);
    if (!d.workdir.empty()) tree.put("executable.workdir", d.workdir.string());
    // Keys may contain '.', which the tree would read as a path separator.
    io::KeyValueTree commands, env;
    for (const auto& [k, v] : d.commands) commands.push_back({k, io::KeyValueTree(v)});
    for (const auto& [k, v] : d.env) env.push_back({k, io::KeyValueTree(v)});
    tree.add_child("commands", commands);
    if (!env.empty()) tree.add_child("env", env);
    io::write_key_value(path, tree);
}

/// Everything needed to launch one run.
struct LaunchSpec {
    std::string platform;
    std::string command;
    std::filesystem::path workdir;
    std::map<std::string, std::string> env;
    NativeConfig config;
};

/// Resolves the platform command and the environment for `cfg`. The
/// descriptor's own variables come first; configuration variables override.
inline LaunchSpec launch_spec(const ExecutableDescriptor& d, const NativeConfig& cfg, const System& system) {
    validate_config(cfg, system);
    const auto& spec = system.platforms[cfg.platform];
    LaunchSpec l;
    l.platform = spec.name;
    l.command = d.command_for(spec.name);
    l.workdir = d.workdir;
    l.env = d.env;
    l.config = cfg;
    l.env["REOH_PLATFORM"] = spec.name;
    l.env["REOH_FREQ_GHZ"] = format_freq(cfg.freq_ghz);
    if (spec.kind == PlatformKind::GPU) {
        l.env[kWorkgroupEnv] = std::to_string(cfg.workgroup_size);
    } else {
        l.env["REOH_CORES"] = std::to_string(cfg.cores);
        l.env["REOH_MEM_CONTROLLERS"] = std::to_string(cfg.mem);
    }
    return l;
}

class MeasurementBackend {
public:
    virtual ~MeasurementBackend() = default;
    virtual std::string name() const = 0;
    /// Positive time and non-negative energy, or BackendError.
    virtual RunMeasurement run(const ExecutableDescriptor& exe, const NativeConfig& cfg) = 0;
    std::size_t invocations() const { return calls_; }

protected:
    std::size_t calls_ = 0;
};

/// Replays the cells of a measured (or generated) matrix. Missing cells fail.
class SimulatedBackend : public MeasurementBackend {
public:
    static constexpr int kRunsPerCell = 5;

    explicit SimulatedBackend(TrainingData data) : data_(std::move(data)) { data_.matrix.validate(); }

    std::string name() const override { return "simulated"; }
    const TrainingData& data() const { return data_; }

    RunMeasurement run(const ExecutableDescriptor& exe, const NativeConfig& cfg) override {
        ++calls_;
        const auto& m = data_.matrix;
        const auto row = m.row_of(exe.app_id);
        if (!row) throw BackendError("simulated backend: no application " + std::to_string(exe.app_id));
        const auto it = std::find(m.configs.begin(), m.configs.end(), cfg);
        if (it == m.configs.end()) throw BackendError("simulated backend: configuration not in the matrix");
        const auto i = static_cast<Eigen::Index>(*row);
        const auto j = static_cast<Eigen::Index>(it - m.configs.begin());
        if (!m.mask(i, j))
            throw BackendError("simulated backend: no measurement for app " + std::to_string(exe.app_id) + " on " +
                               config_id(cfg, data_.system));
        const double p = m.power(i, j), t = m.time(i, j);
        RunMeasurement r;
        r.app_id = exe.app_id;
        r.config = cfg;
        r.mean_time = t;
        r.mean_energy = p * t * kMillijoulesPerJoule;
        if (m.static_included) r.mean_energy -= data_.system.total_static_power() * t * kMillijoulesPerJoule;
        if (m.time_sd.size() > 0 && std::isfinite(m.time_sd(i, j))) r.time_stddev = m.time_sd(i, j);
        if (m.power_sd.size() > 0 && std::isfinite(m.power_sd(i, j)) && p > 0.0) {
            const double rel = std::hypot(m.power_sd(i, j) / p, r.time_stddev / t);
            r.energy_stddev = rel * std::abs(r.mean_energy);
        }
        r.runs = kRunsPerCell;
        return r;
    }

private:
    TrainingData data_;
};

/// Records every launch and returns a fixed measurement; for checking what
/// a hardware backend would be asked to do.
class EchoBackend : public MeasurementBackend {
public:
    explicit EchoBackend(System system) : system_(std::move(system)) {}

    std::string name() const override { return "echo"; }
    const std::vector<LaunchSpec>& launches() const { return launches_; }

    RunMeasurement run(const ExecutableDescriptor& exe, const NativeConfig& cfg) override {
        ++calls_;
        launches_.push_back(launch_spec(exe, cfg, system_));
        RunMeasurement r;
        r.app_id = exe.app_id;
        r.config = cfg;
        r.mean_time = 1.0;
        r.mean_energy = 1.0;
        return r;
    }

private:
    System system_;
    std::vector<LaunchSpec> launches_;
};

} // namespace reoh
