#pragma once

// Heterogeneous platform descriptors and the mapping of every platform's
// native settings into CPU-equivalent coordinates.

#include "reoh/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace reoh {

enum class PlatformKind { CPU, GPU };

inline std::string_view to_string(PlatformKind kind) {
    return kind == PlatformKind::CPU ? "CPU" : "GPU";
}

inline PlatformKind parse_platform_kind(std::string_view text) {
    if (text == "CPU" || text == "cpu") return PlatformKind::CPU;
    if (text == "GPU" || text == "gpu") return PlatformKind::GPU;
    throw InvalidArgument("unknown platform kind '" + std::string(text) + "'");
}

struct PlatformSpec {
    std::string name;
    PlatformKind kind = PlatformKind::CPU;
    int total_cores = 1;
    double peak_gflops = 1.0;
    double peak_bandwidth = 1.0;  // GB/s
    int mem_controllers = 1;
    std::vector<double> frequencies;  // GHz, strictly increasing
    double static_power = 0.0;        // W
    std::vector<int> workgroup_sizes; // GPU only

    void validate() const {
        auto fail = [this](const std::string& what) {
            throw InvalidArgument("platform '" + name + "': " + what);
        };
        if (name.empty()) throw InvalidArgument("platform name must not be empty");
        if (name.find_first_of(":,/ \t") != std::string::npos)
            fail("name must not contain ':', ',', '/' or whitespace");
        if (total_cores < 1) fail("total_cores must be >= 1");
        if (mem_controllers < 1) fail("mem_controllers must be >= 1");
        if (!(peak_gflops > 0.0) || !std::isfinite(peak_gflops)) fail("peak_gflops must be positive");
        if (!(peak_bandwidth > 0.0) || !std::isfinite(peak_bandwidth))
            fail("peak_bandwidth must be positive");
        if (!(static_power >= 0.0) || !std::isfinite(static_power))
            fail("static_power must be non-negative");
        if (frequencies.empty()) fail("at least one frequency is required");
        for (std::size_t i = 0; i < frequencies.size(); ++i) {
            if (!(frequencies[i] > 0.0)) fail("frequencies must be positive");
            if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
                fail("frequencies must be strictly increasing");
        }
        if (kind == PlatformKind::GPU) {
            if (workgroup_sizes.empty()) fail("GPU platform needs workgroup_sizes");
            for (std::size_t i = 0; i < workgroup_sizes.size(); ++i) {
                if (workgroup_sizes[i] < 1) fail("workgroup sizes must be positive");
                if (i > 0 && workgroup_sizes[i] <= workgroup_sizes[i - 1])
                    fail("workgroup sizes must be strictly increasing");
            }
        }
    }
};

/// A platform's own setting. CPU settings use `cores`; GPU settings use
/// `workgroup_size` and always run with all memory controllers.
struct NativeConfig {
    std::size_t platform = 0;
    int cores = 0;
    int workgroup_size = 0;
    double freq_ghz = 0.0;
    int mem = 0;

    friend bool operator==(const NativeConfig&, const NativeConfig&) = default;
};

/// The platforms of one heterogeneous machine, in declaration order.
struct System {
    std::vector<PlatformSpec> platforms;

    void validate() const {
        if (platforms.empty()) throw InvalidArgument("system has no platforms");
        for (std::size_t i = 0; i < platforms.size(); ++i) {
            platforms[i].validate();
            for (std::size_t j = 0; j < i; ++j)
                if (platforms[j].name == platforms[i].name)
                    throw InvalidArgument("duplicate platform name '" + platforms[i].name + "'");
        }
        reference();
    }

    /// Index of the reference platform: the first CPU.
    std::size_t reference() const {
        for (std::size_t i = 0; i < platforms.size(); ++i)
            if (platforms[i].kind == PlatformKind::CPU) return i;
        throw InvalidArgument("system has no CPU to act as reference platform");
    }

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < platforms.size(); ++i)
            if (platforms[i].name == name) return i;
        return std::nullopt;
    }

    double total_static_power() const {
        double sum = 0.0;
        for (const auto& p : platforms) sum += p.static_power;
        return sum;
    }
};

/// CPU-equivalent coordinates of a native configuration.
struct UnifiedConfig {
    double equiv_cores = 0.0;
    std::size_t freq_index = 0;
    double equiv_mem = 0.0;
    NativeConfig origin;
};

struct FrequencyIndex {
    struct Entry {
        double freq_ghz;
        std::size_t platform;
        std::size_t index;
    };
    std::vector<Entry> entries;  // sorted by index

    static constexpr double kFreqTolerance = 1e-9;

    std::optional<std::size_t> lookup(std::size_t platform, double freq_ghz) const {
        for (const auto& e : entries)
            if (e.platform == platform && std::abs(e.freq_ghz - freq_ghz) <= kFreqTolerance)
                return e.index;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Conversion ratios
// ---------------------------------------------------------------------------

inline double per_core_flops(const PlatformSpec& spec) {
    return spec.peak_gflops / static_cast<double>(spec.total_cores);
}

/// Number of `ref` cores delivering the peak flops of `n_src_cores` cores of `src`.
inline double equiv_cores(const PlatformSpec& src, const PlatformSpec& ref, double n_src_cores) {
    return per_core_flops(src) / per_core_flops(ref) * n_src_cores;
}

/// Number of `ref` memory controllers matching the bandwidth of `n_src_mem` controllers of `src`.
inline double equiv_mem(const PlatformSpec& src, const PlatformSpec& ref, double n_src_mem) {
    const double src_per = src.peak_bandwidth / static_cast<double>(src.mem_controllers);
    const double ref_per = ref.peak_bandwidth / static_cast<double>(ref.mem_controllers);
    return src_per / ref_per * n_src_mem;
}

/// Merges all platform frequencies into one ascending integer scale.
/// Equal frequencies are ordered reference platform first, then by
/// declaration order.
inline FrequencyIndex build_frequency_index(const System& system) {
    if (system.platforms.empty()) throw InvalidArgument("empty platform set");
    std::optional<std::size_t> ref;
    for (std::size_t i = 0; i < system.platforms.size(); ++i)
        if (system.platforms[i].kind == PlatformKind::CPU) { ref = i; break; }

    FrequencyIndex out;
    for (std::size_t p = 0; p < system.platforms.size(); ++p) {
        if (system.platforms[p].frequencies.empty())
            throw InvalidArgument("platform '" + system.platforms[p].name + "' has no frequencies");
        for (double f : system.platforms[p].frequencies) out.entries.push_back({f, p, 0});
    }
    auto rank = [&](std::size_t p) { return (ref && p == *ref) ? 0 : 1; };
    std::stable_sort(out.entries.begin(), out.entries.end(), [&](const auto& a, const auto& b) {
        if (a.freq_ghz != b.freq_ghz) return a.freq_ghz < b.freq_ghz;
        if (rank(a.platform) != rank(b.platform)) return rank(a.platform) < rank(b.platform);
        return a.platform < b.platform;
    });
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].index = i;
    return out;
}

struct UnifyOptions {
    /// Round converted core counts to multiples of 0.5 (the coarse
    /// "one GPU core is about half a CPU core" convention).
    bool half_core_rounding = false;
};

inline constexpr double kMinEquivCores = 0.5;

inline void validate_config(const NativeConfig& cfg, const System& system) {
    if (cfg.platform >= system.platforms.size())
        throw InvalidArgument("configuration refers to unknown platform #" + std::to_string(cfg.platform));
    const auto& spec = system.platforms[cfg.platform];
    auto fail = [&](const std::string& what) {
        throw InvalidArgument("invalid configuration for '" + spec.name + "': " + what);
    };
    if (std::none_of(spec.frequencies.begin(), spec.frequencies.end(),
                     [&](double f) { return std::abs(f - cfg.freq_ghz) <= FrequencyIndex::kFreqTolerance; }))
        fail("frequency " + std::to_string(cfg.freq_ghz) + " GHz not offered");
    if (spec.kind == PlatformKind::CPU) {
        if (cfg.cores < 1 || cfg.cores > spec.total_cores) fail("cores out of range");
        if (cfg.mem < 1 || cfg.mem > spec.mem_controllers) fail("memory controllers out of range");
    } else {
        if (std::find(spec.workgroup_sizes.begin(), spec.workgroup_sizes.end(), cfg.workgroup_size) ==
            spec.workgroup_sizes.end())
            fail("workgroup size " + std::to_string(cfg.workgroup_size) + " not declared");
        if (cfg.mem != spec.mem_controllers) fail("GPU configurations use all memory controllers");
    }
}

/// Maps a native configuration onto the reference platform's coordinates.
inline UnifiedConfig unify(const NativeConfig& cfg, const System& system, const FrequencyIndex& fidx,
                           const UnifyOptions& options = {}) {
    validate_config(cfg, system);
    const auto& ref = system.platforms[system.reference()];
    const auto& spec = system.platforms[cfg.platform];

    UnifiedConfig out;
    out.origin = cfg;
    const auto fi = fidx.lookup(cfg.platform, cfg.freq_ghz);
    if (!fi) throw InvalidArgument("frequency " + std::to_string(cfg.freq_ghz) + " GHz missing from index");
    out.freq_index = *fi;

    if (cfg.platform == system.reference()) {
        out.equiv_cores = cfg.cores;
        out.equiv_mem = cfg.mem;
        return out;
    }
    const double count = spec.kind == PlatformKind::GPU ? cfg.workgroup_size : cfg.cores;
    double cores = equiv_cores(spec, ref, count);
    if (options.half_core_rounding) cores = std::round(cores * 2.0) / 2.0;
    out.equiv_cores = std::max(cores, kMinEquivCores);
    out.equiv_mem = equiv_mem(spec, ref, cfg.mem);
    return out;
}

/// All native settings of one platform, lexicographic in (cores|workgroup, freq, mem).
inline std::vector<NativeConfig> native_settings(const System& system, std::size_t platform) {
    const auto& spec = system.platforms.at(platform);
    std::vector<NativeConfig> out;
    if (spec.kind == PlatformKind::CPU) {
        out.reserve(static_cast<std::size_t>(spec.total_cores) * spec.frequencies.size() *
                    static_cast<std::size_t>(spec.mem_controllers));
        for (int c = 1; c <= spec.total_cores; ++c)
            for (double f : spec.frequencies)
                for (int m = 1; m <= spec.mem_controllers; ++m) out.push_back({platform, c, 0, f, m});
    } else {
        for (int w : spec.workgroup_sizes)
            for (double f : spec.frequencies) out.push_back({platform, 0, w, f, spec.mem_controllers});
    }
    return out;
}

/// Every configuration of the system: platforms in declaration order.
inline std::vector<NativeConfig> enumerate_configs(const System& system) {
    std::vector<NativeConfig> out;
    for (std::size_t p = 0; p < system.platforms.size(); ++p) {
        auto part = native_settings(system, p);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

inline std::vector<UnifiedConfig> unify_all(const std::vector<NativeConfig>& configs, const System& system,
                                            const UnifyOptions& options = {}) {
    const auto fidx = build_frequency_index(system);
    std::vector<UnifiedConfig> out;
    out.reserve(configs.size());
    for (const auto& c : configs) out.push_back(unify(c, system, fidx, options));
    return out;
}

// ---------------------------------------------------------------------------
// Configuration identifiers: "<platform>:c<cores>:f<GHz>:m<mem>" for CPUs and
// "<platform>:w<workgroup>:f<GHz>" for GPUs.
// ---------------------------------------------------------------------------

inline std::string format_freq(double ghz) {
    std::ostringstream os;
    os.precision(12);
    os << ghz;
    return os.str();
}

inline std::string config_id(const NativeConfig& cfg, const System& system) {
    const auto& spec = system.platforms.at(cfg.platform);
    std::string id = spec.name;
    if (spec.kind == PlatformKind::CPU)
        id += ":c" + std::to_string(cfg.cores) + ":f" + format_freq(cfg.freq_ghz) + ":m" + std::to_string(cfg.mem);
    else
        id += ":w" + std::to_string(cfg.workgroup_size) + ":f" + format_freq(cfg.freq_ghz);
    return id;
}

inline NativeConfig parse_config_id(std::string_view id, const System& system) {
    auto bad = [&](const std::string& why) {
        return InvalidArgument("bad configuration id '" + std::string(id) + "': " + why);
    };
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : id) {
        if (ch == ':') { parts.push_back(cur); cur.clear(); }
        else cur += ch;
    }
    parts.push_back(cur);
    if (parts.size() < 3) throw bad("too few fields");
    const auto p = system.find(parts[0]);
    if (!p) throw bad("unknown platform");
    const auto& spec = system.platforms[*p];

    auto number = [&](const std::string& field, char tag) -> double {
        if (field.size() < 2 || field[0] != tag) throw bad(std::string("expected '") + tag + "' field");
        std::size_t used = 0;
        double v = 0.0;
        try { v = std::stod(field.substr(1), &used); } catch (const std::exception&) { throw bad("not a number"); }
        if (used != field.size() - 1) throw bad("trailing characters");
        return v;
    };

    NativeConfig cfg;
    cfg.platform = *p;
    if (spec.kind == PlatformKind::CPU) {
        if (parts.size() != 4) throw bad("CPU ids have 4 fields");
        cfg.cores = static_cast<int>(number(parts[1], 'c'));
        cfg.freq_ghz = number(parts[2], 'f');
        cfg.mem = static_cast<int>(number(parts[3], 'm'));
    } else {
        if (parts.size() != 3) throw bad("GPU ids have 3 fields");
        cfg.workgroup_size = static_cast<int>(number(parts[1], 'w'));
        cfg.freq_ghz = number(parts[2], 'f');
        cfg.mem = spec.mem_controllers;
    }
    // Snap to the declared frequency so ids round-trip exactly.
    for (double f : spec.frequencies)
        if (std::abs(f - cfg.freq_ghz) <= 1e-6) cfg.freq_ghz = f;
    validate_config(cfg, system);
    return cfg;
}

// ---------------------------------------------------------------------------
// Built-in systems
// ---------------------------------------------------------------------------

/// Xeon E5-2650L v3 + Quadro K620 test machine. Static powers are nominal
/// idle draws, not measured values.
inline System paper_system() {
    PlatformSpec cpu;
    cpu.name = "E5-2650Lv3";
    cpu.kind = PlatformKind::CPU;
    cpu.total_cores = 24;
    cpu.peak_gflops = 115.2;
    cpu.peak_bandwidth = 68.0;
    cpu.mem_controllers = 2;
    cpu.frequencies = {1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.81};
    cpu.static_power = 20.0;

    PlatformSpec gpu;
    gpu.name = "QuadroK620";
    gpu.kind = PlatformKind::GPU;
    gpu.total_cores = 384;
    gpu.peak_gflops = 860.0;
    gpu.peak_bandwidth = 28.8;
    gpu.mem_controllers = 2;
    gpu.frequencies = {1.73};
    gpu.static_power = 8.0;
    gpu.workgroup_sizes = {1, 2, 4, 8, 16, 32, 64, 128, 256};

    return System{{cpu, gpu}};
}

/// Small 32 + 8 configuration machine for fast tests.
inline System ci_system() {
    PlatformSpec cpu;
    cpu.name = "ci-cpu";
    cpu.kind = PlatformKind::CPU;
    cpu.total_cores = 4;
    cpu.peak_gflops = 70.4;
    cpu.peak_bandwidth = 25.6;
    cpu.mem_controllers = 2;
    cpu.frequencies = {1.0, 1.4, 1.8, 2.2};
    cpu.static_power = 10.0;

    PlatformSpec gpu;
    gpu.name = "ci-gpu";
    gpu.kind = PlatformKind::GPU;
    gpu.total_cores = 256;
    gpu.peak_gflops = 400.0;
    gpu.peak_bandwidth = 48.0;
    gpu.mem_controllers = 2;
    gpu.frequencies = {1.6};
    gpu.static_power = 6.0;
    gpu.workgroup_sizes = {1, 2, 4, 8, 16, 32, 64, 128};

    return System{{cpu, gpu}};
}

} // namespace reoh
