#pragma once

// Training matrices (applications x configurations of mean power and time),
// sample plans, and their on-disk format.
//
// A dataset directory is described by a manifest:
//
//   [dataset]
//   platforms = platforms.ini
//   apps = apps.csv
//   power = power.csv
//   time = time.csv
//   power_stddev = power_sd.csv   ; optional
//   time_stddev = time_sd.csv     ; optional
//   static_included = false
//
// Grid files have the header `app_id,<config id>,...` and one row per
// application; unmeasured cells hold the token NA.

#include "reoh/energy.hpp"
#include "reoh/error.hpp"
#include "reoh/io.hpp"
#include "reoh/platform.hpp"
#include "reoh/platform_io.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace reoh {

using Grid = Eigen::MatrixXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using MaskVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class PerfLimit { Computation, MemoryBandwidth, MemoryLatency, Mixed };

inline std::string_view to_string(PerfLimit p) {
    switch (p) {
    case PerfLimit::Computation: return "Computation";
    case PerfLimit::MemoryBandwidth: return "MemoryBandwidth";
    case PerfLimit::MemoryLatency: return "MemoryLatency";
    case PerfLimit::Mixed: return "Mixed";
    }
    return "?";
}

inline PerfLimit parse_perf_limit(std::string_view s) {
    for (auto p : {PerfLimit::Computation, PerfLimit::MemoryBandwidth, PerfLimit::MemoryLatency, PerfLimit::Mixed})
        if (to_string(p) == s) return p;
    throw InvalidArgument("unknown performance limit '" + std::string(s) + "'");
}

struct Dwarf {
    std::string_view name;
    PerfLimit limit;
};

/// Computation/communication pattern categories used to pick training applications.
inline constexpr std::array<Dwarf, 8> kDwarfs{{
    {"Graph Traversal", PerfLimit::MemoryLatency},
    {"Structured Grid", PerfLimit::MemoryBandwidth},
    {"Unstructured Grid", PerfLimit::MemoryLatency},
    {"Dense Linear Algebra", PerfLimit::Computation},
    {"Sparse Matrix", PerfLimit::Mixed},
    {"Dynamic Programming", PerfLimit::MemoryLatency},
    {"N-body", PerfLimit::Computation},
    {"Spectral", PerfLimit::MemoryLatency},
}};

inline bool is_known_dwarf(std::string_view name) {
    return std::any_of(kDwarfs.begin(), kDwarfs.end(), [&](const Dwarf& d) { return d.name == name; });
}

struct ApplicationMeta {
    int app_id = 0;
    std::string benchmark;
    std::string input_name;
    std::string dwarf;
    PerfLimit perf_limit = PerfLimit::Computation;
};

/// The 18 Rodinia benchmark/input pairs of the reference training set.
inline std::vector<ApplicationMeta> paper_applications() {
    struct Row { const char* bench; const char* input; const char* dwarf; PerfLimit limit; };
    static constexpr Row rows[] = {
        {"BFS", "graph1M", "Graph Traversal", PerfLimit::MemoryLatency},
        {"BFS", "graph2M", "Graph Traversal", PerfLimit::MemoryLatency},
        {"BFS", "graph4M", "Graph Traversal", PerfLimit::MemoryLatency},
        {"BFS", "graph512k", "Graph Traversal", PerfLimit::MemoryLatency},
        {"BFS", "graph8M", "Graph Traversal", PerfLimit::MemoryLatency},
        {"CFD", "fvcorr.domn.097K", "Unstructured Grid", PerfLimit::MemoryLatency},
        {"CFD", "fvcorr.domn.193K", "Unstructured Grid", PerfLimit::MemoryLatency},
        {"CFD", "missile.domn.0.2M", "Unstructured Grid", PerfLimit::MemoryLatency},
        {"Kmeans", "1000000_34", "Dense Linear Algebra", PerfLimit::Computation},
        {"Kmeans", "100000_34", "Dense Linear Algebra", PerfLimit::Computation},
        {"Kmeans", "10000_34", "Dense Linear Algebra", PerfLimit::Computation},
        {"Kmeans", "1000_34", "Dense Linear Algebra", PerfLimit::Computation},
        {"Kmeans", "3000000_34", "Dense Linear Algebra", PerfLimit::Computation},
        {"ParticleFilter", "128_10_100000_dp", "Structured Grid", PerfLimit::MemoryBandwidth},
        {"ParticleFilter", "128_10_10000_dp", "Structured Grid", PerfLimit::MemoryBandwidth},
        {"ParticleFilter", "128_10_1000_dp", "Structured Grid", PerfLimit::MemoryBandwidth},
        {"ParticleFilter", "128_2500_10000_dp", "Structured Grid", PerfLimit::MemoryBandwidth},
        {"ParticleFilter", "128_500_10000_dp", "Structured Grid", PerfLimit::MemoryBandwidth},
    };
    std::vector<ApplicationMeta> out;
    int id = 1;
    for (const auto& r : rows) out.push_back({id++, r.bench, r.input, r.dwarf, r.limit});
    return out;
}

struct TrainingMatrix {
    std::vector<ApplicationMeta> apps;
    std::vector<NativeConfig> configs;
    Grid power;  // W; NaN where unobserved
    Grid time;   // s;  NaN where unobserved
    Mask mask;   // true = observed
    Grid power_sd;  // optional (empty when absent); not used by the estimator
    Grid time_sd;
    bool static_included = false;

    std::size_t n_apps() const { return apps.size(); }
    std::size_t n_configs() const { return configs.size(); }

    std::optional<std::size_t> row_of(int app_id) const {
        for (std::size_t i = 0; i < apps.size(); ++i)
            if (apps[i].app_id == app_id) return i;
        return std::nullopt;
    }

    /// Energy of an observed cell in mJ (power x time).
    double energy(std::size_t row, std::size_t col) const {
        return power(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
               time(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) * kMillijoulesPerJoule;
    }

    bool fully_observed() const { return mask.all(); }

    void validate() const {
        const auto r = static_cast<Eigen::Index>(apps.size());
        const auto c = static_cast<Eigen::Index>(configs.size());
        if (power.rows() != r || power.cols() != c || time.rows() != r || time.cols() != c || mask.rows() != r ||
            mask.cols() != c)
            throw InvalidArgument("training matrix: inconsistent dimensions");
        std::set<int> ids;
        for (const auto& a : apps) {
            if (a.app_id < 1) throw InvalidArgument("training matrix: app_id must be >= 1");
            if (!ids.insert(a.app_id).second)
                throw InvalidArgument("training matrix: duplicate app_id " + std::to_string(a.app_id));
            if (!is_known_dwarf(a.dwarf)) throw InvalidArgument("training matrix: unknown dwarf '" + a.dwarf + "'");
        }
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) {
                const bool p_obs = !std::isnan(power(i, j));
                const bool t_obs = !std::isnan(time(i, j));
                if (p_obs != mask(i, j) || t_obs != mask(i, j))
                    throw InvalidArgument("training matrix: power and time masks differ at (" + std::to_string(i) +
                                          "," + std::to_string(j) + ")");
                if (!mask(i, j)) continue;
                if (!std::isfinite(power(i, j)) || power(i, j) < 0.0)
                    throw InvalidArgument("training matrix: invalid power at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
                if (!std::isfinite(time(i, j)) || !(time(i, j) > 0.0))
                    throw InvalidArgument("training matrix: invalid time at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
            }
    }

    /// Copy restricted to the given rows.
    TrainingMatrix select_rows(const std::vector<std::size_t>& rows) const {
        TrainingMatrix out;
        out.configs = configs;
        out.static_included = static_included;
        const auto n = static_cast<Eigen::Index>(rows.size());
        out.power.resize(n, power.cols());
        out.time.resize(n, time.cols());
        out.mask.resize(n, mask.cols());
        const bool sd = power_sd.size() > 0;
        if (sd) {
            out.power_sd.resize(n, power_sd.cols());
            out.time_sd.resize(n, time_sd.cols());
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k)]);
            out.apps.push_back(apps.at(static_cast<std::size_t>(src)));
            out.power.row(k) = power.row(src);
            out.time.row(k) = time.row(src);
            out.mask.row(k) = mask.row(src);
            if (sd) {
                out.power_sd.row(k) = power_sd.row(src);
                out.time_sd.row(k) = time_sd.row(src);
            }
        }
        return out;
    }

    /// Copy restricted to the given configuration columns.
    TrainingMatrix select_columns(const std::vector<std::size_t>& cols) const {
        TrainingMatrix out;
        out.apps = apps;
        out.static_included = static_included;
        const auto n = static_cast<Eigen::Index>(cols.size());
        const auto r = power.rows();
        out.power.resize(r, n);
        out.time.resize(r, n);
        out.mask.resize(r, n);
        const bool sd = power_sd.size() > 0;
        if (sd) {
            out.power_sd.resize(r, n);
            out.time_sd.resize(r, n);
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto src = static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)]);
            out.configs.push_back(configs.at(static_cast<std::size_t>(src)));
            out.power.col(k) = power.col(src);
            out.time.col(k) = time.col(src);
            out.mask.col(k) = mask.col(src);
            if (sd) {
                out.power_sd.col(k) = power_sd.col(src);
                out.time_sd.col(k) = time_sd.col(src);
            }
        }
        return out;
    }
};

/// Builds a fully observed matrix from dense grids.
inline TrainingMatrix make_training_matrix(std::vector<ApplicationMeta> apps, std::vector<NativeConfig> configs,
                                           Grid power, Grid time) {
    TrainingMatrix m;
    m.apps = std::move(apps);
    m.configs = std::move(configs);
    m.power = std::move(power);
    m.time = std::move(time);
    m.mask = m.power.array().isNaN() == false;
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Sampling and leave-one-application-out masking
// ---------------------------------------------------------------------------

struct SamplePlan {
    int target_app = 0;
    std::vector<std::size_t> sample_configs;  // ascending, distinct
    std::uint64_t seed = 0;
};

/// Uniform sample of `n` distinct indices out of [0, n_configs), reproducible from `seed`.
inline SamplePlan select_samples(std::size_t n_configs, std::size_t n, std::uint64_t seed) {
    if (n > n_configs)
        throw InvalidArgument("select_samples: cannot draw " + std::to_string(n) + " of " +
                              std::to_string(n_configs) + " configurations");
    std::vector<std::size_t> idx(n_configs);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_configs - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    SamplePlan plan;
    plan.seed = seed;
    plan.sample_configs.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(plan.sample_configs.begin(), plan.sample_configs.end());
    return plan;
}

/// The target application's measurements on the sampled configurations only.
struct PartialRow {
    int app_id = 0;
    Eigen::VectorXd power;  // NaN where not sampled
    Eigen::VectorXd time;
    MaskVector observed;

    std::size_t n_observed() const { return static_cast<std::size_t>(observed.count()); }
};

inline PartialRow empty_partial_row(int app_id, std::size_t n_configs) {
    const auto n = static_cast<Eigen::Index>(n_configs);
    return {app_id, Eigen::VectorXd::Constant(n, kNaN), Eigen::VectorXd::Constant(n, kNaN),
            MaskVector::Constant(n, false)};
}

struct MaskedData {
    TrainingMatrix training;  // every application except the target
    PartialRow target;
};

inline MaskedData mask_application(const TrainingMatrix& m, int app_id, const SamplePlan& plan) {
    const auto row = m.row_of(app_id);
    if (!row) throw InvalidArgument("mask_application: unknown app " + std::to_string(app_id));
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < m.n_apps(); ++i)
        if (i != *row) keep.push_back(i);

    MaskedData out{m.select_rows(keep), empty_partial_row(app_id, m.n_configs())};
    const auto r = static_cast<Eigen::Index>(*row);
    for (auto c : plan.sample_configs) {
        if (c >= m.n_configs()) throw InvalidArgument("mask_application: sample index out of range");
        const auto j = static_cast<Eigen::Index>(c);
        if (!m.mask(r, j)) continue;
        out.target.power(j) = m.power(r, j);
        out.target.time(j) = m.time(r, j);
        out.target.observed(j) = true;
    }
    return out;
}

/// Adds every platform's static power to each observed cell, turning the
/// power grid (and hence power x time) into whole-system totals.
inline TrainingMatrix augment_static(const TrainingMatrix& m, const System& system) {
    if (m.static_included) throw InvalidArgument("augment_static: static energy already included");
    for (const auto& c : m.configs)
        if (c.platform >= system.platforms.size())
            throw InvalidArgument("augment_static: configuration refers to unknown platform");
    TrainingMatrix out = m;
    for (Eigen::Index i = 0; i < out.power.rows(); ++i)
        for (Eigen::Index j = 0; j < out.power.cols(); ++j) {
            if (!out.mask(i, j)) continue;
            const auto active = m.configs[static_cast<std::size_t>(j)].platform;
            const double t = m.time(i, j);
            const double e = total_energy(system, active, m.energy(static_cast<std::size_t>(i),
                                                                   static_cast<std::size_t>(j)), t).total;
            out.power(i, j) = power_from(e, t) / kMillijoulesPerJoule;
        }
    out.static_included = true;
    return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

namespace detail {

inline Grid read_grid(const std::filesystem::path& path, const std::vector<ApplicationMeta>& apps,
                      const std::vector<std::string>& config_ids, bool allow_zero) {
    const auto table = io::read_csv(path);
    if (table.header.empty() || table.header[0] != "app_id")
        throw ParseError(path.string(), 1, "first column must be app_id");
    if (table.header.size() - 1 != config_ids.size())
        throw ParseError(path.string(), 1, "dimension mismatch: " + std::to_string(table.header.size() - 1) +
                                               " configurations, expected " + std::to_string(config_ids.size()));
    for (std::size_t j = 0; j < config_ids.size(); ++j)
        if (table.header[j + 1] != config_ids[j])
            throw ParseError(path.string(), 1, "column " + std::to_string(j + 2) + " is '" + table.header[j + 1] +
                                                   "', expected '" + config_ids[j] + "'");
    if (table.rows.size() != apps.size())
        throw ParseError(path.string(), 0, "dimension mismatch: " + std::to_string(table.rows.size()) +
                                               " application rows, expected " + std::to_string(apps.size()));
    Grid g(static_cast<Eigen::Index>(apps.size()), static_cast<Eigen::Index>(config_ids.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto line = table.line_numbers[i];
        const auto id = io::parse_int(row[0], path.string() + ":" + std::to_string(line));
        if (id != apps[i].app_id)
            throw ParseError(path.string(), line, "row app_id " + row[0] + " does not match apps file");
        for (std::size_t j = 0; j < config_ids.size(); ++j) {
            const auto& tok = row[j + 1];
            const std::string where = path.string() + ":" + std::to_string(line) + " column " + std::to_string(j + 2);
            double v = kNaN;
            if (tok != io::kMissing) {
                v = io::parse_double(tok, where);
                if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
                if (v < 0.0 || (!allow_zero && v == 0.0))
                    throw ParseError(where + ": value " + tok + " out of range");
            }
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return g;
}

inline void write_grid(const std::filesystem::path& path, const Grid& g, const std::vector<ApplicationMeta>& apps,
                       const std::vector<std::string>& config_ids) {
    auto out = io::open_for_write(path);
    out << "app_id";
    for (const auto& id : config_ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        out << apps[static_cast<std::size_t>(i)].app_id;
        for (Eigen::Index j = 0; j < g.cols(); ++j) out << ',' << io::format_double(g(i, j));
        out << '\n';
    }
}

} // namespace detail

inline std::vector<ApplicationMeta> load_applications(const std::filesystem::path& path) {
    const auto table = io::read_csv(path);
    const std::vector<std::string> expected{"app_id", "benchmark", "input_name", "dwarf", "perf_limit"};
    if (table.header != expected)
        throw ParseError(path.string(), 1, "header must be app_id,benchmark,input_name,dwarf,perf_limit");
    std::vector<ApplicationMeta> apps;
    std::set<int> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const auto line = table.line_numbers[i];
        ApplicationMeta a;
        a.app_id = static_cast<int>(io::parse_int(r[0], path.string() + ":" + std::to_string(line)));
        a.benchmark = r[1];
        a.input_name = r[2];
        a.dwarf = r[3];
        try {
            a.perf_limit = parse_perf_limit(r[4]);
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), line, e.what());
        }
        if (a.app_id < 1) throw ParseError(path.string(), line, "app_id must be >= 1");
        if (!seen.insert(a.app_id).second) throw ParseError(path.string(), line, "duplicate app_id");
        if (!is_known_dwarf(a.dwarf)) throw ParseError(path.string(), line, "unknown dwarf '" + a.dwarf + "'");
        apps.push_back(std::move(a));
    }
    return apps;
}

inline void save_applications(const std::filesystem::path& path, const std::vector<ApplicationMeta>& apps) {
    auto out = io::open_for_write(path);
    out << "app_id,benchmark,input_name,dwarf,perf_limit\n";
    for (const auto& a : apps)
        out << a.app_id << ',' << a.benchmark << ',' << a.input_name << ',' << a.dwarf << ','
            << to_string(a.perf_limit) << '\n';
}

struct TrainingData {
    System system;
    TrainingMatrix matrix;
};

inline TrainingData load_training(const std::filesystem::path& manifest) {
    const auto tree = io::read_key_value(manifest);
    const auto base = manifest.parent_path();
    auto path_of = [&](const char* key, bool required) -> std::optional<std::filesystem::path> {
        auto v = tree.get_optional<std::string>(std::string("dataset.") + key);
        if (!v) {
            if (required) throw ParseError(manifest.string() + ": missing [dataset] key '" + key + "'");
            return std::nullopt;
        }
        return base / io::trim(*v);
    };

    TrainingData data;
    data.system = load_system(*path_of("platforms", true));
    auto& m = data.matrix;
    m.apps = load_applications(*path_of("apps", true));

    // Configuration columns come from the power file header.
    const auto power_path = *path_of("power", true);
    const auto header = io::read_csv(power_path).header;
    std::vector<std::string> ids(header.begin() + (header.empty() ? 0 : 1), header.end());
    for (std::size_t j = 0; j < ids.size(); ++j) {
        try {
            m.configs.push_back(parse_config_id(ids[j], data.system));
        } catch (const InvalidArgument& e) {
            throw ParseError(power_path.string(), 1, "column " + std::to_string(j + 2) + ": " + e.what());
        }
    }
    m.power = detail::read_grid(power_path, m.apps, ids, true);
    m.time = detail::read_grid(*path_of("time", true), m.apps, ids, false);
    if (auto p = path_of("power_stddev", false)) m.power_sd = detail::read_grid(*p, m.apps, ids, true);
    if (auto p = path_of("time_stddev", false)) m.time_sd = detail::read_grid(*p, m.apps, ids, true);

    const auto flag = io::trim(tree.get<std::string>("dataset.static_included", "false"));
    if (flag != "true" && flag != "false")
        throw ParseError(manifest.string() + ": static_included must be true or false");
    m.static_included = flag == "true";

    m.mask = m.power.array().isNaN() == false;
    for (Eigen::Index i = 0; i < m.mask.rows(); ++i)
        for (Eigen::Index j = 0; j < m.mask.cols(); ++j)
            if (m.mask(i, j) != !std::isnan(m.time(i, j)))
                throw ParseError(manifest.string() + ": power and time disagree on missing cell (app " +
                                 std::to_string(m.apps[static_cast<std::size_t>(i)].app_id) + ", " +
                                 ids[static_cast<std::size_t>(j)] + ")");
    try {
        m.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(manifest.string() + ": " + e.what());
    }
    return data;
}

/// Writes manifest.ini plus the grid, application and platform files into `dir`.
inline std::filesystem::path save_training(const std::filesystem::path& dir, const TrainingData& data) {
    const auto& m = data.matrix;
    m.validate();
    std::filesystem::create_directories(dir);
    std::vector<std::string> ids;
    ids.reserve(m.configs.size());
    for (const auto& c : m.configs) ids.push_back(config_id(c, data.system));

    save_system(dir / "platforms.ini", data.system);
    save_applications(dir / "apps.csv", m.apps);
    detail::write_grid(dir / "power.csv", m.power, m.apps, ids);
    detail::write_grid(dir / "time.csv", m.time, m.apps, ids);

    io::KeyValueTree tree;
    tree.put("dataset.platforms", "platforms.ini");
    tree.put("dataset.apps", "apps.csv");
    tree.put("dataset.power", "power.csv");
    tree.put("dataset.time", "time.csv");
    if (m.power_sd.size() > 0) {
        detail::write_grid(dir / "power_sd.csv", m.power_sd, m.apps, ids);
        detail::write_grid(dir / "time_sd.csv", m.time_sd, m.apps, ids);
        tree.put("dataset.power_stddev", "power_sd.csv");
        tree.put("dataset.time_stddev", "time_sd.csv");
    }
    tree.put("dataset.static_included", m.static_included ? "true" : "false");
    const auto manifest = dir / "manifest.ini";
    io::write_key_value(manifest, tree);
    return manifest;
}

// ---------------------------------------------------------------------------
// Sample files: one measured configuration per row.
//   config_id,mean_time_s,mean_energy_mj,time_stddev_s,energy_stddev_mj,runs
// ---------------------------------------------------------------------------

inline void save_samples(const std::filesystem::path& path, const std::vector<RunMeasurement>& runs,
                         const System& system) {
    auto out = io::open_for_write(path);
    out << "config_id,mean_time_s,mean_energy_mj,time_stddev_s,energy_stddev_mj,runs\n";
    for (const auto& r : runs)
        out << config_id(r.config, system) << ',' << io::format_double(r.mean_time) << ','
            << io::format_double(r.mean_energy) << ',' << io::format_double(r.time_stddev) << ','
            << io::format_double(r.energy_stddev) << ',' << r.runs << '\n';
}

inline std::vector<RunMeasurement> load_samples(const std::filesystem::path& path, const System& system,
                                                int app_id = 0) {
    const auto table = io::read_csv(path);
    const std::vector<std::string> expected{"config_id", "mean_time_s", "mean_energy_mj",
                                            "time_stddev_s", "energy_stddev_mj", "runs"};
    if (table.header != expected)
        throw ParseError(path.string(), 1,
                         "header must be config_id,mean_time_s,mean_energy_mj,time_stddev_s,energy_stddev_mj,runs");
    std::vector<RunMeasurement> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const auto line = table.line_numbers[i];
        const std::string where = path.string() + ":" + std::to_string(line);
        RunMeasurement m;
        m.app_id = app_id;
        try {
            m.config = parse_config_id(r[0], system);
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), line, e.what());
        }
        m.mean_time = io::parse_double(r[1], where);
        m.mean_energy = io::parse_double(r[2], where);
        m.time_stddev = io::parse_double(r[3], where);
        m.energy_stddev = io::parse_double(r[4], where);
        m.runs = static_cast<int>(io::parse_int(r[5], where));
        if (!(m.mean_time > 0.0) || !std::isfinite(m.mean_time))
            throw ParseError(path.string(), line, "mean_time_s must be positive");
        if (!(m.mean_energy >= 0.0) || !std::isfinite(m.mean_energy))
            throw ParseError(path.string(), line, "mean_energy_mj must be non-negative");
        if (m.runs < 1) throw ParseError(path.string(), line, "runs must be >= 1");
        out.push_back(m);
    }
    return out;
}

/// Places sample measurements into a partial row over `configs`.
inline PartialRow partial_row_from(const std::vector<RunMeasurement>& runs, const std::vector<NativeConfig>& configs,
                                   int app_id) {
    auto row = empty_partial_row(app_id, configs.size());
    for (const auto& r : runs) {
        const auto it = std::find(configs.begin(), configs.end(), r.config);
        if (it == configs.end()) throw InvalidArgument("sample configuration not present in the training matrix");
        const auto j = static_cast<Eigen::Index>(it - configs.begin());
        if (row.observed(j)) throw InvalidArgument("configuration sampled twice");
        row.time(j) = r.mean_time;
        row.power(j) = power_from(r.mean_energy, r.mean_time) / kMillijoulesPerJoule;
        row.observed(j) = true;
    }
    return row;
}

inline void save_plan(const std::filesystem::path& path, const SamplePlan& plan) {
    io::KeyValueTree tree;
    tree.put("plan.target_app", plan.target_app);
    tree.put("plan.seed", plan.seed);
    tree.put("plan.samples", io::join(plan.sample_configs));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    io::write_key_value(path, tree);
}

inline SamplePlan load_plan(const std::filesystem::path& path) {
    const auto tree = io::read_key_value(path);
    SamplePlan plan;
    const std::string where = path.string();
    plan.target_app = static_cast<int>(io::parse_int(io::trim(tree.get<std::string>("plan.target_app", "0")), where));
    plan.seed = static_cast<std::uint64_t>(io::parse_int(io::trim(tree.get<std::string>("plan.seed", "0")), where));
    for (double v : io::parse_double_list(tree.get<std::string>("plan.samples", ""), where))
        plan.sample_configs.push_back(static_cast<std::size_t>(v));
    return plan;
}

} // namespace reoh
