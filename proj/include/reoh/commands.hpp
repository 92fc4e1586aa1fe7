#pragma once

// The four pipeline stages (benchmark, sample, predict, final run) plus the
// evaluation harness, as library calls the command-line tool wraps.

#include "reoh/backend.hpp"
#include "reoh/dataset.hpp"
#include "reoh/energy.hpp"
#include "reoh/error.hpp"
#include "reoh/estimator.hpp"
#include "reoh/io.hpp"
#include "reoh/platform.hpp"
#include "reoh/synthetic.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace reoh {

/// Descriptor used for an application when none is given: one command
/// per platform, named after the benchmark and input.
inline ExecutableDescriptor default_executable(const ApplicationMeta& app, const System& system) {
    ExecutableDescriptor d;
    d.name = app.benchmark + "_" + app.input_name;
    d.app_id = app.app_id;
    for (const auto& p : system.platforms) d.commands[p.name] = "./" + app.benchmark + " " + app.input_name;
    return d;
}

struct BenchmarkResult {
    TrainingData data;
    std::size_t failed_cells = 0;
    std::filesystem::path manifest;
};

/// Sweeps every application over every configuration. Failed cells are
/// recorded as missing and the sweep continues.
inline BenchmarkResult cmd_benchmark(const System& system, const std::vector<ApplicationMeta>& apps,
                                     MeasurementBackend& backend, const std::filesystem::path& out,
                                     std::ostream* log = nullptr) {
    system.validate();
    if (apps.empty()) throw InvalidArgument("benchmark: no applications");
    const auto configs = enumerate_configs(system);
    const auto N = static_cast<Eigen::Index>(apps.size());
    const auto D = static_cast<Eigen::Index>(configs.size());
    Grid power = Grid::Constant(N, D, kNaN), time = Grid::Constant(N, D, kNaN);
    Grid power_sd = Grid::Constant(N, D, kNaN), time_sd = Grid::Constant(N, D, kNaN);

    BenchmarkResult res;
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto exe = default_executable(apps[static_cast<std::size_t>(i)], system);
        for (Eigen::Index j = 0; j < D; ++j) {
            const auto& cfg = configs[static_cast<std::size_t>(j)];
            try {
                const auto r = backend.run(exe, cfg);
                if (!(r.mean_time > 0.0) || !(r.mean_energy >= 0.0))
                    throw BackendError("non-positive measurement");
                time(i, j) = r.mean_time;
                power(i, j) = power_from(r.mean_energy, r.mean_time) / kMillijoulesPerJoule;
                time_sd(i, j) = r.time_stddev;
                power_sd(i, j) = r.mean_energy > 0.0 ? power(i, j) * r.energy_stddev / r.mean_energy : 0.0;
            } catch (const BackendError& e) {
                ++res.failed_cells;
                if (log) *log << "warning: app " << exe.app_id << " on " << config_id(cfg, system) << ": " << e.what()
                              << " (recorded as missing)\n";
            }
        }
    }
    res.data.system = system;
    res.data.matrix = make_training_matrix(apps, configs, power, time);
    res.data.matrix.power_sd = power_sd;
    res.data.matrix.time_sd = time_sd;
    res.manifest = save_training(out, res.data);
    return res;
}

struct SampleResult {
    SamplePlan plan;
    std::vector<RunMeasurement> runs;
    std::size_t failed = 0;
};

/// Runs `exe` on `n` configurations drawn from the system's enumeration.
inline SampleResult cmd_sample(const ExecutableDescriptor& exe, const System& system, std::size_t n,
                               std::uint64_t seed, MeasurementBackend& backend, std::size_t min_samples,
                               std::ostream* log = nullptr) {
    exe.validate();
    const auto configs = enumerate_configs(system);
    if (n < min_samples)
        throw EstimatorError("insufficient samples: " + std::to_string(n) + " requested, at least " +
                             std::to_string(min_samples) + " required");
    SampleResult res;
    res.plan = select_samples(configs.size(), n, seed);
    res.plan.target_app = exe.app_id;
    for (auto c : res.plan.sample_configs) {
        try {
            res.runs.push_back(backend.run(exe, configs[c]));
        } catch (const BackendError& e) {
            ++res.failed;
            if (log) *log << "warning: " << config_id(configs[c], system) << ": " << e.what() << '\n';
        }
    }
    return res;
}

inline void save_sample_result(const std::filesystem::path& dir, const SampleResult& r, const System& system) {
    std::filesystem::create_directories(dir);
    save_samples(dir / "samples.csv", r.runs, system);
    save_plan(dir / "plan.ini", r.plan);
}

/// Offline prediction from a training matrix and sample runs. If the target
/// application is itself in the matrix its row is left out first.
inline PredictionResult cmd_predict(const TrainingData& training, const std::vector<RunMeasurement>& samples,
                                    int app_id, const EstimatorParams& params) {
    auto m = training.matrix;
    if (const auto row = m.row_of(app_id)) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < m.n_apps(); ++i)
            if (i != *row) keep.push_back(i);
        m = m.select_rows(keep);
    }
    auto target = partial_row_from(samples, m.configs, app_id);
    if (m.static_included) {
        const double s = training.system.total_static_power();
        for (Eigen::Index j = 0; j < target.power.size(); ++j)
            if (target.observed(j)) target.power(j) += s;
    }
    return predict_row(m, target, training.system, params);
}

inline void write_estimates(const std::filesystem::path& path, const PredictionResult& r, const System& system) {
    auto out = io::open_for_write(path);
    out << "config_id,platform,power_w,time_s,energy_mj,source,clamped\n";
    for (std::size_t j = 0; j < r.configs.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        out << config_id(r.configs[j], system) << ',' << system.platforms[r.configs[j].platform].name << ','
            << io::format_double(r.power(k)) << ',' << io::format_double(r.time(k)) << ','
            << io::format_double(r.energy(k)) << ','
            << (r.provenance[j] == Provenance::Sampled ? "sampled" : "predicted") << ','
            << (r.clamped[j] ? 1 : 0) << '\n';
    }
}

/// The chosen configuration as a small INI file that `run` can consume.
inline void write_choice(const std::filesystem::path& path, const PredictionResult& r, const System& system,
                         int app_id) {
    io::KeyValueTree tree;
    const auto k = static_cast<Eigen::Index>(r.chosen);
    tree.put("choice.app_id", app_id);
    tree.put("choice.config", config_id(r.chosen_config(), system));
    tree.put("choice.platform", system.platforms[r.chosen_config().platform].name);
    tree.put("choice.predicted_energy_mj", io::format_double(r.energy(k)));
    tree.put("choice.predicted_time_s", io::format_double(r.time(k)));
    tree.put("choice.predicted_power_w", io::format_double(r.power(k)));
    io::write_key_value(path, tree);
}

struct Choice {
    NativeConfig config;
    std::optional<double> predicted_energy_mj;
};

inline Choice read_choice(const std::filesystem::path& path, const System& system) {
    const auto tree = io::read_key_value(path);
    const auto id = tree.get_optional<std::string>("choice.config");
    if (!id) throw ParseError(path.string() + ": missing [choice] config");
    Choice c;
    try {
        c.config = parse_config_id(io::trim(*id), system);
    } catch (const InvalidArgument& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (auto e = tree.get_optional<std::string>("choice.predicted_energy_mj"))
        c.predicted_energy_mj = io::parse_double(io::trim(*e), path.string());
    return c;
}

struct FinalRun {
    RunMeasurement measurement;
    EnergyBreakdown energy;  ///< whole-system, from the measurement
    std::optional<double> predicted_mj;
    std::optional<double> delta_percent;  ///< (measured - predicted) / predicted
};

/// Runs the executable once on the chosen configuration.
inline FinalRun cmd_run(const ExecutableDescriptor& exe, const NativeConfig& cfg, const System& system,
                        MeasurementBackend& backend, std::optional<double> predicted_mj = std::nullopt) {
    validate_config(cfg, system);
    exe.validate();
    exe.command_for(system.platforms[cfg.platform].name);
    FinalRun f;
    f.measurement = backend.run(exe, cfg);
    if (!(f.measurement.mean_time > 0.0) || !(f.measurement.mean_energy >= 0.0))
        throw BackendError("backend returned a non-positive measurement");
    f.energy = total_energy(system, cfg.platform, f.measurement.mean_energy, f.measurement.mean_time);
    if (predicted_mj && *predicted_mj > 0.0) {
        f.predicted_mj = predicted_mj;
        f.delta_percent = (f.energy.total - *predicted_mj) / *predicted_mj * 100.0;
    }
    return f;
}

/// Runs the evaluation and writes report.csv, energy_by_app.csv (energy per app
/// and approach) and gap_by_app.csv (gap per app and approach) into `out`.
inline EvaluationReport cmd_evaluate(const TrainingData& data, const EvaluationOptions& options,
                                     const std::filesystem::path& out, const TrainingMatrix* scoring = nullptr,
                                     std::ostream* summary = nullptr) {
    const auto report = evaluate(data, options, scoring);
    std::filesystem::create_directories(out);
    {
        auto os = io::open_for_write(out / "report.csv");
        write_report_csv(os, report, data.matrix, data.system);
    }
    {
        auto os = io::open_for_write(out / "energy_by_app.csv");
        write_app_table(os, report, false);
    }
    {
        auto os = io::open_for_write(out / "gap_by_app.csv");
        write_app_table(os, report, true);
    }
    if (summary) print_summary(*summary, report);
    return report;
}

} // namespace reoh
