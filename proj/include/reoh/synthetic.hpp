#pragma once

// Synthetic heterogeneous-system response matrices with known structure,
// the brute-force optimum, single-platform baselines, and the scoring
// harness that compares them.

#include "reoh/dataset.hpp"
#include "reoh/energy.hpp"
#include "reoh/error.hpp"
#include "reoh/estimator.hpp"
#include "reoh/platform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace reoh {

struct Range {
    double lo;
    double hi;
};

/// Parameter ranges of the per-archetype response curves.
struct ResponseShape {
    Range serial_fraction{0.02, 0.25};    // Amdahl serial part
    Range freq_sensitivity{0.3, 1.0};     // share of time scaling with 1/f
    Range mem_sensitivity{0.0, 0.6};      // share of time scaling with 1/controllers
    Range gpu_speedup{0.25, 4.0};         // vs. the fastest CPU setting, log-uniform
    Range gpu_curvature{0.02, 0.08};      // workgroup-size penalty around the optimum
    Range time_scale{0.5, 20.0};          // s at the fastest CPU setting, log-uniform
    Range power_scale{0.8, 1.25};
    Range cpu_base_power{2.0, 6.0};       // W
    Range cpu_core_power{1.0, 2.2};       // W per core at top frequency
    Range cpu_mem_power{1.0, 3.0};        // W per controller
    Range power_freq_exponent{1.5, 2.5};
    Range gpu_power{15.0, 35.0};          // W at full occupancy
};

struct SyntheticSpec {
    int n_apps = 18;
    System system = paper_system();
    int rank = 3;
    double noise_sd = 0.0;  ///< relative (log-normal) measurement noise
    ResponseShape shape;
    /// Application whose CPU performance degrades past half the cores; 0 = none.
    int two_socket_anomaly_app = 0;
    std::uint64_t seed = 1;
};

/// 18 applications on the Xeon E5-2650Lv3 + Quadro K620 machine.
inline SyntheticSpec paper_profile(std::uint64_t seed = 1, double noise_sd = 0.0) {
    SyntheticSpec s;
    s.seed = seed;
    s.noise_sd = noise_sd;
    return s;
}

/// 6 applications x 40 configurations.
inline SyntheticSpec ci_profile(std::uint64_t seed = 1, double noise_sd = 0.0) {
    SyntheticSpec s;
    s.n_apps = 6;
    s.system = ci_system();
    s.seed = seed;
    s.noise_sd = noise_sd;
    return s;
}

struct SyntheticSystem {
    TrainingData data;  ///< emitted (measured) matrix
    Grid true_power;    ///< noiseless
    Grid true_time;

    /// The emitted matrix with its grids replaced by the noiseless truth.
    TrainingMatrix truth() const {
        TrainingMatrix t = data.matrix;
        t.power = true_power;
        t.time = true_time;
        t.power_sd.setZero();
        t.time_sd.setZero();
        return t;
    }
};

inline std::vector<ApplicationMeta> synthetic_applications(int n) {
    const auto base = paper_applications();
    std::vector<ApplicationMeta> out;
    for (int i = 0; i < n; ++i) {
        ApplicationMeta a = base[static_cast<std::size_t>(i) % base.size()];
        a.app_id = i + 1;
        if (i >= static_cast<int>(base.size())) a.input_name += "_v" + std::to_string(i / base.size());
        out.push_back(a);
    }
    return out;
}

namespace detail {

struct Archetype {
    double serial, freq_sens, mem_sens;
    double cpu_base, cpu_core, cpu_mem, freq_exp;
    std::vector<double> gpu_speedup;  // per platform (GPU entries used)
    std::vector<double> gpu_curv;
    std::vector<double> gpu_opt_log2;
    std::vector<double> gpu_power;
};

inline double uniform(std::mt19937_64& rng, Range r) {
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, Range r) {
    return std::exp(uniform(rng, {std::log(r.lo), std::log(r.hi)}));
}

inline double archetype_time(const Archetype& a, const System& sys, const NativeConfig& c) {
    const auto& spec = sys.platforms[c.platform];
    const double fmax = spec.frequencies.back();
    const double freq = (1.0 - a.freq_sens) + a.freq_sens * fmax / c.freq_ghz;
    if (spec.kind == PlatformKind::CPU) {
        auto amdahl = [&](double cores) { return a.serial + (1.0 - a.serial) / cores; };
        const double mem = (1.0 - a.mem_sens) + a.mem_sens * spec.mem_controllers / static_cast<double>(c.mem);
        return amdahl(c.cores) / amdahl(spec.total_cores) * freq * mem;
    }
    const auto p = c.platform;
    const double d = std::log2(static_cast<double>(c.workgroup_size)) - a.gpu_opt_log2[p];
    return (1.0 + a.gpu_curv[p] * d * d) * freq / a.gpu_speedup[p];
}

inline double archetype_power(const Archetype& a, const System& sys, const NativeConfig& c) {
    const auto& spec = sys.platforms[c.platform];
    const double frel = c.freq_ghz / spec.frequencies.back();
    if (spec.kind == PlatformKind::CPU)
        return a.cpu_base + a.cpu_core * c.cores * std::pow(frel, a.freq_exp) + a.cpu_mem * c.mem;
    const auto p = c.platform;
    const double occ = std::min(1.0, std::log2(c.workgroup_size + 1.0) / (a.gpu_opt_log2[p] + 1.0));
    return a.gpu_power[p] * (0.4 + 0.6 * occ) * std::pow(frel, 2.0);
}

} // namespace detail

/// Builds a fully observed matrix whose power and time grids are
/// non-negative mixtures of `rank` archetype response curves, then applies
/// multiplicative noise. The noiseless grids are retained for scoring.
inline SyntheticSystem generate_system(const SyntheticSpec& spec) {
    spec.system.validate();
    if (spec.n_apps < 2) throw InvalidArgument("generate_system: need at least two applications");
    if (!(spec.noise_sd >= 0.0)) throw InvalidArgument("generate_system: noise_sd must be non-negative");
    const auto configs = enumerate_configs(spec.system);
    const int n_cfg = static_cast<int>(configs.size());
    if (spec.rank < 1 || spec.rank > std::min(spec.n_apps, n_cfg))
        throw InvalidArgument("generate_system: rank " + std::to_string(spec.rank) + " infeasible for " +
                              std::to_string(spec.n_apps) + " x " + std::to_string(n_cfg));

    std::mt19937_64 rng(spec.seed);
    const auto& sh = spec.shape;
    const auto n_plat = spec.system.platforms.size();
    std::vector<detail::Archetype> arche(static_cast<std::size_t>(spec.rank));
    for (auto& a : arche) {
        a.serial = detail::uniform(rng, sh.serial_fraction);
        a.freq_sens = detail::uniform(rng, sh.freq_sensitivity);
        a.mem_sens = detail::uniform(rng, sh.mem_sensitivity);
        a.cpu_base = detail::uniform(rng, sh.cpu_base_power);
        a.cpu_core = detail::uniform(rng, sh.cpu_core_power);
        a.cpu_mem = detail::uniform(rng, sh.cpu_mem_power);
        a.freq_exp = detail::uniform(rng, sh.power_freq_exponent);
        a.gpu_speedup.assign(n_plat, 1.0);
        a.gpu_curv.assign(n_plat, 0.0);
        a.gpu_opt_log2.assign(n_plat, 0.0);
        a.gpu_power.assign(n_plat, 0.0);
        for (std::size_t p = 0; p < n_plat; ++p) {
            const auto& ps = spec.system.platforms[p];
            if (ps.kind != PlatformKind::GPU) continue;
            a.gpu_speedup[p] = detail::log_uniform(rng, sh.gpu_speedup);
            a.gpu_curv[p] = detail::uniform(rng, sh.gpu_curvature);
            const double lo = std::log2(static_cast<double>(ps.workgroup_sizes.front()));
            const double hi = std::log2(static_cast<double>(ps.workgroup_sizes.back()));
            a.gpu_opt_log2[p] = std::round(detail::uniform(rng, {lo + 0.5 * (hi - lo), hi}));
            a.gpu_power[p] = detail::uniform(rng, sh.gpu_power);
        }
    }

    const auto R = static_cast<Eigen::Index>(spec.rank);
    const auto D = static_cast<Eigen::Index>(n_cfg);
    Eigen::MatrixXd T(R, D), P(R, D);
    for (Eigen::Index k = 0; k < R; ++k)
        for (Eigen::Index j = 0; j < D; ++j) {
            const auto& c = configs[static_cast<std::size_t>(j)];
            T(k, j) = detail::archetype_time(arche[static_cast<std::size_t>(k)], spec.system, c);
            P(k, j) = detail::archetype_power(arche[static_cast<std::size_t>(k)], spec.system, c);
        }

    const auto N = static_cast<Eigen::Index>(spec.n_apps);
    Eigen::MatrixXd Wt(N, R), Wp(N, R);
    std::exponential_distribution<double> expo(1.0);
    for (Eigen::Index i = 0; i < N; ++i) {
        Eigen::VectorXd u(R);
        for (Eigen::Index k = 0; k < R; ++k) u(k) = expo(rng);
        u /= u.sum();
        const double ts = detail::log_uniform(rng, sh.time_scale);
        const double ps = detail::uniform(rng, sh.power_scale);
        Wt.row(i) = ts * u.transpose();
        Wp.row(i) = ps * u.transpose();
    }

    SyntheticSystem out;
    out.true_time = Wt * T;
    out.true_power = Wp * P;
    if (spec.two_socket_anomaly_app >= 1 && spec.two_socket_anomaly_app <= spec.n_apps) {
        const auto i = static_cast<Eigen::Index>(spec.two_socket_anomaly_app - 1);
        for (Eigen::Index j = 0; j < D; ++j) {
            const auto& c = configs[static_cast<std::size_t>(j)];
            const auto& ps = spec.system.platforms[c.platform];
            const int half = ps.total_cores / 2;
            if (ps.kind == PlatformKind::CPU && half > 0 && c.cores > half)
                out.true_time(i, j) *= 1.0 + 0.8 * (c.cores - half) / static_cast<double>(half);
        }
    }

    Grid time = out.true_time, power = out.true_power;
    if (spec.noise_sd > 0.0) {
        std::normal_distribution<double> gauss(0.0, spec.noise_sd);
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = 0; j < D; ++j) {
                time(i, j) *= std::exp(gauss(rng));
                power(i, j) *= std::exp(gauss(rng));
            }
    }
    out.data.system = spec.system;
    out.data.matrix = make_training_matrix(synthetic_applications(spec.n_apps), configs, power, time);
    out.data.matrix.power_sd = out.true_power * spec.noise_sd;
    out.data.matrix.time_sd = out.true_time * spec.noise_sd;
    return out;
}

// ---------------------------------------------------------------------------
// Brute force and baselines
// ---------------------------------------------------------------------------

struct BestConfig {
    std::size_t column = 0;
    double energy = 0.0;  // mJ
};

inline double measured_energy(const TrainingMatrix& m, std::size_t row, std::size_t col, const System& system) {
    const auto i = static_cast<Eigen::Index>(row);
    const auto j = static_cast<Eigen::Index>(col);
    return cell_energy(system, m.configs[col], m.power(i, j), m.time(i, j), m.static_included);
}

/// Exhaustive minimum of whole-system energy over the application's row.
inline BestConfig brute_force_best(const TrainingMatrix& m, int app_id, const System& system) {
    const auto row = m.row_of(app_id);
    if (!row) throw InvalidArgument("brute_force_best: unknown app " + std::to_string(app_id));
    if (!m.mask.row(static_cast<Eigen::Index>(*row)).all())
        throw InvalidArgument("brute_force_best: row of app " + std::to_string(app_id) + " has missing cells");
    Eigen::VectorXd e(static_cast<Eigen::Index>(m.n_configs()));
    for (std::size_t j = 0; j < m.n_configs(); ++j) e(static_cast<Eigen::Index>(j)) = measured_energy(m, *row, j, system);
    const auto best = argmin_energy(e);
    return {best, e(static_cast<Eigen::Index>(best))};
}

inline std::vector<std::size_t> platform_columns(const TrainingMatrix& m, std::size_t platform) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < m.n_configs(); ++j)
        if (m.configs[j].platform == platform) cols.push_back(j);
    return cols;
}

/// Estimator parameters of the single-platform baseline on `platform`:
/// three predictors on CPUs, the workgroup size alone on GPUs.
inline EstimatorParams baseline_params(const System& system, std::size_t platform, EstimatorParams base = {}) {
    if (system.platforms.at(platform).kind == PlatformKind::GPU) {
        base.predictors = PredictorSet::Workgroup;
        base.min_samples = static_cast<std::size_t>(feature_count(PredictorSet::Workgroup));
    } else {
        base.predictors = PredictorSet::Unified;
    }
    return base;
}

/// Runs the estimator on one platform's columns only. Energies are still
/// whole-system (the idle platforms' static energy is charged).
inline PredictionResult leo_baseline(const TrainingMatrix& m, int app_id, std::size_t platform,
                                     std::size_t n_samples, std::uint64_t seed, const System& system,
                                     const EstimatorParams& base = {}) {
    if (platform >= system.platforms.size())
        throw InvalidArgument("leo_baseline: unknown platform #" + std::to_string(platform));
    const auto cols = platform_columns(m, platform);
    if (cols.empty()) throw InvalidArgument("leo_baseline: platform has no configurations in the matrix");
    const auto sub = m.select_columns(cols);
    auto plan = select_samples(cols.size(), n_samples, seed);
    plan.target_app = app_id;
    auto r = reoh_pipeline(sub, app_id, plan, baseline_params(system, platform, base), system);
    r.columns = cols;
    return r;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum class Approach { REOH, LeoCpu, LeoGpu, BruteForce };

inline std::string_view to_string(Approach a) {
    switch (a) {
    case Approach::REOH: return "REOH";
    case Approach::LeoCpu: return "LEO-CPU";
    case Approach::LeoGpu: return "LEO-GPU";
    case Approach::BruteForce: return "BruteForce";
    }
    return "?";
}

inline Approach parse_approach(std::string_view s) {
    for (auto a : {Approach::REOH, Approach::LeoCpu, Approach::LeoGpu, Approach::BruteForce})
        if (to_string(a) == s) return a;
    throw InvalidArgument("unknown approach '" + std::string(s) + "'");
}

struct EvaluationOptions {
    std::vector<Approach> approaches{Approach::REOH, Approach::LeoCpu, Approach::LeoGpu, Approach::BruteForce};
    int trials = 1;
    std::uint64_t seed = 1;
    std::size_t reoh_samples = 15;
    std::size_t leo_cpu_samples = 15;
    std::size_t leo_gpu_samples = 3;
    EstimatorParams params;
    /// Restrict to these applications (empty = all).
    std::vector<int> apps;
};

struct EvaluationRecord {
    int trial = 0;
    int app_id = 0;
    Approach approach = Approach::REOH;
    std::size_t column = 0;
    double energy = 0.0;      ///< measured whole-system energy of the chosen configuration, mJ
    double optimum = 0.0;     ///< brute-force energy, mJ
    double gap_percent = 0.0;
    std::size_t samples = 0;

    auto key() const { return std::tuple(trial, app_id, static_cast<int>(approach)); }
};

struct ApproachSummary {
    std::size_t count = 0;
    double mean_gap = 0.0;
    double median_gap = 0.0;
    double p90_gap = 0.0;
    double max_gap = 0.0;
    double within_10_percent = 0.0;  ///< fraction of (app, trial) pairs
    std::size_t samples_per_run = 0;
};

/// Linear-interpolation percentile of `values` (q in [0, 1]).
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

struct EvaluationReport {
    std::vector<EvaluationRecord> records;  ///< sorted by (trial, app, approach)
    std::size_t cpu_samples = 15;
    std::size_t gpu_samples = 3;

    /// Share of sampling runs avoided by not sampling the GPU separately.
    double sample_saving() const {
        return static_cast<double>(gpu_samples) / static_cast<double>(cpu_samples + gpu_samples);
    }

    void merge(const EvaluationReport& other) {
        records.insert(records.end(), other.records.begin(), other.records.end());
        std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    }

    std::vector<Approach> approaches() const {
        std::vector<Approach> out;
        for (const auto& r : records)
            if (std::find(out.begin(), out.end(), r.approach) == out.end()) out.push_back(r.approach);
        std::sort(out.begin(), out.end());
        return out;
    }

    ApproachSummary summary(Approach a) const {
        std::vector<double> gaps;
        ApproachSummary s;
        for (const auto& r : records) {
            if (r.approach != a) continue;
            gaps.push_back(r.gap_percent);
            s.samples_per_run = r.samples;
        }
        s.count = gaps.size();
        if (gaps.empty()) return s;
        double sum = 0.0;
        std::size_t within = 0;
        for (double g : gaps) {
            sum += g;
            if (g <= 10.0) ++within;
        }
        s.mean_gap = sum / static_cast<double>(gaps.size());
        s.median_gap = percentile(gaps, 0.5);
        s.p90_gap = percentile(gaps, 0.9);
        s.max_gap = *std::max_element(gaps.begin(), gaps.end());
        s.within_10_percent = static_cast<double>(within) / static_cast<double>(gaps.size());
        return s;
    }
};

/// Deterministic per-(trial, app, approach) seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    std::uint64_t x = seed;
    for (std::uint64_t v : {a, b, c}) {
        x += 0x9e3779b97f4a7c15ULL + v;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        x ^= x >> 31;
    }
    return x;
}

/// Leave-one-application-out comparison of every approach against the
/// brute-force optimum. Approaches only ever see `data.matrix`; chosen
/// configurations are scored on `scoring` (same shape), which defaults to
/// the measured matrix itself. Synthetic runs pass the noiseless truth here.
inline EvaluationReport evaluate(const TrainingData& data, const EvaluationOptions& options,
                                 const TrainingMatrix* scoring = nullptr) {
    const auto& m = data.matrix;
    const auto& sys = data.system;
    const auto& score = scoring ? *scoring : m;
    if (!m.fully_observed()) throw InvalidArgument("evaluate: matrix must be fully observed");
    if (!score.fully_observed() || score.n_apps() != m.n_apps() || score.n_configs() != m.n_configs())
        throw InvalidArgument("evaluate: scoring matrix must be fully observed and match the measured matrix");
    if (options.trials < 1) throw InvalidArgument("evaluate: trials must be >= 1");

    std::optional<std::size_t> cpu, gpu;
    for (std::size_t p = 0; p < sys.platforms.size(); ++p) {
        if (!cpu && sys.platforms[p].kind == PlatformKind::CPU) cpu = p;
        if (!gpu && sys.platforms[p].kind == PlatformKind::GPU) gpu = p;
    }

    EvaluationReport report;
    report.cpu_samples = options.leo_cpu_samples;
    report.gpu_samples = options.leo_gpu_samples;
    std::vector<int> apps = options.apps;
    if (apps.empty())
        for (const auto& a : m.apps) apps.push_back(a.app_id);

    for (int t = 0; t < options.trials; ++t) {
        for (int app : apps) {
            const auto row = m.row_of(app);
            if (!row) throw InvalidArgument("evaluate: unknown app " + std::to_string(app));
            const auto best = brute_force_best(score, app, sys);
            for (auto approach : options.approaches) {
                EvaluationRecord rec;
                rec.trial = t;
                rec.app_id = app;
                rec.approach = approach;
                rec.optimum = best.energy;
                const auto s = mix_seed(options.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(app),
                                        static_cast<std::uint64_t>(approach));
                switch (approach) {
                case Approach::BruteForce:
                    rec.column = best.column;
                    rec.samples = m.n_configs();
                    break;
                case Approach::REOH: {
                    auto plan = select_samples(m.n_configs(), options.reoh_samples, s);
                    plan.target_app = app;
                    rec.column = reoh_pipeline(m, app, plan, options.params, sys).chosen_column();
                    rec.samples = options.reoh_samples;
                    break;
                }
                case Approach::LeoCpu:
                case Approach::LeoGpu: {
                    const bool is_cpu = approach == Approach::LeoCpu;
                    const auto plat = is_cpu ? cpu : gpu;
                    if (!plat) throw InvalidArgument("evaluate: system has no platform for " +
                                                     std::string(to_string(approach)));
                    const auto n = is_cpu ? options.leo_cpu_samples : options.leo_gpu_samples;
                    rec.column = leo_baseline(m, app, *plat, n, s, sys, options.params).chosen_column();
                    rec.samples = n;
                    break;
                }
                }
                rec.energy = measured_energy(score, *row, rec.column, sys);
                rec.gap_percent = (rec.energy - rec.optimum) / rec.optimum * 100.0;
                report.records.push_back(rec);
            }
        }
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return report;
}

/// Synthetic evaluation: approaches see the noisy matrix, scoring uses the truth.
inline EvaluationReport evaluate(const SyntheticSystem& synth, const EvaluationOptions& options) {
    const auto truth = synth.truth();
    return evaluate(synth.data, options, &truth);
}

inline void write_report_csv(std::ostream& os, const EvaluationReport& report, const TrainingMatrix& m,
                             const System& system) {
    os << "trial,app_id,approach,config_id,energy_mj,optimum_mj,gap_percent,samples\n";
    for (const auto& r : report.records)
        os << r.trial << ',' << r.app_id << ',' << to_string(r.approach) << ','
           << config_id(m.configs.at(r.column), system) << ',' << io::format_double(r.energy) << ','
           << io::format_double(r.optimum) << ',' << io::format_double(r.gap_percent) << ',' << r.samples << '\n';
}

/// Per-application means over trials: `app_id,approach,<value>` where value is
/// the chosen energy (mJ) or the gap to brute force (%).
inline void write_app_table(std::ostream& os, const EvaluationReport& report, bool gap) {
    os << "app_id,approach," << (gap ? "gap_percent" : "energy_mj") << '\n';
    std::map<std::pair<int, Approach>, std::pair<double, int>> acc;
    for (const auto& r : report.records) {
        auto& a = acc[{r.app_id, r.approach}];
        a.first += gap ? r.gap_percent : r.energy;
        a.second += 1;
    }
    for (const auto& [key, v] : acc)
        os << key.first << ',' << to_string(key.second) << ',' << io::format_double(v.first / v.second) << '\n';
}

inline void print_summary(std::ostream& os, const EvaluationReport& report) {
    os << std::left << std::setw(12) << "approach" << std::right << std::setw(8) << "runs" << std::setw(9)
       << "samples" << std::setw(11) << "mean gap%" << std::setw(11) << "median%" << std::setw(9) << "p90%"
       << std::setw(9) << "max%" << std::setw(12) << "within 10%" << '\n';
    const auto flags = os.flags();
    const auto precision = os.precision();
    os << std::fixed << std::setprecision(2);
    for (auto a : report.approaches()) {
        const auto s = report.summary(a);
        os << std::left << std::setw(12) << to_string(a) << std::right << std::setw(8) << s.count << std::setw(9)
           << s.samples_per_run << std::setw(11) << s.mean_gap << std::setw(11) << s.median_gap << std::setw(9)
           << s.p90_gap << std::setw(9) << s.max_gap << std::setw(11) << s.within_10_percent * 100.0 << "%\n";
    }
    const double saving = report.sample_saving() * 100.0;
    os << "sample saving vs. separate CPU+GPU sampling: " << report.gpu_samples << "/("
       << report.cpu_samples << "+" << report.gpu_samples << ") = " << saving << "% (~"
       << std::setprecision(0) << saving << "%)\n";
    os.flags(flags);
    os.precision(precision);
}

} // namespace reoh
