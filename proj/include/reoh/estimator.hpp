#pragma once

// Prediction of power and time on every configuration of a target
// application from a few sampled runs plus a training matrix, and selection
// of the configuration with the least whole-system energy.

#include "reoh/dataset.hpp"
#include "reoh/em.hpp"
#include "reoh/energy.hpp"
#include "reoh/error.hpp"
#include "reoh/platform.hpp"
#include "reoh/regression.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace reoh {

struct EstimatorParams {
    int latent_dim = 5;
    bool auto_latent_dim = false;  ///< pick K by held-out likelihood on the training view
    std::vector<int> latent_candidates{1, 2, 3, 4, 5, 6, 7, 8};
    int max_iters = 500;
    double tol = 1e-6;
    std::size_t min_samples = 10;
    double ridge = 1e-6;
    double sigma2_floor = 1e-10;
    bool standardize = true;
    bool log_time = true;  ///< complete time in the log domain
    PredictorSet predictors = PredictorSet::Unified;
    UnifyOptions unify;

    void validate() const {
        if (latent_dim < 1) throw InvalidArgument("latent_dim must be >= 1");
        if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
        if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
        if (ridge < 0.0) throw InvalidArgument("ridge must be non-negative");
        if (min_samples < static_cast<std::size_t>(feature_count(predictors)))
            throw InvalidArgument("min_samples (" + std::to_string(min_samples) + ") is below the " +
                                  std::to_string(feature_count(predictors)) + " regression features");
    }

    EmOptions em_options(int k) const {
        EmOptions o;
        o.latent_dim = k;
        o.max_iters = max_iters;
        o.tol = tol;
        o.sigma2_floor = sigma2_floor;
        o.standardize = standardize;
        return o;
    }
};

enum class Provenance { Sampled, Predicted };

struct FitDiagnostics {
    int latent_dim = 0;
    int iterations = 0;
    bool converged = false;
    bool variance_floored = false;
};

struct PredictionResult {
    std::vector<NativeConfig> configs;
    std::vector<std::size_t> columns;  ///< column of each entry in the originating matrix
    Eigen::VectorXd power;             ///< W
    Eigen::VectorXd time;              ///< s
    Eigen::VectorXd energy;            ///< whole-system mJ
    std::vector<Provenance> provenance;
    std::vector<bool> clamped;  ///< prediction was out of range and clamped
    std::size_t chosen = 0;
    FitDiagnostics power_fit;
    FitDiagnostics time_fit;

    const NativeConfig& chosen_config() const { return configs.at(chosen); }
    std::size_t chosen_column() const { return columns.at(chosen); }
};

/// Index of the smallest value; ties go to the lowest index.
inline std::size_t argmin_energy(const Eigen::VectorXd& energy) {
    if (energy.size() == 0) throw InvalidArgument("argmin over an empty set");
    std::size_t best = 0;
    for (Eigen::Index j = 1; j < energy.size(); ++j)
        if (energy(j) < energy(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(j);
    return best;
}

/// Whole-system energy of one (power, time) cell. When `static_included`
/// the power already carries every platform's static draw.
inline double cell_energy(const System& system, const NativeConfig& cfg, double power_w, double time_s,
                          bool static_included) {
    if (static_included) return power_w * time_s * kMillijoulesPerJoule;
    return total_energy_of(system, cfg.platform, power_w, time_s);
}

struct EnergyOptions {
    bool static_included = false;
    /// Replacement for non-positive predicted times.
    double time_floor = 1e-6;
};

inline PredictionResult predict_energy(const Eigen::VectorXd& power, const Eigen::VectorXd& time,
                                       const System& system, const std::vector<NativeConfig>& configs,
                                       const EnergyOptions& options = {}) {
    const auto D = static_cast<Eigen::Index>(configs.size());
    if (power.size() != D || time.size() != D) throw InvalidArgument("predict_energy: dimension mismatch");
    if (!(options.time_floor > 0.0)) throw InvalidArgument("predict_energy: time floor must be positive");
    PredictionResult r;
    r.configs = configs;
    r.columns.resize(configs.size());
    std::iota(r.columns.begin(), r.columns.end(), std::size_t{0});
    r.power = power;
    r.time = time;
    r.energy.resize(D);
    r.clamped.assign(configs.size(), false);
    r.provenance.assign(configs.size(), Provenance::Predicted);
    for (Eigen::Index j = 0; j < D; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (!std::isfinite(r.time(j)) || !std::isfinite(r.power(j)))
            throw EstimatorError("predict_energy: non-finite prediction for configuration " + std::to_string(j));
        if (!(r.time(j) > 0.0)) {
            r.time(j) = options.time_floor;
            r.clamped[uj] = true;
        }
        if (r.power(j) < 0.0) {
            r.power(j) = 0.0;
            r.clamped[uj] = true;
        }
        r.energy(j) = cell_energy(system, configs[uj], r.power(j), r.time(j), options.static_included);
    }
    r.chosen = argmin_energy(r.energy);
    return r;
}

inline Eigen::MatrixXd design_matrix(const std::vector<NativeConfig>& configs, const System& system,
                                     const EstimatorParams& params) {
    if (params.predictors == PredictorSet::Unified) return design_matrix(unify_all(configs, system, params.unify),
                                                                         PredictorSet::Unified);
    std::vector<UnifiedConfig> raw;
    raw.reserve(configs.size());
    for (const auto& c : configs) raw.push_back(UnifiedConfig{0.0, 0, 0.0, c});
    return design_matrix(raw, PredictorSet::Workgroup);
}

namespace detail {

inline FitDiagnostics diagnostics(const FactorFit& f) {
    return {f.latent_dim, f.iterations, f.converged, f.variance_floored};
}

inline Eigen::VectorXd complete_row(const Grid& training, const Eigen::VectorXd& partial, const MaskVector& observed,
                                    const Eigen::MatrixXd& X, const EstimatorParams& params, std::uint64_t k_seed,
                                    FitDiagnostics& diag) {
    RegressionOptions ro;
    ro.min_samples = params.min_samples;
    ro.ridge = params.ridge;
    const Eigen::VectorXd initial = init_regression(X, partial, observed, ro);
    int k = params.latent_dim;
    if (params.auto_latent_dim) k = select_latent_dim(training, params.latent_candidates, 0.1, k_seed,
                                                      params.em_options(params.latent_dim));
    const auto em = em_fit(training, initial, observed, params.em_options(k));
    diag = diagnostics(em.fit);
    return em.completed;
}

} // namespace detail

/// Completes the target's power and time rows and scores every configuration.
inline PredictionResult predict_row(const TrainingMatrix& training, const PartialRow& target, const System& system,
                                    const EstimatorParams& params) {
    params.validate();
    const auto D = static_cast<Eigen::Index>(training.n_configs());
    if (target.power.size() != D || target.time.size() != D || target.observed.size() != D)
        throw InvalidArgument("predict_row: target row does not match the training configurations");
    if (training.n_apps() == 0) throw EstimatorError("training view is empty");
    for (Eigen::Index j = 0; j < D; ++j) {
        if (!target.observed(j)) continue;
        if (!(target.time(j) > 0.0) || !(target.power(j) >= 0.0))
            throw InvalidArgument("predict_row: sampled measurements must have positive time and non-negative power");
    }

    const Eigen::MatrixXd X = design_matrix(training.configs, system, params);
    PredictionResult r;
    FitDiagnostics pdiag, tdiag;

    const Eigen::VectorXd power =
        detail::complete_row(training.power, target.power, target.observed, X, params, 0x9e3779b97f4a7c15ULL, pdiag);

    Eigen::VectorXd time;
    if (params.log_time) {
        const Grid log_training = training.time.array().log().matrix();
        const Eigen::VectorXd log_partial = target.time.array().log().matrix();
        time = detail::complete_row(log_training, log_partial, target.observed, X, params, 0xbf58476d1ce4e5b9ULL, tdiag)
                   .array()
                   .exp()
                   .matrix();
        for (Eigen::Index j = 0; j < D; ++j)
            if (target.observed(j)) time(j) = target.time(j);
    } else {
        time = detail::complete_row(training.time, target.time, target.observed, X, params, 0xbf58476d1ce4e5b9ULL,
                                    tdiag);
    }

    double min_time = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < training.time.rows(); ++i)
        for (Eigen::Index j = 0; j < D; ++j)
            if (training.mask(i, j)) min_time = std::min(min_time, training.time(i, j));
    for (Eigen::Index j = 0; j < D; ++j)
        if (target.observed(j)) min_time = std::min(min_time, target.time(j));
    EnergyOptions eo;
    eo.static_included = training.static_included;
    eo.time_floor = std::isfinite(min_time) ? min_time * 1e-3 : 1e-6;

    r = predict_energy(power, time, system, training.configs, eo);
    for (Eigen::Index j = 0; j < D; ++j)
        if (target.observed(j)) r.provenance[static_cast<std::size_t>(j)] = Provenance::Sampled;
    r.power_fit = pdiag;
    r.time_fit = tdiag;
    return r;
}

/// Leave the target out of the matrix, sample it on `plan`, predict, select.
inline PredictionResult reoh_pipeline(const TrainingMatrix& matrix, int app_id, const SamplePlan& plan,
                                      const EstimatorParams& params, const System& system) {
    const auto masked = mask_application(matrix, app_id, plan);
    return predict_row(masked.training, masked.target, system, params);
}

} // namespace reoh
