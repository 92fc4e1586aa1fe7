#pragma once

// Full-quadratic least-squares regression used to fill a sparsely sampled
// row before the EM refinement.

#include "reoh/dataset.hpp"
#include "reoh/error.hpp"
#include "reoh/platform.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace reoh {

/// Which configuration coordinates enter the regression.
enum class PredictorSet {
    Unified,    ///< (equiv cores, frequency index, equiv memory controllers)
    Workgroup,  ///< single parallelism knob (GPU workgroup size)
};

/// Columns of the full-quadratic design: (p + 1)(p + 2) / 2 for p predictors.
inline int feature_count(PredictorSet set) { return set == PredictorSet::Unified ? 10 : 3; }

/// [1, c, f, m, c*f, c*m, f*m, c^2, f^2, m^2]
inline Eigen::VectorXd quadratic_features(double c, double f, double m) {
    Eigen::VectorXd x(10);
    x << 1.0, c, f, m, c * f, c * m, f * m, c * c, f * f, m * m;
    return x;
}

inline Eigen::VectorXd quadratic_features(const UnifiedConfig& u) {
    return quadratic_features(u.equiv_cores, static_cast<double>(u.freq_index), u.equiv_mem);
}

/// [1, w, w^2]
inline Eigen::VectorXd quadratic_features(double w) {
    Eigen::VectorXd x(3);
    x << 1.0, w, w * w;
    return x;
}

/// One feature row per configuration.
inline Eigen::MatrixXd design_matrix(const std::vector<UnifiedConfig>& configs, PredictorSet set) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(configs.size()), feature_count(set));
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& u = configs[i];
        const auto r = static_cast<Eigen::Index>(i);
        if (set == PredictorSet::Unified) {
            X.row(r) = quadratic_features(u).transpose();
        } else {
            const double w = u.origin.workgroup_size > 0 ? u.origin.workgroup_size : u.origin.cores;
            X.row(r) = quadratic_features(w).transpose();
        }
    }
    return X;
}

struct RegressionOptions {
    std::size_t min_samples = 10;
    /// Penalty on the standardized non-intercept coefficients, per sample.
    /// Zero requests plain least squares, which fails on a rank-deficient design.
    double ridge = 1e-6;
};

/// Fits `values` at the observed rows of `X` and evaluates the fit at every
/// row. Observed entries keep their measured values.
inline Eigen::VectorXd init_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& values,
                                       const MaskVector& observed, const RegressionOptions& options) {
    if (X.rows() != values.size() || observed.size() != values.size())
        throw InvalidArgument("init_regression: dimension mismatch");
    if (options.ridge < 0.0) throw InvalidArgument("init_regression: ridge must be non-negative");
    const auto p = X.cols();
    if (options.min_samples < static_cast<std::size_t>(p))
        throw InvalidArgument("init_regression: min_samples below the number of regression features");
    const auto n = static_cast<Eigen::Index>(observed.count());
    if (static_cast<std::size_t>(n) < options.min_samples)
        throw EstimatorError("insufficient samples: " + std::to_string(n) + " observed, at least " +
                             std::to_string(options.min_samples) + " required");

    Eigen::MatrixXd Xs(n, p);
    Eigen::VectorXd ys(n);
    for (Eigen::Index i = 0, k = 0; i < X.rows(); ++i) {
        if (!observed(i)) continue;
        Xs.row(k) = X.row(i);
        ys(k) = values(i);
        ++k;
    }

    // Standardize the non-constant columns on the sampled rows.
    Eigen::VectorXd center = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
    std::vector<bool> dropped(static_cast<std::size_t>(p), false);
    for (Eigen::Index c = 1; c < p; ++c) {
        const double mean = Xs.col(c).mean();
        const double sd = std::sqrt((Xs.col(c).array() - mean).square().mean());
        center(c) = mean;
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) dropped[static_cast<std::size_t>(c)] = true;
        else scale(c) = sd;
    }
    auto transform = [&](const Eigen::MatrixXd& M) {
        Eigen::MatrixXd Z = M;
        for (Eigen::Index c = 1; c < p; ++c) {
            if (dropped[static_cast<std::size_t>(c)]) Z.col(c).setZero();
            else Z.col(c) = (M.col(c).array() - center(c)) / scale(c);
        }
        return Z;
    };
    const Eigen::MatrixXd Zs = transform(Xs);

    Eigen::VectorXd beta;
    if (options.ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Zs);
        qr.setThreshold(1e-10);
        if (qr.rank() < p) throw EstimatorError("rank-deficient design matrix (rank " + std::to_string(qr.rank()) +
                                                " < " + std::to_string(p) + " features)");
        beta = qr.solve(ys);
    } else {
        Eigen::MatrixXd normal = Zs.transpose() * Zs;
        for (Eigen::Index c = 1; c < p; ++c) normal(c, c) += options.ridge * static_cast<double>(n);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw EstimatorError("rank-deficient design matrix below ridge floor");
        beta = ldlt.solve(Zs.transpose() * ys);
    }

    Eigen::VectorXd out = transform(X) * beta;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (observed(i)) out(i) = values(i);
    return out;
}

} // namespace reoh
