#pragma once

// Latent-factor Gaussian model y_i = W z_i + mu + eps, z_i ~ N(0, I_K),
// eps ~ N(0, sigma^2 I), fitted by expectation-maximization on the observed
// cells of a partially observed applications x configurations matrix.
// Missing cells are marginalized out, so each EM step is guaranteed not to
// decrease the observed-data log-likelihood.

#include "reoh/dataset.hpp"
#include "reoh/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <vector>

namespace reoh {

struct EmOptions {
    int latent_dim = 5;
    int max_iters = 500;
    double tol = 1e-6;           ///< relative log-likelihood change
    double sigma2_floor = 1e-10; ///< in standardized units
    bool standardize = true;     ///< z-score columns with training statistics
};

struct EmState {
    Eigen::MatrixXd loadings;  ///< D x K
    Eigen::VectorXd mean;      ///< D
    Eigen::MatrixXd latent;    ///< N x K posterior means of z_i
    double noise_var = 1.0;
};

struct FactorFit {
    EmState state;
    std::vector<double> log_likelihood;  ///< one entry per E-step, final parameters last
    int iterations = 0;
    bool converged = false;
    bool variance_floored = false;
    int latent_dim = 0;  ///< effective K after clamping to the data size
};

namespace detail {

struct RowPattern {
    std::vector<Eigen::Index> observed;
    std::vector<Eigen::Index> missing;
};

/// Rows grouped by identical observation pattern share one K x K factorization.
struct PatternGroups {
    std::vector<RowPattern> patterns;
    std::vector<std::size_t> of_row;
};

inline PatternGroups group_rows(const Mask& mask) {
    PatternGroups g;
    std::map<std::vector<Eigen::Index>, std::size_t> seen;
    g.of_row.resize(static_cast<std::size_t>(mask.rows()));
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        RowPattern p;
        for (Eigen::Index j = 0; j < mask.cols(); ++j) (mask(i, j) ? p.observed : p.missing).push_back(j);
        auto [it, inserted] = seen.try_emplace(p.missing, g.patterns.size());
        if (inserted) g.patterns.push_back(std::move(p));
        g.of_row[static_cast<std::size_t>(i)] = it->second;
    }
    return g;
}

inline PatternGroups group_columns(const Mask& mask) {
    Mask t = mask.transpose();
    return group_rows(t);
}

/// W_O^T W_O for one observation pattern.
inline Eigen::MatrixXd gram(const Eigen::MatrixXd& W, const Eigen::MatrixXd& full_gram, const RowPattern& p) {
    if (p.missing.size() < p.observed.size()) {
        Eigen::MatrixXd G = full_gram;
        for (auto j : p.missing) G.noalias() -= W.row(j).transpose() * W.row(j);
        return G;
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(W.cols(), W.cols());
    for (auto j : p.observed) G.noalias() += W.row(j).transpose() * W.row(j);
    return G;
}

struct EStep {
    Eigen::MatrixXd means;                 ///< N x K
    std::vector<Eigen::MatrixXd> covs;     ///< per row pattern, K x K
    std::vector<Eigen::MatrixXd> grams;    ///< per row pattern, W_O^T W_O
    double log_likelihood = 0.0;
};

/// Posterior moments of every z_i and the observed-data log-likelihood.
inline EStep e_step(const Eigen::MatrixXd& Y0, const Mask& mask, const PatternGroups& rows, const EmState& s) {
    const auto N = Y0.rows();
    const auto K = s.loadings.cols();
    const double sigma2 = s.noise_var;
    const Eigen::MatrixXd full_gram = s.loadings.transpose() * s.loadings;

    EStep out;
    out.means.resize(N, K);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
    std::vector<double> logdets;
    for (const auto& p : rows.patterns) {
        Eigen::MatrixXd G = gram(s.loadings, full_gram, p);
        Eigen::MatrixXd P = G;
        P.diagonal().array() += sigma2;
        Eigen::LLT<Eigen::MatrixXd> llt(P);
        if (llt.info() != Eigen::Success) throw EstimatorError("EM: posterior precision not positive definite");
        double logdet = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
        out.covs.push_back(sigma2 * llt.solve(Eigen::MatrixXd::Identity(K, K)));
        out.grams.push_back(std::move(G));
        logdets.push_back(logdet);
        factors.push_back(std::move(llt));
    }

    // Centered data with missing cells zeroed.
    Eigen::MatrixXd R = Y0.rowwise() - s.mean.transpose();
    R = mask.select(R, 0.0);
    const Eigen::MatrixXd WtR = R * s.loadings;  // N x K, row i = W_O^T r_i

    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto pat = rows.of_row[static_cast<std::size_t>(i)];
        const Eigen::VectorXd m = factors[pat].solve(WtR.row(i).transpose());
        out.means.row(i) = m.transpose();
        const auto n_obs = static_cast<double>(rows.patterns[pat].observed.size());
        if (n_obs == 0) continue;
        // r^T C^-1 r = |r - W_O m|^2 / sigma^2 + m^T m
        double resid2 = 0.0;
        for (auto j : rows.patterns[pat].observed) {
            const double e = R(i, j) - s.loadings.row(j).dot(m);
            resid2 += e * e;
        }
        const double quad = resid2 / sigma2 + m.squaredNorm();
        const double logdet_c = (n_obs - static_cast<double>(K)) * std::log(sigma2) + logdets[pat];
        out.log_likelihood += -0.5 * (n_obs * log2pi + logdet_c + quad);
    }
    return out;
}

} // namespace detail

/// Observed-data log-likelihood of `state` on the observed cells of Y.
inline double observed_log_likelihood(const Eigen::MatrixXd& Y, const Mask& mask, const EmState& state) {
    const auto rows = detail::group_rows(mask);
    return detail::e_step(mask.select(Y, 0.0), mask, rows, state).log_likelihood;
}

/// Closed-form probabilistic PCA of a dense matrix with K factors.
inline EmState ppca_init(const Eigen::MatrixXd& dense, Eigen::Index K, double floor) {
    const auto N = dense.rows();
    const auto D = dense.cols();
    if (K < 1 || K >= std::min(N, D) + 1) throw InvalidArgument("ppca_init: latent dimension out of range");
    EmState s;
    s.mean = dense.colwise().mean().transpose();
    const Eigen::MatrixXd Xc = dense.rowwise() - s.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Xc, Eigen::ComputeThinV);
    Eigen::VectorXd eig = Eigen::VectorXd::Zero(std::max<Eigen::Index>(K, D));
    eig.head(svd.singularValues().size()) = svd.singularValues().array().square() / static_cast<double>(N);
    const double total = eig.sum();
    const double top = eig.head(K).sum();
    double sigma2 = D > K ? (total - top) / static_cast<double>(D - K) : 0.0;
    sigma2 = std::max({sigma2, floor, 1e-6 * total / static_cast<double>(D)});
    s.noise_var = sigma2;
    s.loadings = Eigen::MatrixXd::Zero(D, K);
    const auto avail = std::min<Eigen::Index>(K, svd.matrixV().cols());
    for (Eigen::Index k = 0; k < avail; ++k) {
        const double scale = std::sqrt(std::max(eig(k) - sigma2, 1e-6 * std::max(eig(0), floor)));
        s.loadings.col(k) = svd.matrixV().col(k) * scale;
    }
    return s;
}

inline Eigen::Index effective_latent_dim(const EmOptions& options, Eigen::Index N, Eigen::Index D) {
    return std::min<Eigen::Index>({options.latent_dim, N - 1, D - 1});
}

inline void check_em_inputs(Eigen::Index N, Eigen::Index D, const EmOptions& options) {
    if (N < 2) throw EstimatorError("EM: need at least two rows");
    if (D < 2) throw EstimatorError("EM: need at least two configurations");
    if (options.latent_dim < 1) throw InvalidArgument("EM: latent_dim must be >= 1");
    if (options.max_iters < 1) throw InvalidArgument("EM: max_iters must be >= 1");
    if (!(options.tol > 0.0)) throw InvalidArgument("EM: tol must be positive");
    if (!(options.sigma2_floor > 0.0)) throw InvalidArgument("EM: sigma2_floor must be positive");
}

/// Runs EM on the observed cells of `Y` (N x D) from the starting parameters `start`.
inline FactorFit fit_factor_model(const Eigen::MatrixXd& Y, const Mask& mask, EmState start,
                                  const EmOptions& options) {
    const auto N = Y.rows();
    const auto D = Y.cols();
    check_em_inputs(N, D, options);
    if (start.loadings.rows() != D || start.mean.size() != D) throw InvalidArgument("EM: start has wrong shape");
    const auto K = start.loadings.cols();
    const double floor = options.sigma2_floor;

    FactorFit fit;
    fit.latent_dim = static_cast<int>(K);
    EmState s = std::move(start);
    s.noise_var = std::max(s.noise_var, floor);

    const auto rows = detail::group_rows(mask);
    const auto cols = detail::group_columns(mask);
    const Eigen::MatrixXd Y0 = mask.select(Y, 0.0);
    const double n_obs = static_cast<double>(mask.count());
    if (n_obs == 0) throw EstimatorError("EM: no observed cells");

    double prev = 0.0;
    for (int iter = 0; iter < options.max_iters; ++iter) {
        const auto e = detail::e_step(Y0, mask, rows, s);
        fit.log_likelihood.push_back(e.log_likelihood);
        if (iter > 0 && std::abs(e.log_likelihood - prev) <= options.tol * std::max(1.0, std::abs(prev))) {
            fit.converged = true;
            fit.iterations = iter;
            s.latent = e.means;
            break;
        }
        prev = e.log_likelihood;

        // Augmented second moments E[[z;1][z;1]^T] per row.
        std::vector<Eigen::MatrixXd> Q(static_cast<std::size_t>(N));
        Eigen::MatrixXd Zhat(N, K + 1);
        for (Eigen::Index i = 0; i < N; ++i) {
            const auto pat = rows.of_row[static_cast<std::size_t>(i)];
            const Eigen::VectorXd m = e.means.row(i).transpose();
            auto& q = Q[static_cast<std::size_t>(i)];
            q.resize(K + 1, K + 1);
            q.topLeftCorner(K, K) = e.covs[pat] + m * m.transpose();
            q.topRightCorner(K, 1) = m;
            q.bottomLeftCorner(1, K) = m.transpose();
            q(K, K) = 1.0;
            Zhat.row(i).head(K) = m.transpose();
            Zhat(i, K) = 1.0;
        }
        Eigen::MatrixXd Qall = Eigen::MatrixXd::Zero(K + 1, K + 1);
        for (const auto& q : Q) Qall += q;

        // Joint update of (w_j, mu_j) for every column.
        const Eigen::MatrixXd B = Y0.transpose() * Zhat;  // D x (K+1)
        Eigen::MatrixXd theta(D, K + 1);
        std::vector<Eigen::LDLT<Eigen::MatrixXd>> col_factors;
        for (const auto& p : cols.patterns) {
            Eigen::MatrixXd G = Qall;
            for (auto i : p.missing) G -= Q[static_cast<std::size_t>(i)];
            col_factors.emplace_back(G);
        }
        for (Eigen::Index j = 0; j < D; ++j) {
            const auto pat = cols.of_row[static_cast<std::size_t>(j)];
            if (cols.patterns[pat].observed.empty()) {
                theta.row(j) << s.loadings.row(j), s.mean(j);
                continue;
            }
            theta.row(j) = col_factors[pat].solve(B.row(j).transpose()).transpose();
        }
        EmState next;
        next.loadings = theta.leftCols(K);
        next.mean = theta.col(K);

        // Noise variance from the expected squared residuals under the new parameters.
        const Eigen::MatrixXd full_gram = next.loadings.transpose() * next.loadings;
        double sse = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            const auto pat = rows.of_row[static_cast<std::size_t>(i)];
            for (auto j : rows.patterns[pat].observed) {
                const double r = Y0(i, j) - next.loadings.row(j).dot(e.means.row(i)) - next.mean(j);
                sse += r * r;
            }
        }
        for (std::size_t pat = 0; pat < rows.patterns.size(); ++pat) {
            const Eigen::MatrixXd G = detail::gram(next.loadings, full_gram, rows.patterns[pat]);
            const double tr = (e.covs[pat].cwiseProduct(G)).sum();
            const auto count = std::count(rows.of_row.begin(), rows.of_row.end(), pat);
            sse += static_cast<double>(count) * tr;
        }
        next.noise_var = sse / n_obs;
        if (!(next.noise_var > floor)) {
            next.noise_var = floor;
            fit.variance_floored = true;
        }
        s = std::move(next);
        fit.iterations = iter + 1;
    }
    if (!fit.converged) {
        const auto e = detail::e_step(Y0, mask, rows, s);
        fit.log_likelihood.push_back(e.log_likelihood);
        s.latent = e.means;
    }
    fit.state = std::move(s);
    return fit;
}

/// Runs EM from the closed-form PPCA fit of `init`, a dense completion of Y.
inline FactorFit fit_factor_model(const Eigen::MatrixXd& Y, const Mask& mask, const Eigen::MatrixXd& init,
                                  const EmOptions& options) {
    check_em_inputs(Y.rows(), Y.cols(), options);
    const auto K = effective_latent_dim(options, Y.rows(), Y.cols());
    return fit_factor_model(Y, mask, ppca_init(init, K, options.sigma2_floor), options);
}

inline double final_log_likelihood(const FactorFit& f) {
    return f.log_likelihood.empty() ? -std::numeric_limits<double>::infinity() : f.log_likelihood.back();
}

struct EmResult {
    FactorFit fit;
    Eigen::VectorXd completed;  ///< target row, original units, sampled cells clamped
    Eigen::VectorXd column_center;
    Eigen::VectorXd column_scale;
};

/// Completes the target row. `training` holds the other applications
/// (NaN = unobserved); `initial_row` is a dense first guess for the target
/// whose `observed` cells are measurements.
inline EmResult em_fit(const Grid& training, const Eigen::VectorXd& initial_row, const MaskVector& observed,
                       const EmOptions& options) {
    const auto Nt = training.rows();
    const auto D = training.cols();
    if (initial_row.size() != D || observed.size() != D) throw InvalidArgument("em_fit: dimension mismatch");
    if (!initial_row.allFinite()) throw InvalidArgument("em_fit: initial row must be dense and finite");

    EmResult out;
    out.column_center = Eigen::VectorXd::Zero(D);
    out.column_scale = Eigen::VectorXd::Ones(D);
    const Mask train_mask = training.array().isNaN() == false;
    for (Eigen::Index j = 0; j < D; ++j) {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (Eigen::Index i = 0; i < Nt; ++i) {
            if (!train_mask(i, j)) continue;
            sum += training(i, j);
            ++n;
        }
        const double mean = n > 0 ? sum / n : initial_row(j);
        for (Eigen::Index i = 0; i < Nt; ++i)
            if (train_mask(i, j)) sum2 += (training(i, j) - mean) * (training(i, j) - mean);
        const double sd = n > 1 ? std::sqrt(sum2 / n) : 0.0;
        if (options.standardize) {
            out.column_center(j) = mean;
            if (sd > 1e-12 * std::max(1.0, std::abs(mean))) out.column_scale(j) = sd;
        }
    }
    auto standardize = [&](const Eigen::MatrixXd& M) {
        return ((M.rowwise() - out.column_center.transpose()).array().rowwise() /
                out.column_scale.transpose().array()).matrix();
    };

    Eigen::MatrixXd Y(Nt + 1, D);
    Y.topRows(Nt) = training;
    Y.row(Nt) = initial_row.transpose();
    Mask mask(Nt + 1, D);
    mask.topRows(Nt) = train_mask;
    mask.row(Nt) = observed.transpose();
    Y = standardize(Y);

    Eigen::MatrixXd init = Y;
    for (Eigen::Index i = 0; i < Nt; ++i)
        for (Eigen::Index j = 0; j < D; ++j)
            if (!train_mask(i, j)) init(i, j) = 0.0;  // column mean after standardization

    // Two starts: the regression-completed matrix, and the training rows
    // alone. A poor first guess for the target can otherwise pull a factor
    // away from the training subspace and leave EM in a slow, bad basin.
    const Eigen::MatrixXd Y0 = mask.select(Y, 0.0);
    check_em_inputs(Y.rows(), D, options);
    const auto K = effective_latent_dim(options, Y.rows(), D);
    out.fit = fit_factor_model(Y0, mask, ppca_init(init, K, options.sigma2_floor), options);
    if (Nt > K) {
        auto alt = fit_factor_model(Y0, mask, ppca_init(init.topRows(Nt), K, options.sigma2_floor), options);
        if (final_log_likelihood(alt) > final_log_likelihood(out.fit)) out.fit = std::move(alt);
    }

    const auto& st = out.fit.state;
    const Eigen::VectorXd z = st.latent.row(Nt).transpose();
    const Eigen::VectorXd pred = st.loadings * z + st.mean;
    out.completed = (pred.array() * out.column_scale.array() + out.column_center.array()).matrix();
    for (Eigen::Index j = 0; j < D; ++j)
        if (observed(j)) out.completed(j) = initial_row(j);
    return out;
}

/// Picks the latent dimension with the best held-out predictive
/// log-likelihood on a random subset of the observed training cells.
inline int select_latent_dim(const Grid& training, const std::vector<int>& candidates, double holdout_fraction,
                             std::uint64_t seed, EmOptions options = {}) {
    if (candidates.empty()) throw InvalidArgument("select_latent_dim: no candidates");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw InvalidArgument("select_latent_dim: holdout fraction must be in (0, 1)");
    const Mask observed = training.array().isNaN() == false;
    Mask fit_mask = observed;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution hold(holdout_fraction);
    for (Eigen::Index i = 0; i < fit_mask.rows(); ++i)
        for (Eigen::Index j = 0; j < fit_mask.cols(); ++j)
            if (observed(i, j) && hold(rng)) fit_mask(i, j) = false;
    // Keep at least one observation per row and column.
    for (Eigen::Index i = 0; i < fit_mask.rows(); ++i)
        for (Eigen::Index j = 0; j < fit_mask.cols(); ++j)
            if (observed(i, j) && (!fit_mask.row(i).any() || !fit_mask.col(j).any())) fit_mask(i, j) = true;

    // Column standardization on the fitting cells.
    Eigen::MatrixXd Y = training;
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            if (fit_mask(i, j)) { sum += Y(i, j); ++n; }
        const double mean = n ? sum / n : 0.0;
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            if (fit_mask(i, j)) sum2 += (Y(i, j) - mean) * (Y(i, j) - mean);
        double sd = n > 1 ? std::sqrt(sum2 / n) : 1.0;
        if (!(sd > 1e-12)) sd = 1.0;
        Y.col(j) = (Y.col(j).array() - mean) / sd;
    }
    const Eigen::MatrixXd Y0 = fit_mask.select(Y, 0.0);

    int best = candidates.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k : candidates) {
        options.latent_dim = k;
        const auto fit = fit_factor_model(Y0, fit_mask, Y0, options);
        const auto rows = detail::group_rows(fit_mask);
        const auto e = detail::e_step(Y0, fit_mask, rows, fit.state);
        const auto& W = fit.state.loadings;
        double score = 0.0;
        for (Eigen::Index i = 0; i < Y.rows(); ++i) {
            const auto& cov = e.covs[rows.of_row[static_cast<std::size_t>(i)]];
            for (Eigen::Index j = 0; j < Y.cols(); ++j) {
                if (!observed(i, j) || fit_mask(i, j)) continue;
                const double mu = W.row(j).dot(e.means.row(i)) + fit.state.mean(j);
                const double var = W.row(j) * cov * W.row(j).transpose() + fit.state.noise_var;
                const double r = Y(i, j) - mu;
                score += -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
            }
        }
        if (score > best_score) {
            best_score = score;
            best = k;
        }
    }
    return best;
}

} // namespace reoh
