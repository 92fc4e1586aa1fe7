#include "reoh/estimator.hpp"
#include "reoh/synthetic.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace reoh;

namespace {

SamplePlan plan_for(int app, std::size_t n_configs, std::size_t n, std::uint64_t seed) {
    auto p = select_samples(n_configs, n, seed);
    p.target_app = app;
    return p;
}

double rel_rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::sqrt((a - b).squaredNorm() / b.squaredNorm());
}

} // namespace

TEST(ArgminEnergy, FirstOfTwoAndTies) {
    Eigen::VectorXd e(2);
    e << 10, 20;
    EXPECT_EQ(argmin_energy(e), 0u);
    EXPECT_EQ(argmin_energy(Eigen::VectorXd::Constant(7, 3.5)), 0u);
    Eigen::VectorXd t(4);
    t << 5, 2, 9, 2;
    EXPECT_EQ(argmin_energy(t), 1u);
    EXPECT_THROW(argmin_energy(Eigen::VectorXd()), InvalidArgument);
}

TEST(PredictEnergy, EqualEnergiesPickLowestIndex) {
    auto s = ci_system();
    for (auto& p : s.platforms) p.static_power = 0.0;
    const auto configs = enumerate_configs(s);
    const auto D = static_cast<Eigen::Index>(configs.size());
    const auto r = predict_energy(Eigen::VectorXd::Constant(D, 4.0), Eigen::VectorXd::Constant(D, 2.0), s, configs);
    EXPECT_EQ(r.chosen, 0u);
    EXPECT_EQ(r.energy(5), 8000.0);
}

TEST(PredictEnergy, MatchesExhaustiveScan) {
    const auto s = paper_system();
    const auto configs = enumerate_configs(s);
    const auto D = static_cast<Eigen::Index>(configs.size());
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pw(1.0, 60.0), tm(0.1, 30.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd p(D), t(D);
        for (auto& v : p) v = pw(rng);
        for (auto& v : t) v = tm(rng);
        const auto r = predict_energy(p, t, s, configs);
        std::size_t best = 0;
        double best_e = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < configs.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double e = total_energy(s, configs[j].platform, p(jj) * t(jj) * 1000.0, t(jj)).total;
            EXPECT_NEAR(r.energy(jj), e, 1e-9 * e);
            if (e < best_e) {
                best_e = e;
                best = j;
            }
        }
        EXPECT_EQ(r.chosen, best);
        EXPECT_EQ(r.energy.minCoeff(), r.energy(static_cast<Eigen::Index>(r.chosen)));
    }
}

TEST(PredictEnergy, ArgminInvariantUnderUniformScaling) {
    // With static draw folded into the power, scaling every power by c
    // scales every total by c.
    const auto s = paper_system();
    const auto configs = enumerate_configs(s);
    const auto D = static_cast<Eigen::Index>(configs.size());
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> pw(1.0, 60.0), tm(0.1, 30.0), scale(1e-3, 1e3);
    EnergyOptions eo;
    eo.static_included = true;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd p(D), t(D);
        for (auto& v : p) v = pw(rng);
        for (auto& v : t) v = tm(rng);
        const auto base = predict_energy(p, t, s, configs, eo);
        const double c = scale(rng);
        EXPECT_EQ(predict_energy(p * c, t, s, configs, eo).chosen, base.chosen);
        EXPECT_EQ(argmin_energy(base.energy * c), base.chosen);
    }
}

TEST(PredictEnergy, ClampsAndFlags) {
    const auto s = ci_system();
    const auto configs = enumerate_configs(s);
    const auto D = static_cast<Eigen::Index>(configs.size());
    Eigen::VectorXd p = Eigen::VectorXd::Constant(D, 10.0), t = Eigen::VectorXd::Constant(D, 1.0);
    t(3) = -0.5;
    t(4) = 0.0;
    p(5) = -2.0;
    EnergyOptions eo;
    eo.time_floor = 1e-4;
    const auto r = predict_energy(p, t, s, configs, eo);
    EXPECT_EQ(r.time(3), 1e-4);
    EXPECT_EQ(r.time(4), 1e-4);
    EXPECT_EQ(r.power(5), 0.0);
    EXPECT_TRUE(r.clamped[3] && r.clamped[4] && r.clamped[5]);
    EXPECT_FALSE(r.clamped[0]);
    EXPECT_TRUE(r.energy.allFinite());
    t(6) = kNaN;
    EXPECT_THROW(predict_energy(p, t, s, configs, eo), EstimatorError);
    EXPECT_THROW(predict_energy(p.head(3), t, s, configs, eo), InvalidArgument);
}

TEST(Pipeline, SampledCellsKeepMeasuredValues) {
    const auto synth = generate_system(paper_profile(3, 0.05));
    const auto& m = synth.data.matrix;
    const auto plan = plan_for(4, m.n_configs(), 15, 9);
    const auto r = reoh_pipeline(m, 4, plan, EstimatorParams{}, synth.data.system);
    const auto row = static_cast<Eigen::Index>(*m.row_of(4));
    std::size_t sampled = 0;
    for (std::size_t j = 0; j < m.n_configs(); ++j) {
        const bool in_plan =
            std::find(plan.sample_configs.begin(), plan.sample_configs.end(), j) != plan.sample_configs.end();
        EXPECT_EQ(r.provenance[j] == Provenance::Sampled, in_plan);
        if (!in_plan) continue;
        ++sampled;
        const auto jj = static_cast<Eigen::Index>(j);
        EXPECT_EQ(r.power(jj), m.power(row, jj));
        EXPECT_EQ(r.time(jj), m.time(row, jj));
    }
    EXPECT_EQ(sampled, 15u);
}

TEST(Pipeline, FullPlanEqualsBruteForce) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto synth = generate_system(ci_profile(seed, 0.05));
        const auto& m = synth.data.matrix;
        for (const auto& app : m.apps) {
            const auto plan = plan_for(app.app_id, m.n_configs(), m.n_configs(), seed);
            const auto r = reoh_pipeline(m, app.app_id, plan, EstimatorParams{}, synth.data.system);
            EXPECT_EQ(r.chosen_column(), brute_force_best(m, app.app_id, synth.data.system).column)
                << "seed " << seed << " app " << app.app_id;
        }
    }
}

TEST(Pipeline, DominantGpuIsChosen) {
    auto spec = paper_profile(5, 0.0);
    spec.shape.gpu_speedup = {20.0, 30.0};
    const auto synth = generate_system(spec);
    const auto& m = synth.data.matrix;
    for (const auto& app : m.apps) {
        // Every GPU cell beats every CPU cell in the truth.
        const auto row = *m.row_of(app.app_id);
        double worst_gpu = 0.0, best_cpu = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.n_configs(); ++j) {
            const double e = measured_energy(m, row, j, synth.data.system);
            if (m.configs[j].platform == 1) worst_gpu = std::max(worst_gpu, e);
            else best_cpu = std::min(best_cpu, e);
        }
        ASSERT_LT(worst_gpu, best_cpu);
        const auto r = reoh_pipeline(m, app.app_id, plan_for(app.app_id, m.n_configs(), 15, 77), EstimatorParams{},
                                     synth.data.system);
        EXPECT_EQ(r.chosen_config().platform, 1u) << "app " << app.app_id;
    }
}

TEST(Pipeline, Deterministic) {
    const auto synth = generate_system(paper_profile(8, 0.05));
    const auto& m = synth.data.matrix;
    const auto plan = plan_for(11, m.n_configs(), 15, 4);
    const auto a = reoh_pipeline(m, 11, plan, EstimatorParams{}, synth.data.system);
    const auto b = reoh_pipeline(m, 11, plan, EstimatorParams{}, synth.data.system);
    EXPECT_EQ(a.power, b.power);
    EXPECT_EQ(a.time, b.time);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.chosen, b.chosen);
    EXPECT_EQ(a.power_fit.iterations, b.power_fit.iterations);
}

TEST(Pipeline, RejectsTooFewSamplesAndBadMeasurements) {
    const auto synth = generate_system(ci_profile(1, 0.0));
    const auto& m = synth.data.matrix;
    try {
        reoh_pipeline(m, 1, plan_for(1, m.n_configs(), 9, 1), EstimatorParams{}, synth.data.system);
        FAIL() << "expected insufficient samples";
    } catch (const EstimatorError& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient samples"), std::string::npos);
    }
    auto masked = mask_application(m, 1, plan_for(1, m.n_configs(), 12, 1));
    const auto first = plan_for(1, m.n_configs(), 12, 1).sample_configs.front();
    masked.target.time(static_cast<Eigen::Index>(first)) = -1.0;
    EXPECT_THROW(predict_row(masked.training, masked.target, synth.data.system, EstimatorParams{}), InvalidArgument);
}

TEST(Pipeline, NoiseLadderDegradesGracefully) {
    // Same latent structure at increasing measurement noise: the error of the
    // completed rows against the truth grows with the noise and stays in
    // proportion to it.
    // Linear domain at the planted rank, so the zero-noise rung is exact.
    const std::vector<double> ladder{0.0, 0.01, 0.02, 0.05, 0.1};
    EstimatorParams params;
    params.latent_dim = 3;
    params.log_time = false;
    std::vector<double> err;
    for (double sd : ladder) {
        const auto synth = generate_system(paper_profile(21, sd));
        const auto& m = synth.data.matrix;
        double sum = 0.0;
        int n = 0;
        for (int app : {2, 7, 13}) {
            const auto r = reoh_pipeline(m, app, plan_for(app, m.n_configs(), 15, 31), params, synth.data.system);
            const auto row = static_cast<Eigen::Index>(*m.row_of(app));
            sum += rel_rmse(r.time, synth.true_time.row(row).transpose());
            sum += rel_rmse(r.power, synth.true_power.row(row).transpose());
            n += 2;
        }
        err.push_back(sum / n);
        std::printf("noise %.2f: mean relative rmse %.3g\n", sd, err.back());
    }
    EXPECT_LT(err[0], 1e-6);
    for (std::size_t k = 1; k < ladder.size(); ++k) {
        EXPECT_GT(err[k], err[0]);
        EXPECT_LT(err[k], 3.0 * ladder[k]) << "noise " << ladder[k];
    }
    EXPECT_LT(err[1], err[4]);
}
