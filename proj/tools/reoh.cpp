// reoh: benchmark -> sample -> predict -> run pipeline, plus evaluation.
//
// Exit status: 0 ok, 1 usage or invalid argument, 2 malformed input file,
// 3 estimator failure, 4 measurement backend failure.

#include "reoh/backend.hpp"
#include "reoh/commands.hpp"
#include "reoh/dataset.hpp"
#include "reoh/params_io.hpp"
#include "reoh/platform_io.hpp"
#include "reoh/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace reoh;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kEstimator = 3, kBackend = 4 };

SyntheticSpec profile_spec(const std::string& profile, std::uint64_t seed, double noise) {
    return profile == "ci" ? ci_profile(seed, noise) : paper_profile(seed, noise);
}

EstimatorParams params_or_default(const std::string& path) {
    return path.empty() ? EstimatorParams{} : load_params(path);
}

/// Simulated measurements come from a stored matrix.
SimulatedBackend make_backend(const std::string& kind, const std::string& data_manifest) {
    if (kind != "simulated") throw InvalidArgument("unknown backend '" + kind + "'");
    if (data_manifest.empty()) throw InvalidArgument("the simulated backend needs --data <manifest.ini>");
    return SimulatedBackend(load_training(data_manifest));
}

ExecutableDescriptor resolve_executable(const std::string& path, int app_id, const TrainingData& data) {
    if (!path.empty()) return load_executable(path);
    const auto row = data.matrix.row_of(app_id);
    if (!row) throw InvalidArgument("no --executable given and app " + std::to_string(app_id) + " is not in --data");
    return default_executable(data.matrix.apps[*row], data.system);
}

void print_prediction(std::ostream& os, const PredictionResult& r, const System& system) {
    const auto k = static_cast<Eigen::Index>(r.chosen);
    const auto& c = r.chosen_config();
    os << "chosen platform: " << system.platforms[c.platform].name << '\n'
       << "chosen config:   " << config_id(c, system) << '\n'
       << "predicted:       time " << io::format_double(r.time(k)) << " s, power "
       << io::format_double(r.power(k)) << " W, energy " << io::format_double(r.energy(k)) << " mJ\n"
       << "fit:             power K=" << r.power_fit.latent_dim << " iters=" << r.power_fit.iterations
       << (r.power_fit.converged ? "" : " (max iterations)") << ", time K=" << r.time_fit.latent_dim
       << " iters=" << r.time_fit.iterations << (r.time_fit.converged ? "" : " (max iterations)") << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-optimal configuration selection for CPU+GPU systems"};
    app.set_config("--config", "", "Run-manifest INI holding any of the flags below");
    app.require_subcommand(1);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Measure every application on every configuration");
    std::string b_profile = "paper", b_system, b_apps, b_out, b_backend = "simulated";
    std::uint64_t b_seed = 1;
    double b_noise = 0.05;
    int b_rank = 3;
    bench->add_option("--profile", b_profile, "Synthetic system profile")->check(CLI::IsMember({"paper", "ci"}));
    bench->add_option("--system", b_system, "Platform file (overrides the profile's system)");
    bench->add_option("--apps", b_apps, "Application list CSV (overrides the profile's applications)");
    bench->add_option("--seed", b_seed, "Generator seed");
    bench->add_option("--noise", b_noise, "Relative measurement noise of the simulated sweep");
    bench->add_option("--rank", b_rank, "Latent rank of the simulated sweep");
    bench->add_option("--backend", b_backend, "Measurement backend")->check(CLI::IsMember({"simulated"}));
    bench->add_option("--out", b_out, "Output directory")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "Measure an application on a few random configurations");
    std::string s_exe, s_data, s_system, s_params, s_out, s_backend = "simulated";
    int s_app = 0;
    std::size_t s_n = 15;
    std::uint64_t s_seed = 1;
    sample->add_option("--executable", s_exe, "Executable descriptor INI");
    sample->add_option("--app", s_app, "Application id (selects the simulated row)");
    sample->add_option("--data", s_data, "Dataset manifest replayed by the simulated backend");
    sample->add_option("--system", s_system, "Platform file (default: the dataset's)");
    sample->add_option("--samples", s_n, "Number of sampled configurations");
    sample->add_option("--seed", s_seed, "Sampling seed");
    sample->add_option("--params", s_params, "Estimator parameter INI (for min_samples)");
    sample->add_option("--backend", s_backend, "Measurement backend")->check(CLI::IsMember({"simulated"}));
    sample->add_option("--out", s_out, "Output directory")->required();

    // predict
    auto* predict = app.add_subcommand("predict", "Predict every configuration and choose the cheapest");
    std::string p_training, p_samples, p_plan, p_params, p_out;
    int p_app = 0;
    predict->add_option("--training", p_training, "Training manifest")->required();
    predict->add_option("--sample-file", p_samples, "Sample CSV written by 'sample'")->required();
    predict->add_option("--plan", p_plan, "Plan INI written by 'sample' (supplies the app id)");
    predict->add_option("--app", p_app, "Target application id");
    predict->add_option("--params", p_params, "Estimator parameter INI");
    predict->add_option("--out", p_out, "Output directory for estimates.csv and choice.ini");

    // run
    auto* run = app.add_subcommand("run", "Run once on the chosen configuration and measure it");
    std::string r_exe, r_data, r_system, r_config, r_choice, r_backend = "simulated";
    int r_app = 0;
    run->add_option("--executable", r_exe, "Executable descriptor INI");
    run->add_option("--app", r_app, "Application id (selects the simulated row)");
    run->add_option("--data", r_data, "Dataset manifest replayed by the simulated backend");
    run->add_option("--system", r_system, "Platform file (default: the dataset's)");
    auto* cfg_opt = run->add_option("--config-id", r_config, "Configuration id, e.g. E5-2650Lv3:c12:f1.8:m2");
    run->add_option("--choice", r_choice, "choice.ini written by 'predict'")->excludes(cfg_opt);
    run->add_option("--backend", r_backend, "Measurement backend")->check(CLI::IsMember({"simulated"}));

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compare REOH, single-platform baselines and brute force");
    std::string e_training, e_truth, e_profile = "paper", e_params, e_out;
    std::uint64_t e_seed = 1, e_gen_seed = 1;
    double e_noise = 0.05;
    int e_trials = 1;
    std::size_t e_samples = 15, e_cpu_samples = 15, e_gpu_samples = 3;
    std::vector<std::string> e_approaches{"REOH", "LEO-CPU", "LEO-GPU", "BruteForce"};
    eval->add_option("--training", e_training, "Training manifest (default: generate from --profile)");
    eval->add_option("--truth", e_truth, "Manifest of the noiseless matrix used for scoring");
    eval->add_option("--profile", e_profile, "Synthetic profile when no --training is given")
        ->check(CLI::IsMember({"paper", "ci"}));
    eval->add_option("--generator-seed", e_gen_seed, "Generator seed when no --training is given");
    eval->add_option("--noise", e_noise, "Generator noise when no --training is given");
    eval->add_option("--seed", e_seed, "Sampling seed");
    eval->add_option("--trials", e_trials, "Trials per application");
    eval->add_option("--samples", e_samples, "REOH samples per application");
    eval->add_option("--cpu-samples", e_cpu_samples, "LEO-CPU samples");
    eval->add_option("--gpu-samples", e_gpu_samples, "LEO-GPU samples");
    eval->add_option("--approaches", e_approaches, "Subset of REOH LEO-CPU LEO-GPU BruteForce");
    eval->add_option("--params", e_params, "Estimator parameter INI");
    eval->add_option("--out", e_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*bench) {
            auto spec = profile_spec(b_profile, b_seed, b_noise);
            spec.rank = b_rank;
            if (!b_system.empty()) spec.system = load_system(b_system);
            std::vector<ApplicationMeta> apps;
            if (!b_apps.empty()) {
                apps = load_applications(b_apps);
                spec.n_apps = static_cast<int>(apps.size());
            }
            auto synth = generate_system(spec);
            if (!apps.empty()) synth.data.matrix.apps = apps;
            const auto truth = synth.truth();
            SimulatedBackend backend(synth.data);
            const auto res = cmd_benchmark(spec.system, synth.data.matrix.apps, backend, b_out, &std::cerr);
            save_training(fs::path(b_out) / "truth", TrainingData{spec.system, truth});
            std::cout << "wrote " << res.manifest.string() << " (" << res.data.matrix.n_apps() << " apps x "
                      << res.data.matrix.n_configs() << " configs, " << res.failed_cells << " failed cells)\n";
        } else if (*sample) {
            auto backend = make_backend(s_backend, s_data);
            const auto system = s_system.empty() ? backend.data().system : load_system(s_system);
            const auto exe = resolve_executable(s_exe, s_app, backend.data());
            const auto params = params_or_default(s_params);
            const auto res = cmd_sample(exe, system, s_n, s_seed, backend, params.min_samples, &std::cerr);
            save_sample_result(s_out, res, system);
            std::cout << "sampled " << res.runs.size() << " configurations of app " << exe.app_id << " into " << s_out
                      << (res.failed ? " (" + std::to_string(res.failed) + " failed)" : std::string()) << '\n';
        } else if (*predict) {
            const auto training = load_training(p_training);
            int app_id = p_app;
            if (!p_plan.empty() && predict->count("--app") == 0) app_id = load_plan(p_plan).target_app;
            const auto runs = load_samples(p_samples, training.system, app_id);
            const auto params = params_or_default(p_params);
            const auto r = cmd_predict(training, runs, app_id, params);
            print_prediction(std::cout, r, training.system);
            if (!p_out.empty()) {
                fs::create_directories(p_out);
                write_estimates(fs::path(p_out) / "estimates.csv", r, training.system);
                write_choice(fs::path(p_out) / "choice.ini", r, training.system, app_id);
            }
        } else if (*run) {
            auto backend = make_backend(r_backend, r_data);
            const auto system = r_system.empty() ? backend.data().system : load_system(r_system);
            const auto exe = resolve_executable(r_exe, r_app, backend.data());
            std::optional<double> predicted;
            NativeConfig cfg;
            if (!r_choice.empty()) {
                const auto c = read_choice(r_choice, system);
                cfg = c.config;
                predicted = c.predicted_energy_mj;
            } else if (!r_config.empty()) {
                cfg = parse_config_id(r_config, system);
            } else {
                throw InvalidArgument("run needs --config-id or --choice");
            }
            const auto f = cmd_run(exe, cfg, system, backend, predicted);
            std::cout << "config:   " << config_id(cfg, system) << '\n'
                      << "measured: time " << io::format_double(f.measurement.mean_time) << " s, dynamic energy "
                      << io::format_double(f.measurement.mean_energy) << " mJ, total energy "
                      << io::format_double(f.energy.total) << " mJ\n";
            if (f.predicted_mj)
                std::cout << "predicted total energy " << io::format_double(*f.predicted_mj) << " mJ, delta "
                          << io::format_double(*f.delta_percent) << "%\n";
        } else if (*eval) {
            EvaluationOptions o;
            o.trials = e_trials;
            o.seed = e_seed;
            o.reoh_samples = e_samples;
            o.leo_cpu_samples = e_cpu_samples;
            o.leo_gpu_samples = e_gpu_samples;
            o.params = params_or_default(e_params);
            o.approaches.clear();
            for (const auto& a : e_approaches) o.approaches.push_back(parse_approach(a));
            if (e_training.empty()) {
                const auto synth = generate_system(profile_spec(e_profile, e_gen_seed, e_noise));
                const auto truth = synth.truth();
                cmd_evaluate(synth.data, o, e_out, &truth, &std::cout);
            } else {
                const auto data = load_training(e_training);
                std::optional<TrainingMatrix> truth;
                if (!e_truth.empty()) truth = load_training(e_truth).matrix;
                cmd_evaluate(data, o, e_out, truth ? &*truth : nullptr, &std::cout);
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const EstimatorError& e) {
        std::cerr << "estimator error: " << e.what() << '\n';
        return kEstimator;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kBackend;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}
