#pragma once

// Estimator parameters as an INI [estimator] section.

#include "reoh/error.hpp"
#include "reoh/estimator.hpp"
#include "reoh/io.hpp"

#include <filesystem>
#include <string>

namespace reoh {

namespace detail {

inline bool parse_bool(const std::string& text, const std::string& where) {
    const auto t = io::trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ParseError(where + ": expected a boolean, got '" + t + "'");
}

} // namespace detail

inline EstimatorParams load_params(const std::filesystem::path& path) {
    const auto tree = io::read_key_value(path);
    const std::string where = path.string();
    EstimatorParams p;
    auto get = [&](const char* key) { return tree.get_optional<std::string>(std::string("estimator.") + key); };
    auto as_int = [&](const std::string& v) { return static_cast<int>(io::parse_int(io::trim(v), where)); };

    if (auto v = get("latent_dim")) p.latent_dim = as_int(*v);
    if (auto v = get("auto_latent_dim")) p.auto_latent_dim = detail::parse_bool(*v, where);
    if (auto v = get("latent_candidates")) {
        p.latent_candidates.clear();
        for (double k : io::parse_double_list(*v, where)) p.latent_candidates.push_back(static_cast<int>(k));
    }
    if (auto v = get("max_iters")) p.max_iters = as_int(*v);
    if (auto v = get("tol")) p.tol = io::parse_double(io::trim(*v), where);
    if (auto v = get("min_samples")) {
        const int n = as_int(*v);
        if (n < 1) throw ParseError(where + ": min_samples must be positive");
        p.min_samples = static_cast<std::size_t>(n);
    }
    if (auto v = get("ridge")) p.ridge = io::parse_double(io::trim(*v), where);
    if (auto v = get("sigma2_floor")) p.sigma2_floor = io::parse_double(io::trim(*v), where);
    if (auto v = get("standardize")) p.standardize = detail::parse_bool(*v, where);
    if (auto v = get("log_time")) p.log_time = detail::parse_bool(*v, where);
    if (auto v = get("half_core_rounding")) p.unify.half_core_rounding = detail::parse_bool(*v, where);
    if (auto v = get("predictors")) {
        const auto t = io::trim(*v);
        if (t == "unified") p.predictors = PredictorSet::Unified;
        else if (t == "workgroup") p.predictors = PredictorSet::Workgroup;
        else throw ParseError(where + ": predictors must be 'unified' or 'workgroup'");
    }
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(where + ": " + e.what());
    }
    return p;
}

inline void save_params(const std::filesystem::path& path, const EstimatorParams& p) {
    io::KeyValueTree tree;
    tree.put("estimator.latent_dim", p.latent_dim);
    tree.put("estimator.auto_latent_dim", p.auto_latent_dim ? "true" : "false");
    tree.put("estimator.latent_candidates", io::join(p.latent_candidates));
    tree.put("estimator.max_iters", p.max_iters);
    tree.put("estimator.tol", io::format_double(p.tol));
    tree.put("estimator.min_samples", p.min_samples);
    tree.put("estimator.ridge", io::format_double(p.ridge));
    tree.put("estimator.sigma2_floor", io::format_double(p.sigma2_floor));
    tree.put("estimator.standardize", p.standardize ? "true" : "false");
    tree.put("estimator.log_time", p.log_time ? "true" : "false");
    tree.put("estimator.half_core_rounding", p.unify.half_core_rounding ? "true" : "false");
    tree.put("estimator.predictors", p.predictors == PredictorSet::Unified ? "unified" : "workgroup");
    io::write_key_value(path, tree);
}

} // namespace reoh
