/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/pipeline.hpp"

#include "ewspipe/error.hpp"
#include "ewspipe/parallel.hpp"

#include <cstdio>

namespace ews::pipeline {

namespace {

template <class T>
void read_key(const json& j, const char* key, T& target)
{
    if (j.contains(key)) target = j.at(key).get<T>();
}

json range_json(const std::array<double, 2>& r)
{
    return json::array({r[0], r[1]});
}

std::string padded(std::size_t i, int width)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, i);
    return buf;
}

json base_manifest(const char* name, std::uint64_t seed)
{
    return json{{"format_version", 1},
                {"generator", {{"name", name}, {"version", kGeneratorVersion}}},
                {"master_seed", seed},
                {"rng", kRngName}};
}

} // namespace

json to_json(const SimulationPlan& plan)
{
    return json{{"dt", plan.dt},
                {"burn_in_steps", plan.burn_in_steps},
                {"n_records", plan.n_records},
                {"record_every", plan.record_every}};
}

SimulationPlan plan_from_json(const json& j, SimulationPlan plan)
{
    read_key(j, "dt", plan.dt);
    read_key(j, "burn_in_steps", plan.burn_in_steps);
    read_key(j, "n_records", plan.n_records);
    read_key(j, "record_every", plan.record_every);
    return plan;
}

json to_json(const rapo::RapoConfig& c)
{
    return json{{"p_active", c.draw.p_active},
                {"coeff_bound", c.draw.coeff_bound},
                {"n_init", c.equilibrium.n_init},
                {"init_box", c.equilibrium.box},
                {"equilibrium_tolerance", c.equilibrium.newton.tolerance},
                {"sweep_delta", c.hunt.delta},
                {"bisection_tolerance", c.hunt.bisection_tolerance},
                {"max_eigen_jump", c.hunt.max_eigen_jump},
                {"noise_min", c.noise_min},
                {"noise_max", c.noise_max},
                {"max_attempts", c.max_attempts},
                {"plan", to_json(c.plan)}};
}

rapo::RapoConfig rapo_config_from_json(const json& j)
{
    rapo::RapoConfig c;
    read_key(j, "p_active", c.draw.p_active);
    read_key(j, "coeff_bound", c.draw.coeff_bound);
    read_key(j, "n_init", c.equilibrium.n_init);
    read_key(j, "init_box", c.equilibrium.box);
    read_key(j, "equilibrium_tolerance", c.equilibrium.newton.tolerance);
    c.hunt.newton.tolerance = c.equilibrium.newton.tolerance;
    read_key(j, "sweep_delta", c.hunt.delta);
    read_key(j, "bisection_tolerance", c.hunt.bisection_tolerance);
    read_key(j, "max_eigen_jump", c.hunt.max_eigen_jump);
    read_key(j, "noise_min", c.noise_min);
    read_key(j, "noise_max", c.noise_max);
    read_key(j, "max_attempts", c.max_attempts);
    if (j.contains("plan")) c.plan = plan_from_json(j["plan"], c.plan);
    return c;
}

json to_json(const NisirConfig& c)
{
    const auto& r = c.ranges;
    return json{{"log10_N", {r.log10_N_min, r.log10_N_max}},
                {"gamma", {r.gamma_min, r.gamma_max}},
                {"mu", {r.mu_min, r.mu_max}},
                {"beta0_frac", {r.beta0_frac_min, r.beta0_frac_max}},
                {"white_sigma_per_sqrtN", {r.white_min, r.white_max}},
                {"env_sigma", {r.env_min, r.env_max}},
                {"dem_scale", r.dem_scale},
                {"import_rate", r.import_rate},
                {"initial_infected", c.options.initial_infected},
                {"plan", to_json(c.options.plan)}};
}

NisirConfig nisir_config_from_json(const json& j)
{
    NisirConfig c;
    auto& r = c.ranges;
    auto pair = [&](const char* key, double& lo, double& hi) {
        if (j.contains(key)) {
            lo = j[key].at(0).get<double>();
            hi = j[key].at(1).get<double>();
        }
    };
    pair("log10_N", r.log10_N_min, r.log10_N_max);
    pair("gamma", r.gamma_min, r.gamma_max);
    pair("mu", r.mu_min, r.mu_max);
    pair("beta0_frac", r.beta0_frac_min, r.beta0_frac_max);
    pair("white_sigma_per_sqrtN", r.white_min, r.white_max);
    pair("env_sigma", r.env_min, r.env_max);
    read_key(j, "dem_scale", r.dem_scale);
    read_key(j, "import_rate", r.import_rate);
    read_key(j, "initial_infected", c.options.initial_infected);
    if (j.contains("plan")) c.options.plan = plan_from_json(j["plan"], c.options.plan);
    return c;
}

json to_json(const testbed::TestbedConfig& c)
{
    return json{{"n_series", c.n_series},
                {"plan", to_json(c.plan)},
                {"eval_fraction", c.eval_fraction},
                {"ramp_start_frac", {c.ramp_start_frac_min, c.ramp_start_frac_max}},
                {"seir_Lambda", c.seir_Lambda},
                {"seir_d", range_json(c.seir_d)},
                {"seir_kappa", range_json(c.seir_kappa)},
                {"seir_gamma", range_json(c.seir_gamma)},
                {"seir_sigma", range_json(c.seir_sigma)},
                {"seirx_mu", range_json(c.seirx_mu)},
                {"seirx_beta", range_json(c.seirx_beta)},
                {"seirx_progression", range_json(c.seirx_progression)},
                {"seirx_gamma", range_json(c.seirx_gamma)},
                {"seirx_kappa", range_json(c.seirx_kappa)},
                {"seirx_delta", range_json(c.seirx_delta)},
                {"seirx_sigma", range_json(c.seirx_sigma)}};
}

testbed::TestbedConfig testbed_config_from_json(const json& j)
{
    testbed::TestbedConfig c;
    read_key(j, "n_series", c.n_series);
    if (j.contains("plan")) c.plan = plan_from_json(j["plan"], c.plan);
    read_key(j, "eval_fraction", c.eval_fraction);
    if (j.contains("ramp_start_frac")) {
        c.ramp_start_frac_min = j["ramp_start_frac"].at(0).get<double>();
        c.ramp_start_frac_max = j["ramp_start_frac"].at(1).get<double>();
    }
    read_key(j, "seir_Lambda", c.seir_Lambda);
    read_key(j, "seir_d", c.seir_d);
    read_key(j, "seir_kappa", c.seir_kappa);
    read_key(j, "seir_gamma", c.seir_gamma);
    read_key(j, "seir_sigma", c.seir_sigma);
    read_key(j, "seirx_mu", c.seirx_mu);
    read_key(j, "seirx_beta", c.seirx_beta);
    read_key(j, "seirx_progression", c.seirx_progression);
    read_key(j, "seirx_gamma", c.seirx_gamma);
    read_key(j, "seirx_kappa", c.seirx_kappa);
    read_key(j, "seirx_delta", c.seirx_delta);
    read_key(j, "seirx_sigma", c.seirx_sigma);
    return c;
}

json to_json(const PreprocessConfig& c)
{
    return json{{"apply_censor", c.apply_censor},
                {"max_censor", c.max_censor},
                {"lowess_span", c.lowess.span},
                {"lowess_robustness_iters", c.lowess.robustness_iters},
                {"order", "censor,normalize,detrend"}};
}

PreprocessConfig preprocess_config_from_json(const json& j)
{
    PreprocessConfig c;
    read_key(j, "apply_censor", c.apply_censor);
    read_key(j, "max_censor", c.max_censor);
    read_key(j, "lowess_span", c.lowess.span);
    read_key(j, "lowess_robustness_iters", c.lowess.robustness_iters);
    return c;
}

json to_json(const EwiConfig& c)
{
    return json{{"window_frac", c.window_frac},
                {"indicator", std::string(to_string(c.indicator))},
                {"min_window", c.min_window}};
}

EwiConfig ewi_config_from_json(const json& j)
{
    EwiConfig c;
    read_key(j, "window_frac", c.window_frac);
    if (j.contains("indicator")) c.indicator = parse_indicator(j["indicator"].get<std::string>());
    read_key(j, "min_window", c.min_window);
    return c;
}

Dataset generate_rapo_dataset(std::size_t n_pairs, std::uint64_t seed, const rapo::RapoConfig& config,
                              std::size_t threads)
{
    std::vector<rapo::RapoPairResult> pairs(n_pairs);
    parallel_for(n_pairs, threads,
                 [&](std::size_t i) { pairs[i] = rapo::generate_rapo_pair_from_stream(seed, i, config); });

    Dataset data;
    data.manifest = base_manifest("rapo", seed);
    auto cfg = to_json(config);
    cfg["n_pairs"] = n_pairs;
    data.manifest["config"] = cfg;
    json entries = json::array();
    for (std::size_t i = 0; i < n_pairs; ++i) {
        auto& pr = pairs[i];
        const auto& rec = pr.record;
        json params{{"coeffs_x", rec.system.coeffs_x},
                    {"coeffs_y", rec.system.coeffs_y},
                    {"forcing_index", rec.system.forcing_index},
                    {"initial_value", rec.initial_value},
                    {"critical_value", rec.critical_value},
                    {"equilibrium", rec.equilibrium},
                    {"noise_sigma", rec.noise_sigma},
                    {"attempts", rec.attempts}};
        const std::string base = "rapo_" + padded(i, 6);
        pr.forced.id = base + "_forced";
        pr.null.id = base + "_null";
        for (auto* ts : {&pr.forced, &pr.null}) {
            const bool forced = ts == &pr.forced;
            json p = params;
            p["ramp_end"] = forced ? rec.critical_value : rec.initial_value;
            entries.push_back({{"id", ts->id},
                               {"stream_id", i},
                               {"substream", 1 + 2 * (rec.attempts - 1) + (forced ? 0 : 1)},
                               {"label", std::string(to_string(ts->label))},
                               {"params", std::move(p)}});
            data.series.push_back(std::move(*ts));
        }
    }
    data.manifest["series"] = std::move(entries);
    data.manifest = complete_manifest(data);
    return data;
}

Dataset generate_nisir_dataset(const std::vector<nisir::NoiseKind>& kinds, std::size_t n_per_kind, std::uint64_t seed,
                               const NisirConfig& config, std::size_t threads)
{
    if (n_per_kind == 0 || n_per_kind % 2 != 0) {
        throw Error(ErrorKind::InvalidArgument, "--n-series must be a positive even number per noise kind");
    }
    struct Item {
        TimeSeries ts;
        nisir::SirParams params;
        std::size_t attempts = 0;
        std::uint64_t stream = 0;
    };
    const std::size_t total = kinds.size() * n_per_kind;
    std::vector<Item> items(total);
    parallel_for(total, threads, [&](std::size_t flat) {
        const std::size_t k = flat / n_per_kind;
        const std::size_t i = flat % n_per_kind;
        const auto kind = kinds[k];
        const std::uint64_t stream = (static_cast<std::uint64_t>(kind) << 32) | i;
        const bool forced = i % 2 == 0;
        RngStream param_rng(seed, stream, 0);
        for (std::uint32_t attempt = 0;; ++attempt) {
            if (attempt >= 1000) throw Error(ErrorKind::ExtinctSeries, "NISIR series kept failing");
            const auto p = nisir::draw_sir_params(kind, param_rng, config.ranges);
            auto noise_rng = param_rng.substream(attempt + 1);
            try {
                auto ts = nisir::generate_nisir_series(p, forced, noise_rng, config.options);
                ts.id = "nisir_" + std::string(nisir::to_string(kind)) + "_" + padded(i, 5);
                ts.meta["noise_kind"] = std::string(nisir::to_string(kind));
                items[flat] = {std::move(ts), p, attempt + 1, stream};
                return;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NonFiniteState && e.kind() != ErrorKind::ExtinctSeries) throw;
            }
        }
    });

    Dataset data;
    data.manifest = base_manifest("nisir", seed);
    auto cfg = to_json(config);
    cfg["n_per_kind"] = n_per_kind;
    json kind_names = json::array();
    for (auto k : kinds) kind_names.push_back(std::string(nisir::to_string(k)));
    cfg["noise_kinds"] = kind_names;
    data.manifest["config"] = cfg;
    json entries = json::array();
    for (auto& item : items) {
        const auto& p = item.params;
        const double beta_c = nisir::sir_bifurcation_point(p);
        const bool forced = item.ts.label == BifurcationLabel::Transcritical;
        entries.push_back({{"id", item.ts.id},
                           {"stream_id", item.stream},
                           {"substream", item.attempts},
                           {"label", std::string(to_string(item.ts.label))},
                           {"params",
                            {{"noise_kind", std::string(nisir::to_string(p.noise_kind))},
                             {"beta0", p.beta},
                             {"beta_c", beta_c},
                             {"ramp_end", forced ? beta_c : p.beta},
                             {"gamma", p.gamma},
                             {"mu", p.mu},
                             {"N", p.N},
                             {"sigma", p.sigma},
                             {"import_rate", p.import_rate},
                             {"attempts", item.attempts}}}});
        data.series.push_back(std::move(item.ts));
    }
    data.manifest["series"] = std::move(entries);
    data.manifest = complete_manifest(data);
    return data;
}

Dataset generate_testbed_dataset(testbed::Model model, std::uint64_t seed, const testbed::TestbedConfig& config,
                                 std::size_t threads)
{
    auto items = testbed::generate_testbed(model, seed, config, threads);
    Dataset data;
    data.manifest = base_manifest("testbed", seed);
    auto cfg = to_json(config);
    cfg["model"] = std::string(testbed::to_string(model));
    data.manifest["config"] = cfg;
    json entries = json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& item = items[i];
        item.series.id = std::string(testbed::to_string(model)) + "_" + padded(i, 3);
        entries.push_back({{"id", item.series.id},
                           {"stream_id", i},
                           {"substream", item.attempts},
                           {"label", std::string(to_string(item.series.label))},
                           {"eval_start_index", *item.series.eval_start_index()},
                           {"params", item.params}});
        data.series.push_back(std::move(item.series));
    }
    data.manifest["series"] = std::move(entries);
    data.manifest = complete_manifest(data);
    return data;
}

Dataset preprocess_dataset(const Dataset& input, const PreprocessConfig& config, std::uint64_t seed,
                           std::size_t threads)
{
    const std::size_t n = input.series.size();
    std::vector<std::optional<TimeSeries>> out(n);
    std::vector<PreprocessRecord> records(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream rng(seed, i, 0);
        try {
            out[i] = preprocess_series(input.series[i], config, rng, &records[i]);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroMean) throw;
        }
    });

    Dataset data;
    data.manifest = base_manifest("preprocess", seed);
    data.manifest["config"] = to_json(config);
    data.manifest["source"] = input.manifest;
    json entries = json::array();
    json dropped = json::array();
    const json* source_entries =
        input.manifest.contains("series") && input.manifest["series"].size() == n ? &input.manifest["series"] : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
        if (!out[i]) {
            dropped.push_back(input.series[i].id);
            continue;
        }
        json e{{"id", out[i]->id},
               {"stream_id", i},
               {"label", std::string(to_string(out[i]->label))},
               {"censor", {{"lead_len", records[i].lead_len}, {"tail_len", records[i].tail_len}}},
               {"mean", records[i].mean}};
        if (source_entries && (*source_entries)[i].contains("eval_start_index")) {
            e["eval_start_index"] = (*source_entries)[i]["eval_start_index"];
        }
        entries.push_back(std::move(e));
        data.series.push_back(std::move(*out[i]));
    }
    data.manifest["series"] = std::move(entries);
    data.manifest["dropped"] = std::move(dropped);
    data.manifest = complete_manifest(data);
    return data;
}

Dataset replay_manifest(const json& manifest, std::size_t threads)
{
    const auto name = manifest.at("generator").at("name").get<std::string>();
    const auto seed = manifest.at("master_seed").get<std::uint64_t>();
    const auto& cfg = manifest.at("config");
    if (name == "rapo") {
        return generate_rapo_dataset(cfg.at("n_pairs").get<std::size_t>(), seed, rapo_config_from_json(cfg), threads);
    }
    if (name == "nisir") {
        std::vector<nisir::NoiseKind> kinds;
        for (const auto& k : cfg.at("noise_kinds")) kinds.push_back(nisir::parse_noise_kind(k.get<std::string>()));
        return generate_nisir_dataset(kinds, cfg.at("n_per_kind").get<std::size_t>(), seed,
                                      nisir_config_from_json(cfg), threads);
    }
    if (name == "testbed") {
        return generate_testbed_dataset(testbed::parse_model(cfg.at("model").get<std::string>()), seed,
                                        testbed_config_from_json(cfg), threads);
    }
    if (name == "preprocess") {
        const auto source = replay_manifest(manifest.at("source"), threads);
        return preprocess_dataset(source, preprocess_config_from_json(cfg), seed, threads);
    }
    throw Error(ErrorKind::InvalidArgument, "generator '" + name + "' cannot be replayed from its manifest");
}

bool is_preprocessed(const json& manifest)
{
    if (!manifest.contains("generator")) return false;
    if (manifest["generator"].value("name", std::string()) == "preprocess") return true;
    return manifest.contains("source") && is_preprocessed(manifest["source"]);
}

std::vector<PredictionRecord> score_dataset(const Dataset& data, const EwiConfig& ewi, const LowessConfig& lowess,
                                            std::size_t threads)
{
    const bool preprocessed = is_preprocessed(data.manifest);
    std::vector<PredictionRecord> preds(data.series.size());
    parallel_for(data.series.size(), threads, [&](std::size_t i) {
        const auto& src = data.series[i];
        TimeSeries seg = src;
        const auto start = src.eval_start_index();
        if (start) {
            if (*start >= src.size()) {
                throw Error(ErrorKind::WindowMismatch, src.id + ": eval window starts past the series end");
            }
            const auto first = static_cast<std::ptrdiff_t>(*start);
            seg.values.assign(src.values.begin() + first, src.values.end());
            seg.mask.assign(src.mask.begin() + first, src.mask.end());
        }
        if (!preprocessed) {
            seg = detrend(normalize_by_mean(seg), lowess);
        }
        try {
            preds[i] = {src.id, ewi_score(seg, ewi), start};
        } catch (const Error& e) {
            throw Error(e.kind(), src.id + ": " + e.detail());
        }
    });
    return preds;
}

} // namespace ews::pipeline
