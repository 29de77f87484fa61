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

// ewspipe: generation, preprocessing, splitting, baseline scoring and
// evaluation of early-warning datasets.

#include "ewspipe/error.hpp"
#include "ewspipe/pipeline.hpp"
#include "ewspipe/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ews;
using ews::json;

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::size_t threads = 1;
    std::string config;
};

json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::FormatError, path + ": " + e.what());
    }
}

json config_or_empty(const std::string& path)
{
    return path.empty() ? json::object() : load_json(path);
}

std::string manifest_path_for(const std::string& file)
{
    return file + ".manifest.json";
}

json command_manifest(const std::string& command)
{
    return json{{"format_version", 1},
                {"generator", {{"name", command}, {"version", pipeline::kGeneratorVersion}}}};
}

json source_summary(const json& manifest)
{
    json s = json::object();
    if (manifest.contains("generator")) s["generator"] = manifest["generator"];
    if (manifest.contains("master_seed")) s["master_seed"] = manifest["master_seed"];
    return s;
}

void write_with_manifest(const std::string& path, const std::string& contents, const json& manifest)
{
    write_file_atomically(path, contents);
    write_file_atomically(manifest_path_for(path), manifest.dump(2) + "\n");
}

void add_common(CLI::App* cmd, Common& c, bool seed)
{
    if (seed) cmd->add_option("--seed", c.seed, "master seed")->required();
    cmd->add_option("--out", c.out, "output path")->required();
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--config", c.config, "JSON config overriding defaults")->check(CLI::ExistingFile);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Labels from --labels or from a dataset's labels.csv; the dataset also
// supplies eval windows when its manifest declares them.
struct Truth {
    LabelList labels;
    std::vector<TestbedEntry> testbed;
};

Truth load_truth(const std::string& labels_path, const std::string& dataset_dir)
{
    Truth t;
    if (!dataset_dir.empty()) {
        const auto manifest = load_json((fs::path(dataset_dir) / "manifest.json").string());
        t.labels = read_labels(fs::path(dataset_dir) / "labels.csv");
        const auto& entries = manifest.value("series", json::array());
        const bool windowed = !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const json& e) {
            return e.contains("eval_start_index");
        });
        if (windowed) t.testbed = testbed_entries(manifest);
    } else {
        t.labels = read_labels(labels_path);
    }
    return t;
}

RocResult roc_for(const std::vector<PredictionRecord>& preds, const Truth& truth)
{
    return truth.testbed.empty() ? roc_auc(preds, truth.labels) : evaluate_testbed(preds, truth.testbed);
}

int run(int argc, char** argv)
{
    CLI::App app{"Early-warning dataset pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pipeline::kGeneratorVersion);

    Common c;

    // generate-rapo
    std::size_t rapo_n = 0;
    auto* rapo_cmd = app.add_subcommand("generate-rapo", "random polynomial systems, forced/null pairs");
    add_common(rapo_cmd, c, true);
    rapo_cmd->add_option("--n-series", rapo_n, "number of series (even)")->required()->check(CLI::PositiveNumber);

    // generate-nisir
    std::size_t nisir_n = 0;
    std::string noise_kind = "all";
    auto* nisir_cmd = app.add_subcommand("generate-nisir", "stochastic SIR series");
    add_common(nisir_cmd, c, true);
    nisir_cmd->add_option("--n-series", nisir_n, "series per noise kind (even)")->required()->check(CLI::PositiveNumber);
    nisir_cmd->add_option("--noise-kind", noise_kind, "white, env, dem, a comma list or all");

    // generate-testbed
    std::string model = "seir";
    std::size_t testbed_n = 20;
    auto* testbed_cmd = app.add_subcommand("generate-testbed", "SEIR or SEIRx evaluation testbed");
    add_common(testbed_cmd, c, true);
    testbed_cmd->add_option("--model", model, "seir or seirx");
    testbed_cmd->add_option("--n-series", testbed_n, "series count (even)")->check(CLI::PositiveNumber);

    // preprocess
    std::string pre_in;
    std::size_t max_censor = 725;
    double span = 0.2;
    bool no_censor = false;
    auto* pre_cmd = app.add_subcommand("preprocess", "censor, normalize and detrend a dataset");
    add_common(pre_cmd, c, true);
    pre_cmd->add_option("--in", pre_in, "input dataset directory")->required()->check(CLI::ExistingDirectory);
    pre_cmd->add_option("--max-censor", max_censor, "upper bound of each censor draw");
    pre_cmd->add_option("--span", span, "Lowess span")->check(CLI::Range(0.0, 1.0));
    pre_cmd->add_flag("--no-censor", no_censor, "skip censoring");

    // split
    std::string split_in, split_labels, ratios_text = "0.8,0.15,0.05";
    std::size_t balanced = 0;
    auto* split_cmd = app.add_subcommand("split", "stratified train/val/test split");
    add_common(split_cmd, c, true);
    auto* split_in_opt = split_cmd->add_option("--in", split_in, "dataset directory")->check(CLI::ExistingDirectory);
    auto* split_labels_opt =
        split_cmd->add_option("--labels", split_labels, "labels file")->check(CLI::ExistingFile);
    auto* split_bal_opt =
        split_cmd->add_option("--balanced", balanced, "dry run on N balanced labels")->check(CLI::PositiveNumber);
    split_in_opt->excludes(split_labels_opt)->excludes(split_bal_opt);
    split_labels_opt->excludes(split_bal_opt);
    split_cmd->add_option("--ratios", ratios_text, "train,val,test");

    // ewi-score
    std::string score_in, indicator = "variance";
    double window_frac = 0.5;
    auto* score_cmd = app.add_subcommand("ewi-score", "rolling-indicator Kendall baseline");
    add_common(score_cmd, c, false);
    score_cmd->add_option("--in", score_in, "dataset directory")->required()->check(CLI::ExistingDirectory);
    score_cmd->add_option("--window-frac", window_frac, "rolling window fraction")->check(CLI::Range(0.0, 1.0));
    score_cmd->add_option("--indicator", indicator, "variance or lag1ac");
    score_cmd->add_option("--span", span, "Lowess span for raw data")->check(CLI::Range(0.0, 1.0));

    // evaluate / roc
    std::string preds_path, labels_path, dataset_dir, eval_out;
    double threshold = 0.5;
    auto* eval_cmd = app.add_subcommand("evaluate", "accuracy, F1 and AUC of predictions");
    auto* roc_cmd = app.add_subcommand("roc", "ROC table and SVG chart");
    for (auto* cmd : {eval_cmd, roc_cmd}) {
        cmd->add_option("--preds", preds_path, "predictions file")->required()->check(CLI::ExistingFile);
        auto* l = cmd->add_option("--labels", labels_path, "labels file")->check(CLI::ExistingFile);
        auto* d = cmd->add_option("--dataset", dataset_dir, "dataset directory")->check(CLI::ExistingDirectory);
        l->excludes(d);
    }
    eval_cmd->add_option("--threshold", threshold, "decision threshold")->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--out", eval_out, "metrics JSON (stdout if omitted)");
    roc_cmd->add_option("--out", eval_out, "ROC CSV path; the SVG goes next to it")->required();

    // import-csv
    std::string import_in;
    EmpiricalColumns columns;
    auto* import_cmd = app.add_subcommand("import-csv", "daily case counts to an unlabeled dataset");
    add_common(import_cmd, c, false);
    import_cmd->add_option("--in", import_in, "CSV table")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--date-column", columns.time_column);
    import_cmd->add_option("--count-column", columns.count_column);
    import_cmd->add_option("--group-column", columns.group_column);
    import_cmd->add_option("--max-fill", columns.max_fill)->check(CLI::NonNegativeNumber);

    // replay
    std::string replay_manifest;
    auto* replay_cmd = app.add_subcommand("replay", "regenerate a dataset from its manifest");
    add_common(replay_cmd, c, false);
    replay_cmd->add_option("--manifest", replay_manifest, "manifest.json")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: Usage: " << e.what() << '\n';
        return 2;
    }

    if (*rapo_cmd) {
        if (rapo_n % 2 != 0) throw Error(ErrorKind::InvalidArgument, "--n-series must be even");
        const auto cfg = pipeline::rapo_config_from_json(config_or_empty(c.config));
        write_dataset(c.out, pipeline::generate_rapo_dataset(rapo_n / 2, c.seed, cfg, c.threads));
    } else if (*nisir_cmd) {
        std::vector<nisir::NoiseKind> kinds;
        if (noise_kind == "all") {
            kinds = {nisir::NoiseKind::White, nisir::NoiseKind::Env, nisir::NoiseKind::Dem};
        } else {
            std::stringstream ss(noise_kind);
            for (std::string part; std::getline(ss, part, ',');) kinds.push_back(nisir::parse_noise_kind(part));
        }
        const auto cfg = pipeline::nisir_config_from_json(config_or_empty(c.config));
        write_dataset(c.out, pipeline::generate_nisir_dataset(kinds, nisir_n, c.seed, cfg, c.threads));
    } else if (*testbed_cmd) {
        auto cfg = pipeline::testbed_config_from_json(config_or_empty(c.config));
        if (testbed_cmd->count("--n-series")) cfg.n_series = testbed_n;
        write_dataset(c.out, pipeline::generate_testbed_dataset(testbed::parse_model(model), c.seed, cfg, c.threads));
    } else if (*pre_cmd) {
        auto cfg = pipeline::preprocess_config_from_json(config_or_empty(c.config));
        if (pre_cmd->count("--max-censor")) cfg.max_censor = max_censor;
        if (pre_cmd->count("--span")) cfg.lowess.span = span;
        if (no_censor) cfg.apply_censor = false;
        write_dataset(c.out, pipeline::preprocess_dataset(read_dataset(pre_in), cfg, c.seed, c.threads));
    } else if (*split_cmd) {
        LabelList labels;
        json source = json::object();
        if (!split_in.empty()) {
            labels = read_labels(fs::path(split_in) / "labels.csv");
            source = source_summary(load_json((fs::path(split_in) / "manifest.json").string()));
        } else if (!split_labels.empty()) {
            labels = read_labels(split_labels);
        } else if (balanced > 0) {
            for (std::size_t i = 0; i < balanced; ++i) {
                char id[32];
                std::snprintf(id, sizeof(id), "s%09zu", i);
                labels.emplace_back(id, i % 2 == 0 ? BifurcationLabel::Transcritical : BifurcationLabel::Null);
            }
        } else {
            throw Error(ErrorKind::InvalidArgument, "split needs --in, --labels or --balanced");
        }
        const auto split = stratified_split(labels, parse_ratios(ratios_text), c.seed);
        if (!split.warning.empty()) std::cerr << "warning: " << split.warning << '\n';
        json out{{"seed", split.seed},
                 {"ratios", {split.ratios.train, split.ratios.val, split.ratios.test}},
                 {"counts", {{"train", split.train.size()}, {"val", split.val.size()}, {"test", split.test.size()}}},
                 {"train", split.train},
                 {"val", split.val},
                 {"test", split.test}};
        auto manifest = command_manifest("split");
        manifest["master_seed"] = c.seed;
        manifest["config"] = {{"ratios", ratios_text}};
        manifest["source"] = source;
        write_with_manifest(c.out, out.dump(2) + "\n", manifest);
        std::cout << "train " << split.train.size() << " val " << split.val.size() << " test " << split.test.size()
                  << '\n';
    } else if (*score_cmd) {
        auto ewi = pipeline::ewi_config_from_json(config_or_empty(c.config));
        if (score_cmd->count("--window-frac")) ewi.window_frac = window_frac;
        if (score_cmd->count("--indicator")) ewi.indicator = parse_indicator(indicator);
        LowessConfig lowess;
        if (score_cmd->count("--span")) lowess.span = span;
        const auto data = read_dataset(score_in);
        const auto preds = pipeline::score_dataset(data, ewi, lowess, c.threads);
        auto manifest = command_manifest("ewi-score");
        manifest["config"] = pipeline::to_json(ewi);
        manifest["config"]["lowess_span"] = lowess.span;
        manifest["config"]["lowess_robustness_iters"] = lowess.robustness_iters;
        manifest["config"]["detrended_here"] = !pipeline::is_preprocessed(data.manifest);
        manifest["source"] = source_summary(data.manifest);
        write_predictions(c.out, preds);
        write_file_atomically(manifest_path_for(c.out), manifest.dump(2) + "\n");
    } else if (*eval_cmd) {
        const auto preds = read_predictions(preds_path);
        const auto truth = load_truth(labels_path, dataset_dir);
        const auto m = confusion_metrics(preds, truth.labels, threshold);
        json out{{"threshold", threshold},
                 {"accuracy", m.accuracy},
                 {"f1", m.f1},
                 {"precision", m.precision},
                 {"recall", m.recall},
                 {"tp", m.tp},
                 {"fp", m.fp},
                 {"tn", m.tn},
                 {"fn", m.fn}};
        try {
            out["auc"] = roc_for(preds, truth).auc;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingleClass) throw;
            out["auc"] = nullptr;
        }
        if (eval_out.empty()) {
            std::cout << out.dump(2) << '\n';
        } else {
            auto manifest = command_manifest("evaluate");
            manifest["inputs"] = {{"preds", preds_path}, {"labels", labels_path}, {"dataset", dataset_dir}};
            write_with_manifest(eval_out, out.dump(2) + "\n", manifest);
        }
    } else if (*roc_cmd) {
        const auto preds = read_predictions(preds_path);
        const auto roc = roc_for(preds, load_truth(labels_path, dataset_dir));
        auto manifest = command_manifest("roc");
        manifest["inputs"] = {{"preds", preds_path}, {"labels", labels_path}, {"dataset", dataset_dir}};
        manifest["summary"] = roc_summary(roc);
        write_with_manifest(eval_out, roc_csv(roc), manifest);
        write_file_atomically(fs::path(eval_out).replace_extension(".svg"), roc_svg(roc));
        std::cout << "auc " << format_double(roc.auc) << '\n';
    } else if (*import_cmd) {
        Dataset data;
        data.series = import_empirical_csv(import_in, columns);
        // Segments differ in length; pad the tail with masked zeros.
        std::size_t longest = 0;
        for (const auto& ts : data.series) longest = std::max(longest, ts.size());
        for (auto& ts : data.series) {
            ts.meta["length"] = std::to_string(ts.size());
            ts.values.resize(longest, 0.0);
            ts.mask.resize(longest, false);
        }
        data.manifest = command_manifest("import");
        data.manifest["config"] = {{"path", import_in},
                                   {"date_column", columns.time_column},
                                   {"count_column", columns.count_column},
                                   {"group_column", columns.group_column},
                                   {"max_fill", columns.max_fill}};
        json entries = json::array();
        for (const auto& ts : data.series) {
            entries.push_back({{"id", ts.id}, {"label", std::string(to_string(ts.label))}});
        }
        data.manifest["series"] = entries;
        write_dataset(c.out, data);
    } else if (*replay_cmd) {
        const auto original = load_json(replay_manifest);
        write_dataset(c.out, pipeline::replay_manifest(original, c.threads));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ews::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << '\n';
    }
    return 1;
}
