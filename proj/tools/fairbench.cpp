#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairbench/baselines.hpp"
#include "fairbench/error.hpp"
#include "fairbench/harness.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/tabular.hpp"
#include "fairbench/xfair.hpp"

namespace fs = std::filesystem;
using namespace fairbench;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path.string());
    out << contents;
}

std::string explanation_text(const Explanation& explanation) {
    std::ostringstream os;
    if (!explanation.target.empty())
        os << "extrapolation target: " << explanation.target
           << " (1 = privileged, 0 = unprivileged)\n";
    os << (explanation.kind == Explanation::Kind::Coefficients
               ? "logistic regression coefficients (by |coefficient|):\n"
               : "decision tree rules (by training support):\n");
    for (const auto& entry : explanation.entries) {
        if (explanation.kind == Explanation::Kind::Coefficients) {
            os << "  " << entry.description << ": " << format_double(entry.value) << "\n";
        } else {
            os << "  [support " << static_cast<long long>(entry.value) << "] "
               << entry.description << "\n";
        }
    }
    return os.str();
}

nlohmann::json explanation_json(const Explanation& explanation) {
    nlohmann::json doc;
    doc["target"] = explanation.target;
    doc["kind"] = explanation.kind == Explanation::Kind::Coefficients ? "coefficients"
                                                                      : "rule_list";
    doc["entries"] = nlohmann::json::array();
    for (const auto& entry : explanation.entries)
        doc["entries"].push_back({{"description", entry.description}, {"value", entry.value}});
    return doc;
}

int cmd_run(const std::string& manifest, const std::string& protected_csv,
            const std::string& methods_csv, std::size_t repeats, std::uint64_t seed,
            const std::string& classifier, const std::string& extrapolation, std::size_t budget,
            const std::string& out_dir, bool situation_filter) {
    ExperimentConfig config;
    config.manifest_path = manifest;
    config.protected_attrs = split_list(protected_csv);
    if (!methods_csv.empty()) config.methods = split_list(methods_csv);
    config.repeats = repeats;
    config.base_seed = seed;
    config.classifier = learner_kind_from_string(classifier);
    config.extrapolation = learner_kind_from_string(extrapolation);
    config.budget = budget;
    config.output_dir = out_dir;
    config.fair_smote_situation_filter = situation_filter;

    const std::vector<RunRecord> records = run_experiment(config);
    const Summary summary = summarize(records);

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "results.csv");
        if (!out) throw Error("cannot write results.csv in " + out_dir);
        write_results_csv(out, records);
    }
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv");
        if (!out) throw Error("cannot write summary.csv in " + out_dir);
        write_summary_csv(out, summary);
    }
    const std::string table = render_summary_table(summary);
    write_file(fs::path(out_dir) / "summary.txt", table);
    std::cout << table;
    std::cout << "wrote " << records.size() << " run records to " << out_dir << "/results.csv\n";
    return 0;
}

int cmd_rank(const std::string& results_path, const std::string& out_dir) {
    const std::vector<RunRecord> records = read_results_csv(results_path);
    const Summary summary = summarize(records);
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv");
        if (!out) throw Error("cannot write summary.csv in " + out_dir);
        write_summary_csv(out, summary);
    }
    const std::string table = render_summary_table(summary);
    write_file(fs::path(out_dir) / "summary.txt", table);
    std::cout << table;
    return 0;
}

int cmd_explain(const std::string& manifest_path, const std::string& protected_name,
                const std::string& extrapolation, std::uint64_t seed, std::size_t budget,
                bool as_json) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const TabularDataset dataset = ingest(manifest);
    const ExtrapolationEnsemble ensemble = build_ensemble(
        dataset, protected_name, learner_kind_from_string(extrapolation), budget, seed);
    const Explanation explanation = explain_bias(ensemble);
    if (as_json) std::cout << explanation_json(explanation).dump(2) << "\n";
    else std::cout << explanation_text(explanation);
    return 0;
}

int cmd_figdata(const std::string& manifest_path, const std::string& protected_name,
                std::uint64_t seed, const std::string& out_path) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const TabularDataset dataset = ingest(manifest);
    const SplitPair pair = split(dataset, seed);
    const std::vector<std::string> names = {protected_name};
    const XFairPipeline pipeline = XFairPipeline::build(pair.train, names, {}, seed);
    export_fig_data(pipeline, pair.test, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_synth(std::size_t rows, double bias, std::uint64_t seed, const std::string& out_prefix) {
    SynthSpec spec{rows, bias, seed};
    const RawTable table = synth_raw_table(spec);

    const fs::path csv_path = out_prefix + ".csv";
    const fs::path manifest_path = out_prefix + ".json";
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());

    {
        std::ofstream out(csv_path);
        if (!out) throw Error("cannot write file: " + csv_path.string());
        write_csv(out, table);
    }

    const DatasetManifest manifest = synth_manifest(csv_path.filename().string());
    nlohmann::json doc;
    doc["name"] = manifest.name;
    doc["csv_path"] = manifest.csv_path;
    doc["label_column"] = manifest.label_column;
    doc["favorable_value"] = manifest.favorable_value;
    doc["protected_specs"] = nlohmann::json::array();
    for (const auto& spec_item : manifest.protected_specs)
        doc["protected_specs"].push_back(
            {{"column", spec_item.column}, {"privileged_value", spec_item.privileged_value}});
    doc["categorical_columns"] = manifest.categorical_columns;
    doc["numeric_columns"] = manifest.numeric_columns;
    write_file(manifest_path, doc.dump(2) + "\n");

    std::cout << "wrote " << csv_path.string() << " and " << manifest_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairbench: bias mitigation benchmark toolkit"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run the benchmark rig on a dataset");
    std::string run_manifest, run_protected, run_methods, run_out = "out";
    std::string run_classifier = "rf", run_extrapolation = "cart";
    std::size_t run_repeats = 20, run_budget = 5;
    std::uint64_t run_seed = 0;
    bool run_situation = false;
    run->add_option("--manifest", run_manifest, "dataset manifest path")->required();
    run->add_option("--protected", run_protected,
                    "protected attribute name(s), comma separated (default: all declared)");
    run->add_option("--methods", run_methods,
                    "subset of baseline_rf,random,reweighing,fair_smote,xfair");
    run->add_option("--repeats", run_repeats, "number of seeded repeats");
    run->add_option("--seed", run_seed, "base seed; repeat i uses base+i");
    run->add_option("--classifier", run_classifier, "classification model: rf|cart|lr|nb");
    run->add_option("--extrapolation", run_extrapolation, "extrapolation model: cart|lr");
    run->add_option("--budget", run_budget, "extrapolation models per ensemble");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--fair-smote-situation", run_situation,
                  "enable the situation-testing removal stage in fair_smote");

    // rank
    auto* rank = app.add_subcommand("rank", "recompute summary tables from a results.csv");
    std::string rank_results, rank_out = "out";
    rank->add_option("--results", rank_results, "path to results.csv")->required();
    rank->add_option("--out", rank_out, "output directory");

    // explain
    auto* explain = app.add_subcommand("explain", "explain the cause of bias in a dataset");
    std::string explain_manifest, explain_protected, explain_extrapolation = "cart";
    std::uint64_t explain_seed = 0;
    std::size_t explain_budget = 5;
    bool explain_json = false;
    explain->add_option("--manifest", explain_manifest, "dataset manifest path")->required();
    explain->add_option("--protected", explain_protected, "protected attribute name")->required();
    explain->add_option("--extrapolation", explain_extrapolation,
                        "extrapolation model: cart|lr");
    explain->add_option("--seed", explain_seed, "seed");
    explain->add_option("--budget", explain_budget, "extrapolation models per ensemble");
    explain->add_flag("--json", explain_json, "emit JSON instead of plain text");

    // figdata
    auto* figdata = app.add_subcommand("figdata",
                                       "export favorable/unfavorable relabel ratio data");
    std::string fig_manifest, fig_protected, fig_out = "figdata.csv";
    std::uint64_t fig_seed = 0;
    figdata->add_option("--manifest", fig_manifest, "dataset manifest path")->required();
    figdata->add_option("--protected", fig_protected, "protected attribute name")->required();
    figdata->add_option("--seed", fig_seed, "split seed");
    figdata->add_option("--out", fig_out, "output CSV path");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
    std::size_t synth_rows = 1000;
    double synth_bias = 0.4;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "synth";
    synth->add_option("--rows", synth_rows, "number of rows (>= 20)");
    synth->add_option("--bias", synth_bias, "bias strength in [0, 1]");
    synth->add_option("--seed", synth_seed, "seed");
    synth->add_option("--out", synth_out, "output path prefix (writes <prefix>.csv/.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return cmd_run(run_manifest, run_protected, run_methods, run_repeats, run_seed,
                           run_classifier, run_extrapolation, run_budget, run_out,
                           run_situation);
        if (app.got_subcommand(rank)) return cmd_rank(rank_results, rank_out);
        if (app.got_subcommand(explain))
            return cmd_explain(explain_manifest, explain_protected, explain_extrapolation,
                               explain_seed, explain_budget, explain_json);
        if (app.got_subcommand(figdata))
            return cmd_figdata(fig_manifest, fig_protected, fig_seed, fig_out);
        if (app.got_subcommand(synth))
            return cmd_synth(synth_rows, synth_bias, synth_seed, synth_out);
    } catch (const Error& e) {
        std::cerr << "fairbench: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fairbench: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
