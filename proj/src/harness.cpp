#include "fairbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fairbench/baselines.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t resolve_threads(std::size_t configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("FAIRBENCH_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) return static_cast<std::size_t>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void validate_methods(const std::vector<std::string>& methods) {
    if (methods.empty()) throw Error("experiment needs at least one method");
    for (const auto& method : methods) {
        if (std::find(kAllMethods.begin(), kAllMethods.end(), method) == kAllMethods.end())
            throw Error("unknown method: \"" + method + "\"");
    }
}

struct MethodResult {
    std::vector<int> predictions;
    double fr = 0.0;
    double wall_clock = 0.0;  // fit + mitigate + predict; evaluation excluded
};

PredictFn plain_predictor(const Learner& model) {
    return [&model](const Matrix& X) { return model.predict(X); };
}

// One full fit+mitigate+predict path for (method, protected attribute).
MethodResult run_method(const std::string& method, const SplitPair& pair,
                        const std::string& protected_name, const ExperimentConfig& config,
                        std::uint64_t seed) {
    const TabularDataset& train = pair.train;
    const TabularDataset& test = pair.test;
    MethodResult result;
    const auto start = Clock::now();

    if (method == "baseline_rf") {
        auto model = make_learner(config.classifier);
        model->fit(train.X, train.y, {}, derive_seed(seed, 1));
        result.predictions = model->predict(test.X);
        result.wall_clock = seconds_since(start);
        result.fr = flip_rate(plain_predictor(*model), test, protected_name);
    } else if (method == "random") {
        auto model = make_learner(config.classifier);
        model->fit(train.X, train.y, {}, derive_seed(seed, 1));
        const TabularDataset shuffled =
            random_shuffle_protected(test, protected_name, derive_seed(seed, 2));
        result.predictions = model->predict(shuffled.X);
        result.wall_clock = seconds_since(start);
        result.fr = flip_rate(plain_predictor(*model), shuffled, protected_name);
    } else if (method == "reweighing") {
        const std::vector<double> weights = reweigh(train, protected_name);
        auto model = make_learner(config.classifier);
        model->fit(train.X, train.y, weights, derive_seed(seed, 1));
        result.predictions = model->predict(test.X);
        result.wall_clock = seconds_since(start);
        result.fr = flip_rate(plain_predictor(*model), test, protected_name);
    } else if (method == "fair_smote") {
        FairSmoteConfig smote_config;
        smote_config.seed = derive_seed(seed, 3);
        TabularDataset balanced = fair_smote_balance(train, protected_name, smote_config);
        if (config.fair_smote_situation_filter)
            balanced = situation_testing_filter(balanced, protected_name, derive_seed(seed, 4),
                                                {.classifier = config.classifier});
        auto model = make_learner(config.classifier);
        model->fit(balanced.X, balanced.y, {}, derive_seed(seed, 1));
        result.predictions = model->predict(test.X);
        result.wall_clock = seconds_since(start);
        result.fr = flip_rate(plain_predictor(*model), test, protected_name);
    } else {
        throw Error("unknown method: \"" + method + "\"");
    }
    return result;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    const DatasetManifest manifest = load_manifest(config.manifest_path);
    const TabularDataset dataset = ingest(manifest);
    return run_experiment_on(dataset, config);
}

std::vector<RunRecord> run_experiment_on(const TabularDataset& dataset,
                                         const ExperimentConfig& config) {
    validate_methods(config.methods);
    if (config.repeats < 1) throw Error("repeats must be at least 1");

    std::vector<std::string> protected_names = config.protected_attrs;
    if (protected_names.empty()) protected_names = dataset.protected_names();
    if (protected_names.empty()) throw Error("dataset declares no protected attributes");
    for (const auto& name : protected_names) {
        if (!dataset.has_protected(name))
            throw Error("protected attribute \"" + name + "\" is not declared by the dataset");
    }

    const std::string dataset_name = dataset.manifest ? dataset.manifest->name : "dataset";
    std::vector<std::vector<RunRecord>> per_repeat(config.repeats);

    auto run_repeat = [&](std::size_t repeat) {
        const std::uint64_t seed = config.base_seed + repeat;
        const SplitPair pair = split(dataset, seed);
        std::vector<RunRecord>& records = per_repeat[repeat];

        auto make_record = [&](const std::string& method, const std::string& name,
                               const std::vector<int>& predictions, double fr,
                               double wall_clock) {
            RunRecord record;
            record.dataset = dataset_name;
            record.method = method;
            record.protected_attr = name;
            record.seed = seed;
            record.fairness = fairness_report(
                group_confusion(pair.test.y, predictions, pair.test.protected_values(name)), fr);
            record.performance = performance_report(pair.test.y, predictions);
            record.wall_clock_seconds = wall_clock;
            return record;
        };

        for (const std::string& method : config.methods) {
            try {
                if (method == "xfair") {
                    // One pipeline replaces every declared attribute (ensembles
                    // are per attribute); metrics are reported per attribute.
                    XFairConfig xfair_config;
                    xfair_config.classifier = config.classifier;
                    xfair_config.extrapolation = config.extrapolation;
                    xfair_config.budget = config.budget;
                    const auto start = Clock::now();
                    const XFairPipeline pipeline = XFairPipeline::build(
                        pair.train, protected_names, xfair_config, derive_seed(seed, 10));
                    const std::vector<int> predictions = pipeline.predict(pair.test);
                    const double elapsed = seconds_since(start);
                    for (const std::string& name : protected_names) {
                        const double fr = flip_rate(
                            [&pipeline](const Matrix& X) { return pipeline.predict(X); },
                            pair.test, name);
                        records.push_back(make_record(method, name, predictions, fr, elapsed));
                    }
                } else {
                    for (const std::string& name : protected_names) {
                        const MethodResult result = run_method(method, pair, name, config, seed);
                        records.push_back(make_record(method, name, result.predictions,
                                                      result.fr, result.wall_clock));
                    }
                }
            } catch (const Error& e) {
                throw Error(std::string(e.what()) + " [method " + method + ", seed " +
                            std::to_string(seed) + "]");
            }
        }
    };

    const std::size_t thread_count =
        std::min(resolve_threads(config.threads), config.repeats);
    if (thread_count <= 1) {
        for (std::size_t repeat = 0; repeat < config.repeats; ++repeat) run_repeat(repeat);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> failures(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) {
            workers.emplace_back([&, t] {
                try {
                    while (true) {
                        const std::size_t repeat = next.fetch_add(1);
                        if (repeat >= config.repeats) break;
                        run_repeat(repeat);
                    }
                } catch (...) {
                    failures[t] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (auto& failure : failures)
            if (failure) std::rethrow_exception(failure);
    }

    std::vector<RunRecord> records;
    for (auto& repeat_records : per_repeat)
        for (auto& record : repeat_records) records.push_back(std::move(record));
    // Deterministic file output regardless of thread interleaving.
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.protected_attr != b.protected_attr) return a.protected_attr < b.protected_attr;
        return a.seed < b.seed;
    });
    return records;
}

// ---------------------------------------------------------------------------

std::string format_double(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

namespace {

std::string format_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : "NA";
}

const std::vector<std::string> kMetricOrder = {"accuracy", "precision", "recall",      "f1",
                                               "aod",      "eod",       "spd",
                                               "di_deviation", "fr"};

bool metric_smaller_is_better(const std::string& metric) {
    return metric == "aod" || metric == "eod" || metric == "spd" ||
           metric == "di_deviation" || metric == "fr";
}

std::optional<double> metric_value(const RunRecord& record, const std::string& metric) {
    if (metric == "accuracy") return record.performance.accuracy;
    if (metric == "precision") return record.performance.precision;
    if (metric == "recall") return record.performance.recall;
    if (metric == "f1") return record.performance.f1;
    if (metric == "aod") return record.fairness.aod;
    if (metric == "eod") return record.fairness.eod;
    if (metric == "spd") return record.fairness.spd;
    if (metric == "di_deviation") return record.fairness.di_deviation;
    if (metric == "fr") return record.fairness.fr;
    throw Error("unknown metric: " + metric);
}

}  // namespace

Summary summarize(std::span<const RunRecord> records) {
    if (records.empty()) throw Error("summarize: no records");

    // Group by (dataset, protected attribute), then per metric by method.
    std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> blocks;
    for (const RunRecord& record : records)
        blocks[{record.dataset, record.protected_attr}].push_back(&record);

    Summary summary;
    for (const auto& [key, block] : blocks) {
        std::set<std::string> methods;
        for (const RunRecord* record : block) methods.insert(record->method);

        for (const std::string& metric : kMetricOrder) {
            std::vector<TreatmentSamples> treatments;
            std::vector<std::string> undefined_methods;
            for (const std::string& method : methods) {
                TreatmentSamples samples;
                samples.name = method;
                bool all_defined = true;
                for (const RunRecord* record : block) {
                    if (record->method != method) continue;
                    const auto value = metric_value(*record, metric);
                    if (!value) {
                        all_defined = false;
                        break;
                    }
                    samples.values.push_back(*value);
                }
                if (!all_defined) {
                    undefined_methods.push_back(method);
                    continue;
                }
                if (samples.values.size() < 2)
                    throw Error("summarize: method \"" + method +
                                "\" has fewer than 2 repeats for metric " + metric);
                treatments.push_back(std::move(samples));
            }

            RankAssignment assignment;
            if (!treatments.empty()) {
                if (metric_smaller_is_better(metric)) {
                    assignment = scott_knott_rank(treatments, true);
                } else {
                    std::vector<TreatmentSamples> negated = treatments;
                    for (auto& treatment : negated)
                        for (double& v : treatment.values) v = -v;
                    assignment = scott_knott_rank(negated, true);
                }
            }

            for (const auto& treatment : treatments) {
                SummaryRow row;
                row.dataset = key.first;
                row.protected_attr = key.second;
                row.metric = metric;
                row.method = treatment.name;
                row.median_value = median(treatment.values);
                row.rank = assignment.ranks.at(treatment.name);
                summary.rows.push_back(std::move(row));
            }
            for (const auto& method : undefined_methods) {
                SummaryRow row;
                row.dataset = key.first;
                row.protected_attr = key.second;
                row.metric = metric;
                row.method = method;
                summary.rows.push_back(std::move(row));
            }
        }
    }
    return summary;
}

double runtime_ratio(std::span<const RunRecord> records, std::string_view numerator,
                     std::string_view denominator) {
    std::vector<double> num_times, den_times;
    for (const RunRecord& record : records) {
        if (record.method == numerator) num_times.push_back(record.wall_clock_seconds);
        if (record.method == denominator) den_times.push_back(record.wall_clock_seconds);
    }
    if (num_times.empty())
        throw Error("runtime_ratio: no records for method \"" + std::string(numerator) + "\"");
    if (den_times.empty())
        throw Error("runtime_ratio: no records for method \"" + std::string(denominator) + "\"");
    return median(num_times) / median(den_times);
}

void export_fig_data(const XFairPipeline& pipeline, const TabularDataset& test,
                     const std::filesystem::path& out_path) {
    const RelabelRatioReport report = relabel_ratio_report(pipeline, test);
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write file: " + out_path.string());
    out << "ratio_kind,scope,value\n";
    out << "favorable,all," << format_optional(report.all_fav_ratio) << "\n";
    out << "favorable,flipped," << format_optional(report.flipped_fav_ratio) << "\n";
    out << "unfavorable,all," << format_optional(report.all_unfav_ratio) << "\n";
    out << "unfavorable,flipped," << format_optional(report.flipped_unfav_ratio) << "\n";
    if (!out) throw Error("failed writing file: " + out_path.string());
}

// ---------------------------------------------------------------------------

void write_results_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << "dataset,method,protected,seed,accuracy,precision,recall,f1,aod,eod,spd,"
           "di_deviation,fr,wall_clock_seconds\n";
    for (const RunRecord& record : records) {
        out << record.dataset << ',' << record.method << ',' << record.protected_attr << ','
            << record.seed << ',' << format_double(record.performance.accuracy) << ','
            << format_double(record.performance.precision) << ','
            << format_double(record.performance.recall) << ','
            << format_double(record.performance.f1) << ',' << format_optional(record.fairness.aod)
            << ',' << format_optional(record.fairness.eod) << ','
            << format_optional(record.fairness.spd) << ','
            << format_optional(record.fairness.di_deviation) << ','
            << format_double(record.fairness.fr) << ','
            << format_double(record.wall_clock_seconds) << '\n';
    }
}

namespace {

std::optional<double> parse_optional(const std::string& token, const std::string& column) {
    if (token == "NA") return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw Error("results csv: bad value for " + column + ": \"" + token + "\"");
    return value;
}

double parse_required(const std::string& token, const std::string& column) {
    const auto value = parse_optional(token, column);
    if (!value) throw Error("results csv: unexpected NA in column " + column);
    return *value;
}

}  // namespace

std::vector<RunRecord> read_results_csv(const std::filesystem::path& path) {
    const RawTable table = read_csv(path);
    const std::vector<std::string> expected = {
        "dataset", "method", "protected", "seed", "accuracy", "precision", "recall",
        "f1",      "aod",    "eod",       "spd",  "di_deviation", "fr", "wall_clock_seconds"};
    if (table.columns != expected) throw Error("results csv has unexpected columns");

    std::vector<RunRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        RunRecord record;
        record.dataset = row[0];
        record.method = row[1];
        record.protected_attr = row[2];
        record.seed = static_cast<std::uint64_t>(
            std::strtoull(row[3].c_str(), nullptr, 10));
        record.performance.accuracy = parse_required(row[4], "accuracy");
        record.performance.precision = parse_required(row[5], "precision");
        record.performance.recall = parse_required(row[6], "recall");
        record.performance.f1 = parse_required(row[7], "f1");
        record.fairness.aod = parse_optional(row[8], "aod");
        record.fairness.eod = parse_optional(row[9], "eod");
        record.fairness.spd = parse_optional(row[10], "spd");
        record.fairness.di_deviation = parse_optional(row[11], "di_deviation");
        record.fairness.fr = parse_required(row[12], "fr");
        record.wall_clock_seconds = parse_required(row[13], "wall_clock_seconds");
        records.push_back(std::move(record));
    }
    return records;
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
    out << "dataset,protected,metric,method,median,rank\n";
    for (const SummaryRow& row : summary.rows) {
        out << row.dataset << ',' << row.protected_attr << ',' << row.metric << ',' << row.method
            << ',' << format_optional(row.median_value) << ','
            << (row.rank ? std::to_string(*row.rank) : "NA") << '\n';
    }
}

std::string render_summary_table(const Summary& summary) {
    // One block per (dataset, protected attribute): methods x metrics with
    // "median (rank)" cells.
    std::map<std::pair<std::string, std::string>, std::vector<const SummaryRow*>> blocks;
    for (const SummaryRow& row : summary.rows)
        blocks[{row.dataset, row.protected_attr}].push_back(&row);

    std::ostringstream os;
    for (const auto& [key, rows] : blocks) {
        std::set<std::string> methods;
        for (const SummaryRow* row : rows) methods.insert(row->method);

        os << "dataset: " << key.first << "    protected: " << key.second << "\n";
        os << std::left << std::setw(14) << "method";
        for (const auto& metric : kMetricOrder) os << std::right << std::setw(14) << metric;
        os << "\n";
        for (const auto& method : methods) {
            os << std::left << std::setw(14) << method;
            for (const auto& metric : kMetricOrder) {
                std::string cell = "-";
                for (const SummaryRow* row : rows) {
                    if (row->method != method || row->metric != metric) continue;
                    if (row->median_value) {
                        std::ostringstream value;
                        value << std::fixed << std::setprecision(3) << *row->median_value;
                        cell = value.str() + " (" + std::to_string(row->rank.value_or(0)) + ")";
                    } else {
                        cell = "NA";
                    }
                }
                os << std::right << std::setw(14) << cell;
            }
            os << "\n";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace fairbench
