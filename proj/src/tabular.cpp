#include "fairbench/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

namespace {

bool is_missing(const std::string& value) {
    return value.empty() || value == "?";
}

double parse_number(const std::string& token, const std::string& column) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw Error("numeric column \"" + column + "\" contains non-numeric value \"" + token +
                    "\"");
    return value;
}

std::string json_string(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) throw Error(std::string("manifest is missing field \"") + key + "\"");
    if (!doc[key].is_string())
        throw Error(std::string("manifest field \"") + key + "\" must be a string");
    return doc[key].get<std::string>();
}

std::vector<std::string> json_string_list(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) throw Error(std::string("manifest is missing field \"") + key + "\"");
    if (!doc[key].is_array())
        throw Error(std::string("manifest field \"") + key + "\" must be an array");
    std::vector<std::string> out;
    for (const auto& item : doc[key]) {
        if (!item.is_string())
            throw Error(std::string("manifest field \"") + key + "\" must contain strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

const ProtectedSpec* DatasetManifest::find_protected(std::string_view column) const {
    for (const auto& spec : protected_specs)
        if (spec.column == column) return &spec;
    return nullptr;
}

std::size_t TabularDataset::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return i;
    throw Error("feature not found: " + std::string(name));
}

bool TabularDataset::has_protected(std::string_view name) const {
    for (const auto& [attr, values] : protected_attrs)
        if (attr == name) return true;
    return false;
}

const std::vector<int>& TabularDataset::protected_values(std::string_view name) const {
    for (const auto& [attr, values] : protected_attrs)
        if (attr == name) return values;
    throw Error("protected attribute not found: " + std::string(name));
}

std::vector<std::string> TabularDataset::protected_names() const {
    std::vector<std::string> names;
    names.reserve(protected_attrs.size());
    for (const auto& [attr, values] : protected_attrs) names.push_back(attr);
    return names;
}

std::vector<std::size_t> TabularDataset::nonprotected_columns() const {
    std::unordered_set<std::string> prot;
    for (const auto& [attr, values] : protected_attrs) prot.insert(attr);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (!prot.contains(feature_names[i])) cols.push_back(i);
    return cols;
}

DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("manifest is not valid JSON: ") + e.what());
    }
    DatasetManifest manifest;
    manifest.name = json_string(doc, "name");
    manifest.csv_path = json_string(doc, "csv_path");
    manifest.label_column = json_string(doc, "label_column");
    manifest.favorable_value = json_string(doc, "favorable_value");
    manifest.categorical_columns = json_string_list(doc, "categorical_columns");
    manifest.numeric_columns = json_string_list(doc, "numeric_columns");
    if (!doc.contains("protected_specs") || !doc["protected_specs"].is_array())
        throw Error("manifest field \"protected_specs\" must be an array");
    for (const auto& item : doc["protected_specs"]) {
        ProtectedSpec spec;
        spec.column = json_string(item, "column");
        spec.privileged_value = json_string(item, "privileged_value");
        manifest.protected_specs.push_back(std::move(spec));
    }
    if (manifest.protected_specs.empty())
        throw Error("manifest field \"protected_specs\" must not be empty");
    if (!base_dir.empty()) {
        std::filesystem::path csv(manifest.csv_path);
        if (csv.is_relative()) manifest.csv_path = (base_dir / csv).string();
    }
    return manifest;
}

void validate_manifest(const DatasetManifest& manifest,
                       const std::vector<std::string>& csv_header) {
    std::unordered_set<std::string> header(csv_header.begin(), csv_header.end());
    if (!header.contains(manifest.label_column))
        throw Error("label column not found in CSV header: \"" + manifest.label_column + "\"");
    for (const auto& spec : manifest.protected_specs) {
        if (!header.contains(spec.column))
            throw Error("protected column not found in CSV header: \"" + spec.column + "\"");
        if (spec.column == manifest.label_column)
            throw Error("protected column \"" + spec.column + "\" is the label column");
    }
    std::unordered_set<std::string> categorical(manifest.categorical_columns.begin(),
                                                manifest.categorical_columns.end());
    std::unordered_set<std::string> numeric(manifest.numeric_columns.begin(),
                                            manifest.numeric_columns.end());
    for (const auto& column : manifest.categorical_columns) {
        if (!header.contains(column))
            throw Error("categorical column not found in CSV header: \"" + column + "\"");
        if (numeric.contains(column))
            throw Error("column \"" + column + "\" is declared both categorical and numeric");
        if (column == manifest.label_column)
            throw Error("label column \"" + column + "\" must not be listed as a feature");
    }
    for (const auto& column : manifest.numeric_columns) {
        if (!header.contains(column))
            throw Error("numeric column not found in CSV header: \"" + column + "\"");
        if (column == manifest.label_column)
            throw Error("label column \"" + column + "\" must not be listed as a feature");
    }
    for (const auto& column : csv_header) {
        if (column == manifest.label_column) continue;
        if (!categorical.contains(column) && !numeric.contains(column))
            throw Error("column \"" + column +
                        "\" is neither categorical nor numeric in the manifest");
    }
    for (const auto& spec : manifest.protected_specs) {
        if (!categorical.contains(spec.column) && !numeric.contains(spec.column))
            throw Error("protected column \"" + spec.column +
                        "\" must be listed as categorical or numeric");
    }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    DatasetManifest manifest = parse_manifest(buffer.str(), path.parent_path());
    validate_manifest(manifest, read_csv_header(manifest.csv_path));
    return manifest;
}

namespace {

struct ColumnPlan {
    enum class Kind { Protected, Numeric, Categorical };
    Kind kind;
    std::size_t raw_index;
    std::string name;
    std::string privileged_value;  // Protected only
};

// Header-ordered encoding plan for all non-label columns.
std::vector<ColumnPlan> make_plan(const RawTable& table, const DatasetManifest& manifest) {
    std::unordered_set<std::string> numeric(manifest.numeric_columns.begin(),
                                            manifest.numeric_columns.end());
    std::vector<ColumnPlan> plan;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const std::string& name = table.columns[c];
        if (name == manifest.label_column) continue;
        ColumnPlan item;
        item.raw_index = c;
        item.name = name;
        if (const ProtectedSpec* spec = manifest.find_protected(name)) {
            item.kind = ColumnPlan::Kind::Protected;
            item.privileged_value = spec->privileged_value;
        } else if (numeric.contains(name)) {
            item.kind = ColumnPlan::Kind::Numeric;
        } else {
            item.kind = ColumnPlan::Kind::Categorical;
        }
        plan.push_back(std::move(item));
    }
    return plan;
}

}  // namespace

TabularDataset encode_table(std::shared_ptr<const RawTable> table,
                            std::shared_ptr<const DatasetManifest> manifest,
                            const TabularDataset* fit_encoding_on) {
    const RawTable& raw = *table;
    const DatasetManifest& spec = *manifest;
    validate_manifest(spec, raw.columns);

    // Drop rows with missing values in any declared column.
    std::vector<std::size_t> keep;
    keep.reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        bool ok = true;
        for (const auto& value : raw.rows[r]) {
            if (is_missing(value)) {
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(r);
    }
    const std::size_t dropped = raw.rows.size() - keep.size();
    if (dropped > 0)
        std::cerr << "fairbench: dataset \"" << spec.name << "\": dropped " << dropped
                  << " rows with missing values\n";

    std::shared_ptr<const RawTable> retained = table;
    if (dropped > 0) {
        auto cleaned = std::make_shared<RawTable>();
        cleaned->columns = raw.columns;
        cleaned->rows.reserve(keep.size());
        for (std::size_t r : keep) cleaned->rows.push_back(raw.rows[r]);
        retained = cleaned;
    }
    const auto& rows = retained->rows;
    const std::size_t n = rows.size();

    TabularDataset ds;
    ds.raw = retained;
    ds.manifest = manifest;

    const std::size_t label_index = retained->column_index(spec.label_column);
    ds.y.resize(n);
    for (std::size_t r = 0; r < n; ++r)
        ds.y[r] = rows[r][label_index] == spec.favorable_value ? 1 : 0;

    const std::vector<ColumnPlan> plan = make_plan(*retained, spec);

    // Pass 1: feature layout (category sets / scale stats, fit or reused).
    for (const auto& item : plan) {
        switch (item.kind) {
            case ColumnPlan::Kind::Protected: {
                ds.feature_names.push_back(item.name);
                break;
            }
            case ColumnPlan::Kind::Numeric: {
                NumericScale scale;
                scale.column = item.name;
                scale.column_index = ds.feature_names.size();
                if (fit_encoding_on != nullptr) {
                    bool found = false;
                    for (const auto& s : fit_encoding_on->scaling_map) {
                        if (s.column == item.name) {
                            scale.min = s.min;
                            scale.max = s.max;
                            found = true;
                            break;
                        }
                    }
                    if (!found)
                        throw Error("reused encoding has no scale for column \"" + item.name +
                                    "\"");
                } else {
                    double lo = 0.0, hi = 0.0;
                    for (std::size_t r = 0; r < n; ++r) {
                        double v = parse_number(rows[r][item.raw_index], item.name);
                        if (r == 0) {
                            lo = hi = v;
                        } else {
                            lo = std::min(lo, v);
                            hi = std::max(hi, v);
                        }
                    }
                    scale.min = lo;
                    scale.max = hi;
                }
                ds.feature_names.push_back(item.name);
                ds.scaling_map.push_back(std::move(scale));
                break;
            }
            case ColumnPlan::Kind::Categorical: {
                OneHotGroup group;
                group.column = item.name;
                if (fit_encoding_on != nullptr) {
                    bool found = false;
                    for (const auto& g : fit_encoding_on->encoding_map) {
                        if (g.column == item.name) {
                            group.categories = g.categories;
                            found = true;
                            break;
                        }
                    }
                    if (!found)
                        throw Error("reused encoding has no one-hot group for column \"" +
                                    item.name + "\"");
                } else {
                    std::set<std::string> values;
                    for (std::size_t r = 0; r < n; ++r) values.insert(rows[r][item.raw_index]);
                    group.categories.assign(values.begin(), values.end());
                }
                for (const auto& category : group.categories) {
                    group.column_indices.push_back(ds.feature_names.size());
                    ds.feature_names.push_back(item.name + "=" + category);
                }
                ds.encoding_map.push_back(std::move(group));
                break;
            }
        }
    }

    // Pass 2: fill the matrix and the protected vectors.
    ds.X = Matrix(n, ds.feature_names.size());
    std::size_t scale_cursor = 0, group_cursor = 0;
    std::size_t feature_cursor = 0;
    for (const auto& item : plan) {
        switch (item.kind) {
            case ColumnPlan::Kind::Protected: {
                std::vector<int> values(n);
                for (std::size_t r = 0; r < n; ++r) {
                    int v = rows[r][item.raw_index] == item.privileged_value ? 1 : 0;
                    values[r] = v;
                    ds.X(r, feature_cursor) = static_cast<double>(v);
                }
                ds.protected_attrs.emplace_back(item.name, std::move(values));
                ++feature_cursor;
                break;
            }
            case ColumnPlan::Kind::Numeric: {
                const NumericScale& scale = ds.scaling_map[scale_cursor++];
                const double range = scale.max - scale.min;
                for (std::size_t r = 0; r < n; ++r) {
                    double v = parse_number(rows[r][item.raw_index], item.name);
                    double scaled = range == 0.0 ? 0.0 : (v - scale.min) / range;
                    ds.X(r, feature_cursor) = std::clamp(scaled, 0.0, 1.0);
                }
                ++feature_cursor;
                break;
            }
            case ColumnPlan::Kind::Categorical: {
                const OneHotGroup& group = ds.encoding_map[group_cursor++];
                for (std::size_t r = 0; r < n; ++r) {
                    const std::string& value = rows[r][item.raw_index];
                    auto it = std::lower_bound(group.categories.begin(), group.categories.end(),
                                               value);
                    if (it != group.categories.end() && *it == value) {
                        std::size_t offset =
                            static_cast<std::size_t>(it - group.categories.begin());
                        ds.X(r, group.column_indices[offset]) = 1.0;
                    }
                    // Unseen category: the whole group stays zero.
                }
                feature_cursor += group.categories.size();
                break;
            }
        }
    }

    // Protected specs must stay in manifest declaration order.
    std::vector<std::pair<std::string, std::vector<int>>> ordered;
    for (const auto& p : spec.protected_specs) {
        for (auto& attr : ds.protected_attrs) {
            if (attr.first == p.column) {
                ordered.push_back(std::move(attr));
                break;
            }
        }
    }
    ds.protected_attrs = std::move(ordered);
    return ds;
}

TabularDataset ingest(const DatasetManifest& manifest, const TabularDataset* fit_encoding_on) {
    auto table = std::make_shared<RawTable>(read_csv(manifest.csv_path));
    return encode_table(std::move(table), std::make_shared<DatasetManifest>(manifest),
                        fit_encoding_on);
}

SplitPair split(const TabularDataset& dataset, std::uint64_t seed) {
    if (dataset.rows() < 10) throw Error("split requires at least 10 rows");
    if (!dataset.raw || !dataset.manifest)
        throw Error("split requires a dataset with retained source rows");

    Rng rng(seed);
    std::vector<std::size_t> order = rng.permutation(dataset.rows());
    const std::size_t train_count = dataset.rows() * 8 / 10;

    auto subset = [&](std::size_t begin, std::size_t end) {
        auto table = std::make_shared<RawTable>();
        table->columns = dataset.raw->columns;
        table->rows.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            table->rows.push_back(dataset.raw->rows[order[i]]);
        return table;
    };

    SplitPair pair;
    pair.seed = seed;
    pair.train = encode_table(subset(0, train_count), dataset.manifest);
    pair.test = encode_table(subset(train_count, dataset.rows()), dataset.manifest, &pair.train);
    return pair;
}

}  // namespace fairbench
