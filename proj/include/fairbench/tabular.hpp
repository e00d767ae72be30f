#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairbench/csv.hpp"
#include "fairbench/matrix.hpp"

namespace fairbench {

struct ProtectedSpec {
    std::string column;
    std::string privileged_value;
};

/// Dataset description: which CSV to read and how to interpret its columns.
struct DatasetManifest {
    std::string name;
    std::string csv_path;  // resolved against the manifest's directory on load
    std::string label_column;
    std::string favorable_value;  // raw CSV value mapped to label 1
    std::vector<ProtectedSpec> protected_specs;
    std::vector<std::string> categorical_columns;
    std::vector<std::string> numeric_columns;

    const ProtectedSpec* find_protected(std::string_view column) const;
};

/// One original categorical column and the one-hot block it expanded into.
struct OneHotGroup {
    std::string column;
    std::vector<std::string> categories;     // sorted; parallel to column_indices
    std::vector<std::size_t> column_indices; // into the encoded feature matrix
};

/// Min-max statistics (from the fitting data) for one numeric column.
struct NumericScale {
    std::string column;
    std::size_t column_index;
    double min = 0.0;
    double max = 0.0;
};

/// Encoded dataset: features in [0,1], binary labels, binarized protected
/// attributes (1 = privileged). Protected columns are also feature columns.
/// Immutable by convention once built; operations return new datasets.
struct TabularDataset {
    std::vector<std::string> feature_names;
    Matrix X;
    std::vector<int> y;
    // Ordered as declared in the manifest; name -> 0/1 per row.
    std::vector<std::pair<std::string, std::vector<int>>> protected_attrs;
    std::vector<OneHotGroup> encoding_map;
    std::vector<NumericScale> scaling_map;

    // Retained source rows; lets split() refit encodings on the train side.
    std::shared_ptr<const RawTable> raw;
    std::shared_ptr<const DatasetManifest> manifest;

    std::size_t rows() const { return X.rows(); }
    std::size_t feature_index(std::string_view name) const;
    bool has_protected(std::string_view name) const;
    const std::vector<int>& protected_values(std::string_view name) const;
    std::vector<std::string> protected_names() const;
    /// Feature columns that are not any declared protected attribute.
    std::vector<std::size_t> nonprotected_columns() const;
};

struct SplitPair {
    TabularDataset train;
    TabularDataset test;
    std::uint64_t seed = 0;
};

/// Parse and validate a manifest document (JSON). Validation reads the CSV
/// header, so the data file must exist.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(std::string_view json_text,
                               const std::filesystem::path& base_dir = {});

/// Check column references, coverage and disjointness against a header.
void validate_manifest(const DatasetManifest& manifest,
                       const std::vector<std::string>& csv_header);

/// Encode a CSV per its manifest. Rows missing a value in any declared column
/// are dropped (count reported on stderr). When `fit_encoding_on` is given its
/// encoding and scaling maps are reused instead of being refit (the test-time
/// path); numeric values are then clipped to [0,1] and categories unseen by
/// the fit become all-zero one-hot groups.
TabularDataset ingest(const DatasetManifest& manifest,
                      const TabularDataset* fit_encoding_on = nullptr);

/// Encode an in-memory table (used by ingest, split and synth_dataset).
TabularDataset encode_table(std::shared_ptr<const RawTable> table,
                            std::shared_ptr<const DatasetManifest> manifest,
                            const TabularDataset* fit_encoding_on = nullptr);

/// Seeded 80/20 split: uniform permutation, first floor(0.8 n) rows train.
/// Encoding and scaling are refit on the train rows and applied to test.
SplitPair split(const TabularDataset& dataset, std::uint64_t seed);

struct SynthSpec {
    std::size_t rows = 0;
    double bias_strength = 0.0;  // in [0,1]: favorable-rate gap between groups
    std::uint64_t seed = 0;
};

/// Synthetic benchmark data: one protected attribute ("group", privileged
/// value "priv"), binary label ("outcome", favorable "yes"), four numeric and
/// two categorical features correlated with the protected attribute.
TabularDataset synth_dataset(const SynthSpec& spec);

/// The raw table behind synth_dataset (written out by `fairbench synth`).
RawTable synth_raw_table(const SynthSpec& spec);

/// Manifest matching synth_raw_table, with csv_path set to `csv_path`.
DatasetManifest synth_manifest(std::string csv_path);

}  // namespace fairbench
