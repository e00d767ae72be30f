#include "fairbench/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"
#include "fairbench/smote.hpp"

namespace fairbench {

namespace {

const char* subgroup_name(int s, int y) {
    if (s == 1) return y == 1 ? "(privileged, favorable)" : "(privileged, unfavorable)";
    return y == 1 ? "(unprivileged, favorable)" : "(unprivileged, unfavorable)";
}

}  // namespace

SubgroupCounts subgroup_counts(const TabularDataset& train, std::string_view protected_name) {
    const std::vector<int>& pa = train.protected_values(protected_name);
    SubgroupCounts out;
    for (std::size_t r = 0; r < train.rows(); ++r) ++out.counts[pa[r]][train.y[r]];
    return out;
}

std::vector<double> reweigh(const TabularDataset& train, std::string_view protected_name) {
    const SubgroupCounts groups = subgroup_counts(train, protected_name);
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y)
            if (groups.counts[s][y] == 0)
                throw Error(std::string("reweigh: empty subgroup ") + subgroup_name(s, y));

    const double n = static_cast<double>(train.rows());
    const double n_s[2] = {static_cast<double>(groups.counts[0][0] + groups.counts[0][1]),
                           static_cast<double>(groups.counts[1][0] + groups.counts[1][1])};
    const double n_y[2] = {static_cast<double>(groups.counts[0][0] + groups.counts[1][0]),
                           static_cast<double>(groups.counts[0][1] + groups.counts[1][1])};

    double weight_table[2][2];
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y)
            weight_table[s][y] =
                n_s[s] * n_y[y] / (n * static_cast<double>(groups.counts[s][y]));

    const std::vector<int>& pa = train.protected_values(protected_name);
    std::vector<double> weights(train.rows());
    for (std::size_t r = 0; r < train.rows(); ++r)
        weights[r] = weight_table[pa[r]][train.y[r]];
    return weights;
}

TabularDataset fair_smote_balance(const TabularDataset& train, std::string_view protected_name,
                                  const FairSmoteConfig& config) {
    if (config.cr <= 0.0 || config.cr > 1.0)
        throw Error("fair_smote: cr must lie in (0, 1]");
    if (config.f <= 0.0 || config.f > 2.0) throw Error("fair_smote: f must lie in (0, 2]");
    if (config.k_neighbors < 1) throw Error("fair_smote: k_neighbors must be at least 1");

    const std::vector<int>& pa = train.protected_values(protected_name);
    std::vector<std::size_t> members[2][2];
    for (std::size_t r = 0; r < train.rows(); ++r)
        members[pa[r]][train.y[r]].push_back(r);

    std::size_t target = 0;
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < 2; ++y) {
            if (members[s][y].empty())
                throw Error(std::string("fair_smote: empty subgroup ") + subgroup_name(s, y));
            target = std::max(target, members[s][y].size());
        }

    TabularDataset out = train;
    // Synthesized rows have no raw-table counterpart.
    out.raw.reset();
    out.manifest.reset();

    Rng rng(config.seed);
    const std::size_t pa_column = train.feature_index(protected_name);
    std::vector<double> synthetic(train.X.cols());
    std::vector<std::pair<double, std::size_t>> distances;

    for (int s = 0; s < 2; ++s) {
        for (int y = 0; y < 2; ++y) {
            const auto& rows = members[s][y];
            const std::size_t need = target - rows.size();
            if (need == 0) continue;
            if (rows.size() < 3)
                throw Error(std::string("fair_smote: subgroup ") + subgroup_name(s, y) +
                            " has fewer than 3 rows");
            // Pool of at least 2 so a and b can be distinct members.
            const std::size_t k = std::min<std::size_t>(
                std::max<std::size_t>(config.k_neighbors, 2), rows.size() - 1);

            // k nearest neighbours inside the subgroup, per member.
            std::vector<std::vector<std::size_t>> pools(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                distances.clear();
                auto a = train.X.row(rows[i]);
                for (std::size_t j = 0; j < rows.size(); ++j) {
                    if (j == i) continue;
                    auto b = train.X.row(rows[j]);
                    double d2 = 0.0;
                    for (std::size_t c = 0; c < a.size(); ++c) {
                        const double diff = a[c] - b[c];
                        d2 += diff * diff;
                    }
                    distances.emplace_back(d2, rows[j]);
                }
                std::partial_sort(distances.begin(),
                                  distances.begin() + static_cast<std::ptrdiff_t>(k),
                                  distances.end());
                pools[i].reserve(k);
                for (std::size_t t = 0; t < k; ++t) pools[i].push_back(distances[t].second);
            }

            for (std::size_t t = 0; t < need; ++t) {
                const std::size_t parent_pos = rng.below(rows.size());
                auto parent = train.X.row(rows[parent_pos]);
                const auto& pool = pools[parent_pos];
                std::size_t ai = rng.below(pool.size());
                std::size_t bi = pool.size() > 1 ? rng.below(pool.size() - 1) : 0;
                if (pool.size() > 1 && bi >= ai) ++bi;  // distinct partners
                auto a = train.X.row(pool[ai]);
                auto b = train.X.row(pool[bi]);

                for (std::size_t c = 0; c < synthetic.size(); ++c) {
                    if (rng.uniform() < config.cr) {
                        synthetic[c] =
                            std::clamp(parent[c] + config.f * (a[c] - b[c]), 0.0, 1.0);
                    } else {
                        synthetic[c] = parent[c];
                    }
                }
                repair_one_hot(synthetic, out.encoding_map);
                // The protected feature must stay the subgroup's value.
                synthetic[pa_column] = static_cast<double>(s);

                out.X.append_row(synthetic);
                out.y.push_back(y);
                for (auto& [attr, values] : out.protected_attrs) {
                    if (attr == protected_name) {
                        values.push_back(s);
                    } else {
                        // Other protected attributes inherit the parent's value.
                        values.push_back(values[rows[parent_pos]]);
                    }
                }
            }
        }
    }

    // Keep feature columns of other protected attributes consistent with the
    // inherited attribute vectors.
    for (const auto& [attr, values] : out.protected_attrs) {
        const std::size_t column = out.feature_index(attr);
        for (std::size_t r = train.rows(); r < out.rows(); ++r)
            out.X(r, column) = static_cast<double>(values[r]);
    }
    return out;
}

TabularDataset situation_testing_filter(const TabularDataset& train,
                                        std::string_view protected_name, std::uint64_t seed,
                                        const SituationFilterConfig& config) {
    std::size_t per_class[2] = {0, 0};
    for (int label : train.y) ++per_class[label];
    if (per_class[0] < 10 || per_class[1] < 10)
        throw Error("situation_testing_filter: needs at least 10 rows per class");

    auto model = make_learner(config.classifier);
    model->fit(train.X, train.y, {}, seed);

    const std::size_t column = train.feature_index(protected_name);
    Matrix flipped = train.X;
    for (std::size_t r = 0; r < flipped.rows(); ++r)
        flipped(r, column) = 1.0 - flipped(r, column);

    const std::vector<int> original = model->predict(train.X);
    const std::vector<int> changed = model->predict(flipped);

    std::vector<std::size_t> keep;
    keep.reserve(train.rows());
    for (std::size_t r = 0; r < train.rows(); ++r)
        if (original[r] == changed[r]) keep.push_back(r);

    const std::size_t dropped = train.rows() - keep.size();
    if (static_cast<double>(dropped) >
        config.max_drop_fraction * static_cast<double>(train.rows()))
        throw Error("situation_testing_filter: would drop " + std::to_string(dropped) + " of " +
                    std::to_string(train.rows()) + " rows (classifier is degenerate)");

    TabularDataset out;
    out.feature_names = train.feature_names;
    out.encoding_map = train.encoding_map;
    out.scaling_map = train.scaling_map;
    out.X = train.X.select_rows(keep);
    out.y.reserve(keep.size());
    for (std::size_t r : keep) out.y.push_back(train.y[r]);
    for (const auto& [attr, values] : train.protected_attrs) {
        std::vector<int> subset;
        subset.reserve(keep.size());
        for (std::size_t r : keep) subset.push_back(values[r]);
        out.protected_attrs.emplace_back(attr, std::move(subset));
    }
    if (train.raw && train.manifest) {
        auto table = std::make_shared<RawTable>();
        table->columns = train.raw->columns;
        table->rows.reserve(keep.size());
        for (std::size_t r : keep) table->rows.push_back(train.raw->rows[r]);
        out.raw = table;
        out.manifest = train.manifest;
    }
    return out;
}

TabularDataset random_shuffle_protected(const TabularDataset& test,
                                        std::string_view protected_name, std::uint64_t seed) {
    const std::size_t column = test.feature_index(protected_name);
    TabularDataset out = test;
    out.raw.reset();
    out.manifest.reset();

    Rng rng(seed);
    std::vector<std::size_t> order = rng.permutation(test.rows());

    const std::vector<int>& source = test.protected_values(protected_name);
    std::vector<int> shuffled(test.rows());
    for (std::size_t r = 0; r < test.rows(); ++r) shuffled[r] = source[order[r]];

    for (std::size_t r = 0; r < test.rows(); ++r)
        out.X(r, column) = static_cast<double>(shuffled[r]);
    for (auto& [attr, values] : out.protected_attrs)
        if (attr == protected_name) values = shuffled;
    return out;
}

}  // namespace fairbench
