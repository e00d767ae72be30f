#include "fairbench/scott_knott.hpp"

#include <algorithm>
#include <cmath>

#include "fairbench/error.hpp"

namespace fairbench {

double median(std::span<const double> values) {
    if (values.empty()) throw Error("median of empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    if (sorted.size() % 2 == 1) return sorted[mid];
    return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("cliffs_delta: empty input");
    long long more = 0, less = 0;
    for (double x : a) {
        for (double y : b) {
            if (x > y) ++more;
            else if (x < y) ++less;
        }
    }
    return static_cast<double>(more - less) /
           (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double split_objective(std::span<const double> values, std::size_t cut) {
    if (cut < 1 || cut >= values.size())
        throw Error("split_objective: cut must lie in [1, size)");
    const double n = static_cast<double>(values.size());
    double total = 0.0;
    for (double v : values) total += v;
    const double mean_all = total / n;

    double left = 0.0;
    for (std::size_t i = 0; i < cut; ++i) left += values[i];
    const double n1 = static_cast<double>(cut);
    const double n2 = n - n1;
    const double mean1 = left / n1;
    const double mean2 = (total - left) / n2;

    const double d1 = mean1 - mean_all;
    const double d2 = mean2 - mean_all;
    return (n1 / n) * d1 * d1 + (n2 / n) * d2 * d2;
}

namespace {

struct Treatment {
    const TreatmentSamples* samples;
    double med;
};

// Assigns ranks to sorted_treatments[lo, hi); returns the next free rank.
int rank_segment(std::vector<Treatment>& treatments, std::size_t lo, std::size_t hi, int rank,
                 double effect_threshold, RankAssignment& out) {
    const std::size_t count = hi - lo;
    if (count == 1) {
        out.ranks[treatments[lo].samples->name] = rank;
        return rank + 1;
    }

    std::vector<double> medians(count);
    for (std::size_t i = 0; i < count; ++i) medians[i] = treatments[lo + i].med;

    std::size_t best_cut = 0;
    double best_objective = -1.0;
    for (std::size_t cut = 1; cut < count; ++cut) {
        const double objective = split_objective(medians, cut);
        if (objective > best_objective) {
            best_objective = objective;
            best_cut = cut;
        }
    }

    std::vector<double> pooled_left, pooled_right;
    for (std::size_t i = lo; i < lo + best_cut; ++i)
        pooled_left.insert(pooled_left.end(), treatments[i].samples->values.begin(),
                           treatments[i].samples->values.end());
    for (std::size_t i = lo + best_cut; i < hi; ++i)
        pooled_right.insert(pooled_right.end(), treatments[i].samples->values.begin(),
                            treatments[i].samples->values.end());

    const double effect = std::abs(cliffs_delta(pooled_left, pooled_right));
    if (effect < effect_threshold) {
        for (std::size_t i = lo; i < hi; ++i) out.ranks[treatments[i].samples->name] = rank;
        return rank + 1;
    }

    rank = rank_segment(treatments, lo, lo + best_cut, rank, effect_threshold, out);
    return rank_segment(treatments, lo + best_cut, hi, rank, effect_threshold, out);
}

}  // namespace

RankAssignment scott_knott_rank(std::span<const TreatmentSamples> treatments,
                                bool smaller_is_better, double effect_threshold) {
    if (treatments.empty()) throw Error("scott_knott_rank: no treatments");
    std::size_t run_count = 0;
    for (const auto& treatment : treatments) {
        if (treatment.values.size() < 2)
            throw Error("scott_knott_rank: treatment \"" + treatment.name +
                        "\" needs at least 2 values");
        if (run_count == 0) run_count = treatment.values.size();
        else if (treatment.values.size() != run_count)
            throw Error("scott_knott_rank: treatments have different run counts");
    }

    std::vector<Treatment> sorted;
    sorted.reserve(treatments.size());
    for (const auto& treatment : treatments)
        sorted.push_back({&treatment, median(treatment.values)});
    std::sort(sorted.begin(), sorted.end(), [&](const Treatment& a, const Treatment& b) {
        if (a.med != b.med) return smaller_is_better ? a.med < b.med : a.med > b.med;
        return a.samples->name < b.samples->name;  // deterministic table output
    });

    RankAssignment assignment;
    rank_segment(sorted, 0, sorted.size(), 1, effect_threshold, assignment);
    return assignment;
}

}  // namespace fairbench
