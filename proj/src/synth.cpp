#include <charconv>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"
#include "fairbench/tabular.hpp"

namespace fairbench {

namespace {

std::string format_double(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

// Three-way categorical draw given cumulative probabilities.
const char* pick3(Rng& rng, double p_first, double p_second, const char* a, const char* b,
                  const char* c) {
    double u = rng.uniform();
    if (u < p_first) return a;
    if (u < p_first + p_second) return b;
    return c;
}

}  // namespace

RawTable synth_raw_table(const SynthSpec& spec) {
    if (spec.rows < 20) throw Error("synth_dataset requires at least 20 rows");
    if (spec.bias_strength < 0.0 || spec.bias_strength > 1.0)
        throw Error("bias_strength must lie in [0, 1]");

    Rng rng(spec.seed);
    RawTable table;
    table.columns = {"f1", "f2", "f3", "f4", "c1", "c2", "group", "outcome"};
    table.rows.reserve(spec.rows);

    const double half_gap = spec.bias_strength / 2.0;
    for (std::size_t i = 0; i < spec.rows; ++i) {
        const int z = rng.bernoulli(0.6) ? 1 : 0;
        const double favorable_rate = 0.5 + (z == 1 ? half_gap : -half_gap);
        const int y = rng.bernoulli(favorable_rate) ? 1 : 0;

        // f1/f2 are strong proxies of the protected attribute; f3/f4 carry
        // the label signal (with a weaker protected loading).
        const double f1 = 0.30 * z + 0.15 * rng.normal();
        const double f2 = 0.25 * z + 0.15 * rng.normal();
        const double f3 = 0.20 * y + 0.10 * z + 0.15 * rng.normal();
        const double f4 = 0.25 * y + 0.05 * z + 0.15 * rng.normal();

        const char* c1 = z == 1 ? pick3(rng, 0.55, 0.30, "a", "b", "c")
                                : pick3(rng, 0.15, 0.30, "a", "b", "c");
        const char* c2 = rng.bernoulli(z == 1 ? 0.65 : 0.35) ? "x" : "w";

        table.rows.push_back({format_double(f1), format_double(f2), format_double(f3),
                              format_double(f4), c1, c2, z == 1 ? "priv" : "unpriv",
                              y == 1 ? "yes" : "no"});
    }
    return table;
}

DatasetManifest synth_manifest(std::string csv_path) {
    DatasetManifest manifest;
    manifest.name = "synth";
    manifest.csv_path = std::move(csv_path);
    manifest.label_column = "outcome";
    manifest.favorable_value = "yes";
    manifest.protected_specs = {{"group", "priv"}};
    manifest.categorical_columns = {"c1", "c2", "group"};
    manifest.numeric_columns = {"f1", "f2", "f3", "f4"};
    return manifest;
}

TabularDataset synth_dataset(const SynthSpec& spec) {
    auto table = std::make_shared<RawTable>(synth_raw_table(spec));
    auto manifest = std::make_shared<DatasetManifest>(synth_manifest("<generated>"));
    return encode_table(std::move(table), std::move(manifest));
}

}  // namespace fairbench
