#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssrforge/data.hpp"

namespace ssrforge {

enum class TargetModel { mixture, function };

/// Generator settings for a synthetic imbalanced-regression table.
///
/// Features x0 and x1 carry a smooth signal, x2 is a "segment" feature whose
/// low end is dominated by the minority mode, remaining numerics are noise.
/// Nominal c0 flags the segment (category 0 is mostly minority), c1 buckets x1,
/// further nominal columns are noise.
/// In mixture mode the target is
///     mode_mean + signal * (f(x0, x1) - 0.5) + N(0, mode_sd),
/// clipped to [0, 1]; in function mode it is f(x0, x1) + N(0, noise_sd).
struct SynthSpec {
    std::size_t n = 1000;
    std::size_t numeric_features = 4;
    std::vector<std::size_t> nominal_cardinalities{3, 4};
    TargetModel target_model = TargetModel::mixture;
    double majority_mean = 0.7;
    double majority_sd = 0.06;
    double minority_mean = 0.25;
    double minority_sd = 0.06;
    double rare_fraction = 0.1;
    double signal = 0.2;
    double noise_sd = 0.03;
    double separation = 0.95;  // probability a minority instance lands in the low segment
    std::uint64_t seed = 42;

    void validate() const;
};

/// The skewed benchmark used by the experiment defaults: n = 1000, 10% minority mode.
SynthSpec skewed_benchmark(std::uint64_t seed);

/// Reads a [synth] INI section; keys mirror the SynthSpec fields, with
/// nominal_cardinalities as a comma list and target_model = mixture|function.
/// Missing keys keep the benchmark defaults, unknown keys are errors.
SynthSpec parse_synth_spec(const std::string& text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Fully labeled table. The provenance tag records the mode of each row as a
/// bit string after "minority=".
Dataset generate(const SynthSpec& spec);

/// Mode flags recovered from a generated dataset's provenance.
std::vector<bool> minority_mask(const Dataset& d);

}  // namespace ssrforge
