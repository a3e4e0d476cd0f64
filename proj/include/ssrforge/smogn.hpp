#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssrforge/data.hpp"
#include "ssrforge/distance.hpp"
#include "ssrforge/random.hpp"
#include "ssrforge/relevance.hpp"

namespace ssrforge {

enum class OverMode { balance, fixed };

struct SmognParams {
    double t_r = 0.25;
    std::size_t k = 2;
    double pert = 0.05;
    double under_frac = 1.0;  // fixed mode only; balance mode derives it per bin
    OverMode mode = OverMode::balance;
    double multiplier = 2.0;  // fixed mode rare-bin growth factor
    std::uint64_t seed = 0;
    Tails tails = Tails::both;
    std::optional<std::vector<ControlPoint>> control_points;
    std::size_t max_iterations = 1000;  // accepted for config parity, not a loop bound

    void validate() const;
};

enum class SynthMethod { original, smoter, gauss };

const char* to_string(SynthMethod m);

struct SynthRecord {
    Instance instance;
    SynthMethod method = SynthMethod::original;
    std::size_t seed_index = 0;
    std::optional<std::size_t> neighbor_index;
};

struct SmognResult {
    Dataset data;
    std::vector<SynthRecord> records;  // parallel to data.instances()
    BinPartition partition;
    std::vector<std::string> warnings;

    std::size_t count(SynthMethod m) const;
};

/// Half the median of the neighbor distances.
double safe_distance(std::span<const Neighbor> neighbors);

/// SMOTER interpolation: one u ~ U[0,1] per numeric feature, nominal values
/// taken from either endpoint, target weighted by inverse distance to both.
Instance smoter_interpolate(const Instance& seed, const Instance& neighbor, const DistanceConfig& cfg,
                            RandomSource& rng);

/// Gaussian perturbation of a seed. `categories[f]` lists the observed codes of
/// nominal feature f (ignored for numeric features).
Instance gaussian_perturb(const Instance& seed, std::span<const double> feature_sds, double target_sd,
                          double pert, std::span<const std::vector<double>> categories, RandomSource& rng);

/// Under-samples normal bins and over-samples rare bins. The output is shuffled;
/// `records[i]` describes `data[i]`.
SmognResult smogn(const Dataset& d, const SmognParams& params, const DistanceConfig& cfg);

}  // namespace ssrforge
