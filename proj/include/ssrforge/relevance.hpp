#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssrforge/data.hpp"

namespace ssrforge {

struct ControlPoint {
    double y = 0.0;
    double phi = 0.0;
    double slope = 0.0;

    friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

/// Which target tails the automatic construction marks as relevant.
enum class Tails { both, low, high };

/// Tukey boxplot control points: (lower whisker, 1, 0), (median, 0, 0),
/// (upper whisker, 1, 0). A side whose whisker equals the median is dropped.
/// Whiskers are the most extreme observations inside Q1 - coef*IQR and
/// Q3 + coef*IQR (quartiles by linear interpolation).
std::vector<ControlPoint> auto_control_points(std::span<const double> targets, Tails tails = Tails::both,
                                              double coef = 1.5);

/// Monotone piecewise-cubic Hermite map from a target value to a relevance in [0, 1].
class RelevanceFn {
public:
    explicit RelevanceFn(std::vector<ControlPoint> points);

    static RelevanceFn from_targets(std::span<const double> targets, Tails tails = Tails::both) {
        return RelevanceFn(auto_control_points(targets, tails));
    }

    double operator()(double y) const;
    const std::vector<ControlPoint>& control_points() const { return points_; }
    /// Slopes after the Fritsch–Carlson monotonicity adjustment.
    const std::vector<double>& slopes() const { return slopes_; }

private:
    std::vector<ControlPoint> points_;
    std::vector<double> slopes_;
};

double relevance(const RelevanceFn& fn, double y);

struct Bin {
    std::vector<std::size_t> members;  // indices into the dataset, sorted by target
    bool rare = false;
};

struct BinPartition {
    std::vector<Bin> bins;  // ordered by target value, rare flags alternate
    double threshold = 0.25;

    std::size_t rare_count() const;
    std::size_t normal_count() const;
    std::size_t rare_bins() const;
    std::size_t normal_bins() const;
};

/// Sorts labeled instances by target and groups maximal runs with the same
/// rare flag (phi(y) >= t_R). Unlabeled instances are ignored.
BinPartition partition_bins(const Dataset& d, const RelevanceFn& fn, double t_r);

}  // namespace ssrforge
