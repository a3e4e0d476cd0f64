#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ssrforge/data.hpp"

namespace ssrforge {

/// Minkowski order plus per-feature min/max used to normalize numerics to [0, 1].
/// Nominal features use the overlap metric (0 if equal, else 1).
struct DistanceConfig {
    double order = 2.0;
    std::vector<FeatureKind> kinds;
    std::vector<std::pair<double, double>> ranges;  // (min, max); unused for nominal features

    /// Ranges taken over every instance of the given datasets (labels not needed).
    static DistanceConfig fit(const Dataset& reference, double order);
    static DistanceConfig fit(std::span<const Dataset* const> references, double order);

    void validate() const;
    std::size_t arity() const { return kinds.size(); }

    /// Numerics mapped to [0, 1] (clipped, zero-width ranges map to 0); nominal codes copied.
    void normalize_into(std::span<const double> x, std::span<double> out) const;
    std::vector<double> normalize(const Instance& x) const;
};

/// Distance between two already-normalized points.
double minkowski(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg);

double distance(const Instance& a, const Instance& b, const DistanceConfig& cfg);

struct Neighbor {
    std::size_t index = 0;  // position in the reference set
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Neighbor ordering: ascending distance, then ascending reference index.
constexpr bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

enum class SelfMatch { exclude, include };

/// Exact k-NN regressor over a labeled reference set. Immutable once built.
class KnnModel {
public:
    KnnModel(Dataset reference, std::size_t k, DistanceConfig cfg);

    const Dataset& reference() const { return reference_; }
    std::size_t k() const { return k_; }
    const DistanceConfig& config() const { return cfg_; }
    std::span<const double> targets() const { return targets_; }

    /// The `k` closest reference points. With SelfMatch::exclude a reference
    /// member sharing `x.uid` is skipped.
    std::vector<Neighbor> query(const Instance& x, std::size_t k,
                                SelfMatch self = SelfMatch::exclude) const;
    /// Unweighted mean target of the model's k nearest neighbors.
    double predict(const Instance& x, SelfMatch self = SelfMatch::exclude) const;

private:
    Dataset reference_;
    std::size_t k_;
    DistanceConfig cfg_;
    std::vector<double> normalized_;  // row-major, reference_.size() x arity
    std::vector<double> targets_;
};

std::vector<Neighbor> knn_query(const KnnModel& model, const Instance& x, std::size_t k,
                                SelfMatch self = SelfMatch::exclude);
double knn_predict(const KnnModel& model, const Instance& x);

/// Bounded sorted buffer of the best `capacity` neighbors seen so far.
class TopK {
public:
    explicit TopK(std::size_t capacity) : capacity_(capacity) { items_.reserve(capacity + 1); }

    void offer(Neighbor n);
    std::span<const Neighbor> items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool full() const { return items_.size() == capacity_; }
    std::vector<Neighbor> take() && { return std::move(items_); }

private:
    std::size_t capacity_;
    std::vector<Neighbor> items_;
};

}  // namespace ssrforge
