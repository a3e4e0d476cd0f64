#include "ssrforge/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssrforge/error.hpp"

namespace ssrforge {

DistanceConfig DistanceConfig::fit(const Dataset& reference, double order) {
    const Dataset* refs[] = {&reference};
    return fit(refs, order);
}

DistanceConfig DistanceConfig::fit(std::span<const Dataset* const> references, double order) {
    if (references.empty()) throw DataError("distance: no reference data");
    const auto& schema = references.front()->schema();
    DistanceConfig cfg;
    cfg.order = order;
    const auto arity = schema.arity();
    cfg.kinds.reserve(arity);
    for (const auto& f : schema.features()) cfg.kinds.push_back(f.kind);
    cfg.ranges.assign(arity, {std::numeric_limits<double>::infinity(),
                              -std::numeric_limits<double>::infinity()});
    bool any = false;
    for (const Dataset* d : references) {
        if (d->schema().arity() != arity) throw DataError("distance: schema mismatch between reference sets");
        for (const auto& inst : d->instances()) {
            any = true;
            for (std::size_t f = 0; f < arity; ++f) {
                auto& [lo, hi] = cfg.ranges[f];
                lo = std::min(lo, inst.x[f]);
                hi = std::max(hi, inst.x[f]);
            }
        }
    }
    if (!any) throw DataError("distance: reference set is empty");
    cfg.validate();
    return cfg;
}

void DistanceConfig::validate() const {
    if (!(order >= 1.0) || !std::isfinite(order)) throw ConfigError("distance order must be a finite value >= 1");
    if (ranges.size() != kinds.size()) throw ConfigError("distance: ranges and kinds differ in arity");
    for (std::size_t f = 0; f < kinds.size(); ++f) {
        if (kinds[f] != FeatureKind::numeric) continue;
        const auto [lo, hi] = ranges[f];
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
            throw ConfigError("distance: invalid range for feature " + std::to_string(f));
    }
}

void DistanceConfig::normalize_into(std::span<const double> x, std::span<double> out) const {
    for (std::size_t f = 0; f < kinds.size(); ++f) {
        if (kinds[f] != FeatureKind::numeric) {
            out[f] = x[f];
            continue;
        }
        const auto [lo, hi] = ranges[f];
        const double width = hi - lo;
        out[f] = width > 0.0 ? std::clamp((x[f] - lo) / width, 0.0, 1.0) : 0.0;
    }
}

std::vector<double> DistanceConfig::normalize(const Instance& x) const {
    if (x.x.size() != kinds.size()) throw DataError("distance: instance does not match the distance schema");
    std::vector<double> out(kinds.size());
    normalize_into(x.x, out);
    return out;
}

double minkowski(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg) {
    const auto n = cfg.kinds.size();
    const double p = cfg.order;
    double sum = 0.0;
    if (p == 2.0) {
        for (std::size_t f = 0; f < n; ++f) {
            const double d = cfg.kinds[f] == FeatureKind::numeric ? a[f] - b[f] : (a[f] == b[f] ? 0.0 : 1.0);
            sum += d * d;
        }
        return std::sqrt(sum);
    }
    if (p == 3.0) {
        for (std::size_t f = 0; f < n; ++f) {
            const double d = cfg.kinds[f] == FeatureKind::numeric ? std::abs(a[f] - b[f]) : (a[f] == b[f] ? 0.0 : 1.0);
            sum += d * d * d;
        }
        return std::cbrt(sum);
    }
    if (p == 1.0) {
        for (std::size_t f = 0; f < n; ++f)
            sum += cfg.kinds[f] == FeatureKind::numeric ? std::abs(a[f] - b[f]) : (a[f] == b[f] ? 0.0 : 1.0);
        return sum;
    }
    for (std::size_t f = 0; f < n; ++f) {
        const double d = cfg.kinds[f] == FeatureKind::numeric ? std::abs(a[f] - b[f]) : (a[f] == b[f] ? 0.0 : 1.0);
        sum += std::pow(d, p);
    }
    return std::pow(sum, 1.0 / p);
}

double distance(const Instance& a, const Instance& b, const DistanceConfig& cfg) {
    if (a.x.size() != cfg.arity() || b.x.size() != cfg.arity())
        throw DataError("distance: schema mismatch");
    const auto na = cfg.normalize(a);
    const auto nb = cfg.normalize(b);
    return minkowski(na, nb, cfg);
}

// ---------------------------------------------------------------------------

void TopK::offer(Neighbor n) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_ && !closer(n, items_.back())) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), n, closer);
    items_.insert(pos, n);
    if (items_.size() > capacity_) items_.pop_back();
}

KnnModel::KnnModel(Dataset reference, std::size_t k, DistanceConfig cfg)
    : reference_(std::move(reference)), k_(k), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (reference_.empty()) throw DataError("knn: empty reference set");
    if (k_ == 0 || k_ > reference_.size())
        throw ConfigError("knn: k = " + std::to_string(k_) + " out of range for " +
                          std::to_string(reference_.size()) + " reference points");
    if (reference_.schema().arity() != cfg_.arity()) throw DataError("knn: schema mismatch");
    const auto dim = cfg_.arity();
    normalized_.resize(reference_.size() * dim);
    targets_.reserve(reference_.size());
    for (std::size_t i = 0; i < reference_.size(); ++i) {
        const auto& inst = reference_[i];
        if (!inst.y) throw DataError("knn: reference set contains an unlabeled instance");
        targets_.push_back(*inst.y);
        cfg_.normalize_into(inst.x, std::span<double>(normalized_).subspan(i * dim, dim));
    }
}

std::vector<Neighbor> KnnModel::query(const Instance& x, std::size_t k, SelfMatch self) const {
    if (k == 0 || k > reference_.size())
        throw ConfigError("knn: k = " + std::to_string(k) + " out of range");
    const auto nx = cfg_.normalize(x);
    const auto dim = cfg_.arity();
    const std::span<const double> rows(normalized_);
    TopK best(k);
    for (std::size_t i = 0; i < reference_.size(); ++i) {
        if (self == SelfMatch::exclude && reference_[i].uid == x.uid) continue;
        best.offer({i, minkowski(nx, rows.subspan(i * dim, dim), cfg_)});
    }
    if (!best.full()) throw ConfigError("knn: fewer than k candidates after self-exclusion");
    return std::move(best).take();
}

double KnnModel::predict(const Instance& x, SelfMatch self) const {
    const auto nn = query(x, k_, self);
    double sum = 0.0;
    for (const auto& n : nn) sum += targets_[n.index];
    return sum / static_cast<double>(nn.size());
}

std::vector<Neighbor> knn_query(const KnnModel& model, const Instance& x, std::size_t k, SelfMatch self) {
    return model.query(x, k, self);
}

double knn_predict(const KnnModel& model, const Instance& x) { return model.predict(x); }

}  // namespace ssrforge
