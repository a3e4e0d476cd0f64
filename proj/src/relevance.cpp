#include "ssrforge/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssrforge/error.hpp"

namespace ssrforge {

namespace {

// Linear-interpolation quantile on sorted data.
double quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<ControlPoint> auto_control_points(std::span<const double> targets, Tails tails, double coef) {
    std::vector<double> y(targets.begin(), targets.end());
    std::sort(y.begin(), y.end());
    const auto distinct = static_cast<std::size_t>(std::unique(y.begin(), y.end()) - y.begin());
    if (distinct <= 1) throw DataError("relevance undefined for constant target");
    if (distinct < 4) throw DataError("relevance: at least 4 distinct target values are required");
    y.assign(targets.begin(), targets.end());
    std::sort(y.begin(), y.end());

    const double median = quantile(y, 0.5);
    const double q1 = quantile(y, 0.25);
    const double q3 = quantile(y, 0.75);
    const double iqr = q3 - q1;
    const double low_fence = q1 - coef * iqr;
    const double high_fence = q3 + coef * iqr;
    const double low_whisker = *std::lower_bound(y.begin(), y.end(), low_fence);
    const double high_whisker = *(std::upper_bound(y.begin(), y.end(), high_fence) - 1);

    std::vector<ControlPoint> points;
    if (tails != Tails::high && low_whisker < median) points.push_back({low_whisker, 1.0, 0.0});
    points.push_back({median, 0.0, 0.0});
    if (tails != Tails::low && high_whisker > median) points.push_back({high_whisker, 1.0, 0.0});
    return points;
}

RelevanceFn::RelevanceFn(std::vector<ControlPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw ConfigError("relevance: at least one control point is required");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.y) || !std::isfinite(p.slope) || !(p.phi >= 0.0 && p.phi <= 1.0))
            throw ConfigError("relevance: control points need finite y/slope and phi in [0, 1]");
        if (i > 0 && !(p.y > points_[i - 1].y))
            throw ConfigError("relevance: control point y values must be strictly increasing");
    }

    // Fritsch–Carlson: zero slopes on flat secants, clamp opposite-sign slopes,
    // and scale any (alpha, beta) outside the radius-3 circle.
    slopes_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) slopes_[i] = points_[i].slope;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double h = points_[i + 1].y - points_[i].y;
        const double secant = (points_[i + 1].phi - points_[i].phi) / h;
        if (secant == 0.0) {
            slopes_[i] = 0.0;
            slopes_[i + 1] = 0.0;
            continue;
        }
        double alpha = slopes_[i] / secant;
        double beta = slopes_[i + 1] / secant;
        if (alpha < 0.0) {
            slopes_[i] = 0.0;
            alpha = 0.0;
        }
        if (beta < 0.0) {
            slopes_[i + 1] = 0.0;
            beta = 0.0;
        }
        const double r2 = alpha * alpha + beta * beta;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            slopes_[i] = tau * alpha * secant;
            slopes_[i + 1] = tau * beta * secant;
        }
    }
}

double RelevanceFn::operator()(double y) const {
    if (std::isnan(y)) return 0.0;
    if (y <= points_.front().y) return std::clamp(points_.front().phi, 0.0, 1.0);
    if (y >= points_.back().y) return std::clamp(points_.back().phi, 0.0, 1.0);
    const auto it = std::upper_bound(points_.begin(), points_.end(), y,
                                     [](double v, const ControlPoint& p) { return v < p.y; });
    const auto i = static_cast<std::size_t>(it - points_.begin()) - 1;
    const auto& a = points_[i];
    const auto& b = points_[i + 1];
    const double h = b.y - a.y;
    const double t = (y - a.y) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    const double v = h00 * a.phi + h10 * h * slopes_[i] + h01 * b.phi + h11 * h * slopes_[i + 1];
    return std::clamp(v, 0.0, 1.0);
}

double relevance(const RelevanceFn& fn, double y) { return fn(y); }

std::size_t BinPartition::rare_count() const {
    std::size_t n = 0;
    for (const auto& b : bins)
        if (b.rare) n += b.members.size();
    return n;
}

std::size_t BinPartition::normal_count() const {
    std::size_t n = 0;
    for (const auto& b : bins)
        if (!b.rare) n += b.members.size();
    return n;
}

std::size_t BinPartition::rare_bins() const {
    return static_cast<std::size_t>(std::count_if(bins.begin(), bins.end(), [](const Bin& b) { return b.rare; }));
}

std::size_t BinPartition::normal_bins() const { return bins.size() - rare_bins(); }

BinPartition partition_bins(const Dataset& d, const RelevanceFn& fn, double t_r) {
    if (!(t_r > 0.0 && t_r < 1.0)) throw ConfigError("relevance threshold t_R must lie in (0, 1)");
    std::vector<std::size_t> order;
    order.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].labeled()) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *d[a].y < *d[b].y; });

    BinPartition part;
    part.threshold = t_r;
    for (auto i : order) {
        const bool rare = fn(*d[i].y) >= t_r;
        if (part.bins.empty() || part.bins.back().rare != rare) part.bins.push_back(Bin{{}, rare});
        part.bins.back().members.push_back(i);
    }
    return part;
}

}  // namespace ssrforge
