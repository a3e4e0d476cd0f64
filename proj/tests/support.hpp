#pragma once

// Fixtures and independent oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssrforge/data.hpp"
#include "ssrforge/distance.hpp"
#include "ssrforge/random.hpp"

namespace testsupport {

using namespace ssrforge;

// Numeric columns x0.., nominal columns c0.., then "y".
inline std::shared_ptr<const Schema> make_schema(std::size_t numeric, const std::vector<std::size_t>& cards = {}) {
    std::vector<Column> cols;
    for (std::size_t j = 0; j < numeric; ++j) cols.push_back({"x" + std::to_string(j), FeatureKind::numeric});
    for (std::size_t j = 0; j < cards.size(); ++j) cols.push_back({"c" + std::to_string(j), FeatureKind::nominal});
    cols.push_back({"y", FeatureKind::numeric});
    Schema s(std::move(cols), "y");
    for (std::size_t j = 0; j < cards.size(); ++j)
        for (std::size_t c = 0; c < cards[j]; ++c) s.intern(numeric + j, "v" + std::to_string(c));
    return std::make_shared<const Schema>(std::move(s));
}

// Uniform numerics on [0, scale), uniform nominal codes, target from `target_fn` or uniform.
template <class F>
Dataset random_dataset(std::size_t n, std::size_t numeric, const std::vector<std::size_t>& cards, std::uint64_t seed,
                       F target_fn, double scale = 1.0) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto schema = make_schema(numeric, cards);
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < n; ++i) {
        Instance inst;
        inst.uid = i;
        for (std::size_t j = 0; j < numeric; ++j) inst.x.push_back(scale * u(g));
        for (auto c : cards) inst.x.push_back(static_cast<double>(std::uniform_int_distribution<std::size_t>(0, c - 1)(g)));
        inst.y = target_fn(inst.x, u(g));
        rows.push_back(std::move(inst));
    }
    return Dataset(schema, std::move(rows), "test:random");
}

inline Dataset random_dataset(std::size_t n, std::size_t numeric, const std::vector<std::size_t>& cards,
                              std::uint64_t seed) {
    return random_dataset(n, numeric, cards, seed, [](const std::vector<double>&, double r) { return r; });
}

// One numeric feature, explicit (x, y) pairs.
inline Dataset line_dataset(const std::vector<std::pair<double, double>>& xy, InstanceId first_uid = 0) {
    auto schema = make_schema(1);
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        Instance inst;
        inst.x = {xy[i].first};
        inst.y = xy[i].second;
        inst.uid = first_uid + i;
        rows.push_back(std::move(inst));
    }
    return Dataset(schema, std::move(rows), "test:line");
}

// Textbook Minkowski over min-max scaled numerics and overlap nominals, via std::pow.
inline double oracle_distance(const std::vector<double>& a, const std::vector<double>& b, const DistanceConfig& cfg) {
    long double sum = 0.0L;
    for (std::size_t f = 0; f < a.size(); ++f) {
        long double d;
        if (cfg.kinds[f] == FeatureKind::nominal) {
            d = a[f] == b[f] ? 0.0L : 1.0L;
        } else {
            const long double lo = cfg.ranges[f].first, hi = cfg.ranges[f].second;
            auto scale = [&](long double v) {
                if (hi - lo <= 0.0L) return 0.0L;
                return std::min(1.0L, std::max(0.0L, (v - lo) / (hi - lo)));
            };
            d = std::fabs(scale(a[f]) - scale(b[f]));
        }
        sum += std::pow(d, static_cast<long double>(cfg.order));
    }
    return static_cast<double>(std::pow(sum, 1.0L / static_cast<long double>(cfg.order)));
}

// Exhaustive scan: every distance through the public `distance`, full sort by (distance, index).
inline std::vector<Neighbor> oracle_knn(const Dataset& ref, const Instance& q, std::size_t k, const DistanceConfig& cfg,
                                        bool exclude_self = true) {
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (exclude_self && ref[i].uid == q.uid) continue;
        all.push_back({i, distance(q, ref[i], cfg)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

inline double oracle_mean_of(const Dataset& ref, const std::vector<Neighbor>& nn) {
    long double s = 0.0L;
    for (const auto& n : nn) s += *ref[n.index].y;
    return static_cast<double>(s / static_cast<long double>(nn.size()));
}

inline Dataset append(const Dataset& d, Instance extra) {
    auto rows = d.instances();
    rows.push_back(std::move(extra));
    return d.with_instances(std::move(rows), d.provenance());
}

inline Dataset without(const Dataset& d, std::size_t index) {
    auto rows = d.instances();
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(index));
    return d.with_instances(std::move(rows), d.provenance());
}

// Rebuilds h on L \ {x_i} and h' on (L + x_u) \ {x_i} from scratch for every member of Ω.
inline double oracle_delta(const Dataset& L, std::size_t k, const DistanceConfig& cfg, const Instance& x_u, double y_hat) {
    Instance added = x_u;
    added.y = y_hat;
    const auto Lp = append(L, added);
    double total = 0.0;
    for (const auto& omega : oracle_knn(L, x_u, k, cfg)) {
        const auto& xi = L[omega.index];
        const auto h_ref = without(L, omega.index);
        const auto hp_ref = without(Lp, omega.index);
        const double h = oracle_mean_of(h_ref, oracle_knn(h_ref, xi, k, cfg, false));
        const double hp = oracle_mean_of(hp_ref, oracle_knn(hp_ref, xi, k, cfg, false));
        const double yi = *xi.y;
        total += (yi - h) * (yi - h) - (yi - hp) * (yi - hp);
    }
    return total;
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double rmse_of(const std::vector<double>& t, const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += (t[i] - p[i]) * (t[i] - p[i]);
    return std::sqrt(s / static_cast<double>(t.size()));
}

// Scripted RandomSource: replays fixed values, cycling.
class StubRandom final : public RandomSource {
public:
    StubRandom(std::vector<double> uniforms, std::vector<double> normals = {0.0}, std::size_t index = 0)
        : uniforms_(std::move(uniforms)), normals_(std::move(normals)), index_(index) {}
    double uniform01() override { return uniforms_[u_++ % uniforms_.size()]; }
    double normal() override { return normals_[n_++ % normals_.size()]; }
    std::size_t index(std::size_t n) override { return std::min(index_, n - 1); }

private:
    std::vector<double> uniforms_;
    std::vector<double> normals_;
    std::size_t index_;
    std::size_t u_ = 0;
    std::size_t n_ = 0;
};

}  // namespace testsupport
