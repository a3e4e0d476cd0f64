#include "ssrforge/smogn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ssrforge/error.hpp"

namespace ssrforge {

namespace {

double population_sd(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

void SmognParams::validate() const {
    if (!(t_r > 0.0 && t_r < 1.0)) throw ConfigError("smogn: t_R must lie in (0, 1)");
    if (k == 0) throw ConfigError("smogn: k must be positive");
    if (!(pert > 0.0)) throw ConfigError("smogn: pert must be positive");
    if (!(under_frac > 0.0 && under_frac <= 1.0)) throw ConfigError("smogn: under_frac must lie in (0, 1]");
    if (mode == OverMode::fixed && !(multiplier >= 1.0))
        throw ConfigError("smogn: fixed-mode multiplier must be >= 1");
}

const char* to_string(SynthMethod m) {
    switch (m) {
        case SynthMethod::original: return "ORIGINAL";
        case SynthMethod::smoter: return "SMOTER";
        case SynthMethod::gauss: return "GAUSS";
    }
    return "?";
}

std::size_t SmognResult::count(SynthMethod m) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [m](const SynthRecord& r) { return r.method == m; }));
}

double safe_distance(std::span<const Neighbor> neighbors) {
    if (neighbors.empty()) throw DataError("safe_distance: no neighbors");
    std::vector<double> d;
    d.reserve(neighbors.size());
    for (const auto& n : neighbors) d.push_back(n.distance);
    std::sort(d.begin(), d.end());
    const auto m = d.size() / 2;
    const double median = d.size() % 2 ? d[m] : 0.5 * (d[m - 1] + d[m]);
    return median / 2.0;
}

Instance smoter_interpolate(const Instance& seed, const Instance& neighbor, const DistanceConfig& cfg,
                            RandomSource& rng) {
    if (seed.x.size() != cfg.arity() || neighbor.x.size() != cfg.arity())
        throw DataError("smoter: schema mismatch");
    if (!seed.y || !neighbor.y) throw DataError("smoter: seed and neighbor must be labeled");
    Instance out;
    out.x.resize(seed.x.size());
    for (std::size_t f = 0; f < seed.x.size(); ++f) {
        if (cfg.kinds[f] == FeatureKind::numeric) {
            const double u = rng.uniform01();
            out.x[f] = seed.x[f] + u * (neighbor.x[f] - seed.x[f]);
        } else {
            out.x[f] = rng.uniform01() < 0.5 ? seed.x[f] : neighbor.x[f];
        }
    }
    const double d1 = distance(out, seed, cfg);
    const double d2 = distance(out, neighbor, cfg);
    out.y = d1 + d2 == 0.0 ? 0.5 * (*seed.y + *neighbor.y) : (d2 * *seed.y + d1 * *neighbor.y) / (d1 + d2);
    return out;
}

Instance gaussian_perturb(const Instance& seed, std::span<const double> feature_sds, double target_sd,
                          double pert, std::span<const std::vector<double>> categories, RandomSource& rng) {
    if (!seed.y) throw DataError("gaussian_perturb: seed must be labeled");
    if (feature_sds.size() != seed.x.size() || categories.size() != seed.x.size())
        throw DataError("gaussian_perturb: per-feature inputs do not match the instance arity");
    Instance out;
    out.x.resize(seed.x.size());
    for (std::size_t f = 0; f < seed.x.size(); ++f) {
        const auto& cats = categories[f];
        if (cats.empty()) {
            out.x[f] = seed.x[f] + rng.normal() * pert * feature_sds[f];
        } else {
            out.x[f] = rng.uniform01() < pert ? cats[rng.index(cats.size())] : seed.x[f];
        }
    }
    out.y = *seed.y + rng.normal() * pert * target_sd;
    return out;
}

SmognResult smogn(const Dataset& d, const SmognParams& params, const DistanceConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!d.fully_labeled()) throw DataError("smogn: input must be fully labeled");
    if (d.size() <= params.k)
        throw DataError("smogn: need more than k = " + std::to_string(params.k) + " instances, got " +
                        std::to_string(d.size()));

    const auto targets = d.targets();
    const RelevanceFn phi = params.control_points ? RelevanceFn(*params.control_points)
                                                  : RelevanceFn::from_targets(targets, params.tails);
    SmognResult result;
    result.partition = partition_bins(d, phi, params.t_r);
    const auto& bins = result.partition.bins;

    auto identity = [&](std::string warning) {
        result.warnings.push_back(std::move(warning));
        result.data = d;
        result.records.clear();
        for (std::size_t i = 0; i < d.size(); ++i)
            result.records.push_back(SynthRecord{d[i], SynthMethod::original, i, std::nullopt});
        return result;
    };
    if (result.partition.rare_bins() == 0) return identity("smogn: no rare instances at t_R; data returned unchanged");
    if (result.partition.normal_bins() == 0)
        return identity("smogn: no normal instances at t_R; data returned unchanged");

    Rng rng(params.seed);
    const auto arity = d.schema().arity();

    // Per-feature spread and observed categories over the whole input.
    std::vector<double> feature_sds(arity, 0.0);
    std::vector<std::vector<double>> categories(arity);
    {
        std::vector<double> column(d.size());
        for (std::size_t f = 0; f < arity; ++f) {
            for (std::size_t i = 0; i < d.size(); ++i) column[i] = d[i].x[f];
            if (d.schema().features()[f].numeric()) {
                feature_sds[f] = population_sd(column);
            } else {
                std::set<double> seen(column.begin(), column.end());
                categories[f].assign(seen.begin(), seen.end());
            }
        }
    }

    const double mean_bin = static_cast<double>(d.size()) / static_cast<double>(bins.size());
    const auto balance_size = static_cast<std::size_t>(std::llround(mean_bin));

    const KnnModel index(d, params.k, cfg);
    std::map<std::size_t, std::vector<Neighbor>> neighborhoods;
    std::uint64_t ordinal = 0;

    std::vector<SynthRecord> records;
    for (const auto& bin : bins) {
        const auto size = bin.members.size();
        if (!bin.rare) {
            std::size_t keep = params.mode == OverMode::balance
                                   ? std::min(size, balance_size)
                                   : static_cast<std::size_t>(std::ceil(params.under_frac * static_cast<double>(size)));
            keep = std::clamp<std::size_t>(keep, 1, size);
            std::vector<std::size_t> chosen = bin.members;
            std::shuffle(chosen.begin(), chosen.end(), rng.engine());
            chosen.resize(keep);
            std::sort(chosen.begin(), chosen.end());
            for (auto i : chosen) records.push_back(SynthRecord{d[i], SynthMethod::original, i, std::nullopt});
            continue;
        }

        for (auto i : bin.members) records.push_back(SynthRecord{d[i], SynthMethod::original, i, std::nullopt});
        const std::size_t goal =
            params.mode == OverMode::balance
                ? std::max(size, balance_size)
                : static_cast<std::size_t>(std::llround(params.multiplier * static_cast<double>(size)));
        if (goal <= size) continue;

        std::vector<double> bin_targets;
        bin_targets.reserve(size);
        for (auto i : bin.members) bin_targets.push_back(*d[i].y);
        const double bin_sd = population_sd(bin_targets);

        for (std::size_t n = size; n < goal; ++n) {
            const auto seed_index = bin.members[rng.index(size)];
            auto it = neighborhoods.find(seed_index);
            if (it == neighborhoods.end())
                it = neighborhoods.emplace(seed_index, index.query(d[seed_index], params.k)).first;
            const auto& nbrs = it->second;
            const auto& pick = nbrs[rng.index(nbrs.size())];
            SynthRecord rec;
            rec.seed_index = seed_index;
            if (pick.distance <= safe_distance(nbrs)) {
                rec.method = SynthMethod::smoter;
                rec.neighbor_index = pick.index;
                rec.instance = smoter_interpolate(d[seed_index], d[pick.index], cfg, rng);
            } else {
                rec.method = SynthMethod::gauss;
                rec.instance = gaussian_perturb(d[seed_index], feature_sds, bin_sd, params.pert, categories, rng);
            }
            rec.instance.uid = synthetic_uid(params.seed, ordinal++);
            records.push_back(std::move(rec));
        }
    }

    std::shuffle(records.begin(), records.end(), rng.engine());
    std::vector<Instance> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.instance);
    result.data = d.with_instances(std::move(out), d.provenance() + "+smogn");
    result.records = std::move(records);
    return result;
}

}  // namespace ssrforge
