#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "ssrforge/error.hpp"
#include "ssrforge/smogn.hpp"
#include "support.hpp"

using namespace ssrforge;
using namespace testsupport;

namespace {

std::vector<Neighbor> at(std::initializer_list<double> ds) {
    std::vector<Neighbor> out;
    std::size_t i = 0;
    for (double d : ds) out.push_back({i++, d});
    return out;
}

Instance labeled_point(std::vector<double> x, double y) {
    Instance i;
    i.x = std::move(x);
    i.y = y;
    return i;
}

// 800 targets around 0.7 and 100 around 0.15, two numerics and one nominal.
Dataset skewed(std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> major(0.7, 0.03), minor(0.15, 0.02);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto schema = make_schema(2, {3});
    std::vector<Instance> rows;
    for (std::size_t i = 0; i < 900; ++i) {
        const bool rare = i % 9 == 0;
        Instance inst;
        inst.uid = i;
        inst.x = {u(g) + (rare ? 1.0 : 0.0), u(g), static_cast<double>(g() % 3)};
        inst.y = rare ? minor(g) : major(g);
        rows.push_back(std::move(inst));
    }
    return Dataset(schema, std::move(rows), "test:skewed");
}

// Rare membership of each output row, read off its record.
double rare_share(const SmognResult& r) {
    std::set<std::size_t> rare_inputs;
    for (const auto& b : r.partition.bins)
        if (b.rare) rare_inputs.insert(b.members.begin(), b.members.end());
    std::size_t n = 0;
    for (const auto& rec : r.records)
        if (rec.method != SynthMethod::original || rare_inputs.count(rec.seed_index)) ++n;
    return static_cast<double>(n) / static_cast<double>(r.records.size());
}

}  // namespace

TEST(SafeDistance, Medians) {
    EXPECT_DOUBLE_EQ(safe_distance(at({2, 4, 6})), 2.0);
    EXPECT_DOUBLE_EQ(safe_distance(at({3, 1})), 1.0);
    EXPECT_DOUBLE_EQ(safe_distance(at({0.8})), 0.4);
    EXPECT_THROW(safe_distance(at({})), DataError);
}

TEST(Smoter, ZeroStepReturnsTheSeed) {
    const auto d = random_dataset(10, 3, {4}, 1);
    const auto cfg = DistanceConfig::fit(d, 2.0);
    StubRandom zero({0.0});
    const auto out = smoter_interpolate(d[0], d[1], cfg, zero);
    EXPECT_EQ(out.x, d[0].x);
    EXPECT_EQ(*out.y, *d[0].y);
}

TEST(Smoter, MidpointOfAUnitSegment) {
    const auto d = line_dataset({{0.0, 0.0}, {1.0, 1.0}});
    const auto cfg = DistanceConfig::fit(d, 2.0);
    StubRandom half({0.5});
    const auto out = smoter_interpolate(d[0], d[1], cfg, half);
    EXPECT_DOUBLE_EQ(out.x[0], 0.5);
    EXPECT_DOUBLE_EQ(*out.y, 0.5);
}

TEST(Smoter, TargetWeightsFavorTheCloserEndpoint) {
    const auto d = line_dataset({{0.0, 0.0}, {1.0, 1.0}});
    const auto cfg = DistanceConfig::fit(d, 2.0);
    StubRandom quarter({0.25});
    const auto out = smoter_interpolate(d[0], d[1], cfg, quarter);
    EXPECT_DOUBLE_EQ(*out.y, 0.25);
}

TEST(Smoter, OutputLiesInTheSeedNeighborBox) {
    const auto d = random_dataset(200, 4, {3, 5}, 2);
    const auto cfg = DistanceConfig::fit(d, 2.0);
    Rng rng(3);
    std::size_t violations = 0;
    for (int n = 0; n < 10000; ++n) {
        const auto& a = d[rng.index(d.size())];
        const auto& b = d[rng.index(d.size())];
        const auto out = smoter_interpolate(a, b, cfg, rng);
        for (std::size_t f = 0; f < out.x.size(); ++f) {
            if (cfg.kinds[f] == FeatureKind::numeric) {
                if (out.x[f] < std::min(a.x[f], b.x[f]) || out.x[f] > std::max(a.x[f], b.x[f])) ++violations;
            } else if (out.x[f] != a.x[f] && out.x[f] != b.x[f]) {
                ++violations;
            }
        }
        if (*out.y < std::min(*a.y, *b.y) || *out.y > std::max(*a.y, *b.y)) ++violations;
    }
    EXPECT_EQ(violations, 0u);
}

TEST(Gauss, ZeroNoiseIsIdentity) {
    const auto seed = labeled_point({0.3, 2.0, 1.0}, 0.4);
    const std::vector<double> sds{1.0, 1.0, 0.0};
    const std::vector<std::vector<double>> cats{{}, {}, {0.0, 1.0, 2.0}};
    StubRandom keep({0.99}, {0.0});
    const auto out = gaussian_perturb(seed, sds, 0.1, 0.05, cats, keep);
    EXPECT_EQ(out.x, seed.x);
    EXPECT_EQ(*out.y, *seed.y);
}

TEST(Gauss, FlipBranchDrawsAnObservedCategory) {
    const auto seed = labeled_point({1.0}, 0.4);
    const std::vector<double> sds{0.0};
    const std::vector<std::vector<double>> cats{{0.0, 1.0, 2.0}};
    StubRandom flip({0.0}, {0.0}, 2);
    EXPECT_EQ(gaussian_perturb(seed, sds, 0.1, 0.05, cats, flip).x[0], 2.0);
}

TEST(Gauss, EmpiricalSpreadMatchesPert) {
    const auto seed = labeled_point({0.5, 10.0}, 0.5);
    const std::vector<double> sds{0.2, 3.0};
    const std::vector<std::vector<double>> cats{{}, {}};
    Rng rng(5);
    std::vector<std::vector<double>> cols(3);
    for (int n = 0; n < 10000; ++n) {
        const auto out = gaussian_perturb(seed, sds, 0.1, 0.05, cats, rng);
        cols[0].push_back(out.x[0]);
        cols[1].push_back(out.x[1]);
        cols[2].push_back(*out.y);
    }
    EXPECT_NEAR(sample_sd(cols[0]), 0.05 * 0.2, 0.1 * 0.05 * 0.2);
    EXPECT_NEAR(sample_sd(cols[1]), 0.05 * 3.0, 0.1 * 0.05 * 3.0);
    EXPECT_NEAR(sample_sd(cols[2]), 0.05 * 0.1, 0.1 * 0.05 * 0.1);
}

TEST(Smogn, BalanceModeOnASkewedSet) {
    const auto d = skewed(1);
    SmognParams p;
    p.tails = Tails::low;
    p.seed = 7;
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    EXPECT_EQ(r.data.size(), r.records.size());
    EXPECT_EQ(r.partition.rare_bins(), 1u);
    EXPECT_EQ(r.partition.normal_bins(), 1u);
    EXPECT_NEAR(rare_share(r), 0.5, 0.1);
    EXPECT_GT(r.count(SynthMethod::smoter) + r.count(SynthMethod::gauss), 0u);
}

TEST(Smogn, BalanceTargetsTheMeanBinSize) {
    const auto d = skewed(2);
    SmognParams p;
    p.seed = 1;
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    const double mean_bin = static_cast<double>(d.size()) / static_cast<double>(r.partition.bins.size());
    std::map<std::size_t, std::size_t> bin_of;
    for (std::size_t b = 0; b < r.partition.bins.size(); ++b)
        for (auto i : r.partition.bins[b].members) bin_of[i] = b;
    std::vector<std::size_t> out_size(r.partition.bins.size(), 0);
    for (const auto& rec : r.records) ++out_size[bin_of.at(rec.seed_index)];
    for (std::size_t b = 0; b < r.partition.bins.size(); ++b) {
        const auto in = r.partition.bins[b].members.size();
        if (r.partition.bins[b].rare) {
            if (static_cast<double>(in) < mean_bin)
                EXPECT_NEAR(static_cast<double>(out_size[b]), mean_bin, 1.0);
            else
                EXPECT_EQ(out_size[b], in);
        } else if (static_cast<double>(in) > mean_bin) {
            EXPECT_NEAR(static_cast<double>(out_size[b]), mean_bin, 1.0);
        } else {
            EXPECT_EQ(out_size[b], in);
        }
    }
}

TEST(Smogn, BalancedInputIsAFixpoint) {
    std::vector<std::pair<double, double>> xy;
    for (int i = 0; i < 50; ++i) xy.push_back({i * 0.01, 0.3 * i / 50.0});
    for (int i = 0; i < 50; ++i) xy.push_back({0.5 + i * 0.01, 0.9 + 0.1 * i / 50.0});
    const auto d = line_dataset(xy);
    SmognParams p;
    p.control_points = std::vector<ControlPoint>{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    ASSERT_EQ(r.partition.bins.size(), 2u);
    EXPECT_EQ(r.count(SynthMethod::original), d.size());
    std::multiset<InstanceId> in, out;
    for (const auto& i : d.instances()) in.insert(i.uid);
    for (const auto& i : r.data.instances()) out.insert(i.uid);
    EXPECT_EQ(in, out);
}

TEST(Smogn, FixedModeGrowsAndShrinks) {
    const auto d = skewed(3);
    SmognParams p;
    p.mode = OverMode::fixed;
    p.multiplier = 3.0;
    p.under_frac = 0.5;
    p.tails = Tails::low;
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    const auto rare_in = r.partition.rare_count();
    const auto normal_in = r.partition.normal_count();
    EXPECT_EQ(r.data.size(), 3 * rare_in + (normal_in + 1) / 2);
}

TEST(Smogn, SyntheticRowsHaveFreshIdentities) {
    const auto d = skewed(4);
    SmognParams p;
    p.tails = Tails::low;
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    std::set<InstanceId> inputs;
    for (const auto& i : d.instances()) inputs.insert(i.uid);
    std::set<InstanceId> seen;
    for (const auto& rec : r.records) {
        EXPECT_TRUE(seen.insert(rec.instance.uid).second);
        if (rec.method == SynthMethod::original) {
            EXPECT_TRUE(inputs.count(rec.instance.uid));
        } else {
            EXPECT_TRUE(rec.instance.uid & synthetic_uid_bit);
            EXPECT_EQ(rec.method == SynthMethod::smoter, rec.neighbor_index.has_value());
        }
    }
}

TEST(Smogn, SameSeedSameOutput) {
    const auto d = skewed(5);
    SmognParams p;
    p.seed = 11;
    const auto cfg = DistanceConfig::fit(d, 2.0);
    const auto a = smogn(d, p, cfg);
    const auto b = smogn(d, p, cfg);
    ASSERT_EQ(a.data.size(), b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        EXPECT_EQ(a.data[i].x, b.data[i].x);
        EXPECT_EQ(a.data[i].y, b.data[i].y);
        EXPECT_EQ(a.data[i].uid, b.data[i].uid);
    }
}

TEST(Smogn, NoRareRowsLeavesTheDataAlone) {
    const auto d = skewed(6);
    SmognParams p;
    p.control_points = std::vector<ControlPoint>{{-5.0, 1.0, 0.0}, {-4.0, 0.0, 0.0}};
    const auto r = smogn(d, p, DistanceConfig::fit(d, 2.0));
    EXPECT_EQ(r.data.size(), d.size());
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Smogn, Preconditions) {
    const auto d = skewed(7);
    const auto cfg = DistanceConfig::fit(d, 2.0);
    SmognParams p;
    p.t_r = 1.0;
    EXPECT_THROW(smogn(d, p, cfg), ConfigError);
    p = {};
    p.pert = 0.0;
    EXPECT_THROW(smogn(d, p, cfg), ConfigError);
    auto rows = d.instances();
    rows[0].y.reset();
    EXPECT_THROW(smogn(d.with_instances(rows, ""), SmognParams{}, cfg), DataError);
}
