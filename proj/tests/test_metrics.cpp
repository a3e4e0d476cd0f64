#include <gtest/gtest.h>

#include <random>

#include "ssrforge/error.hpp"
#include "ssrforge/metrics.hpp"
#include "metrics_oracle.hpp"

using namespace ssrforge;

TEST(Metrics, PerfectPrediction) {
    const std::vector<double> t{1, 2, 3};
    const auto m = evaluate(t, t);
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(*m.r_squared, 1.0);
    EXPECT_EQ(*m.pcc, 1.0);
    EXPECT_EQ(m.n, 3u);
}

TEST(Metrics, ShiftedByOne) {
    const std::vector<double> t{1, 2, 3, 4}, p{2, 3, 4, 5};
    const auto m = evaluate(t, p);
    EXPECT_EQ(m.mae, 1.0);
    EXPECT_EQ(m.rmse, 1.0);
    EXPECT_EQ(*m.r_squared, 0.2);
    EXPECT_EQ(*m.pcc, 1.0);
}

TEST(Metrics, ConstantPredictionHasNoCorrelation) {
    const std::vector<double> t{0, 0, 1, 1}, p{0.5, 0.5, 0.5, 0.5};
    const auto m = evaluate(t, p);
    EXPECT_EQ(m.mae, 0.5);
    EXPECT_EQ(m.rmse, 0.5);
    EXPECT_EQ(*m.r_squared, 0.0);
    EXPECT_FALSE(m.pcc.has_value());
}

TEST(Metrics, ConstantTruthLeavesRSquaredUndefined) {
    const std::vector<double> t{2, 2, 2}, p{1, 2, 3};
    const auto m = evaluate(t, p);
    EXPECT_FALSE(m.r_squared.has_value());
    EXPECT_FALSE(m.pcc.has_value());
    const auto j = to_json(m);
    EXPECT_TRUE(j["r2"].is_null());
    EXPECT_TRUE(j["pcc"].is_null());
    EXPECT_EQ(j["n"], 3);
}

TEST(Metrics, Preconditions) {
    const std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(evaluate(a, b), DataError);
    EXPECT_THROW(evaluate(b, b), DataError);
}

TEST(Metrics, MatchesTwoPassOracle) {
    std::mt19937_64 g(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + g() % 500;
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::vector<double> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = u(g);
            p[i] = 0.6 * t[i] + u(g);
        }
        const auto m = evaluate(t, p);
        const auto o = metrics_oracle::compute(t, p);
        EXPECT_NEAR(m.mae, o.mae, 1e-12);
        EXPECT_NEAR(m.rmse, o.rmse, 1e-12);
        EXPECT_NEAR(*m.r_squared, o.r2, 1e-12);
        EXPECT_NEAR(*m.pcc, o.pcc, 1e-12);
    }
}

TEST(Metrics, Invariants) {
    std::mt19937_64 g(2);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> t(50), p(50), shifted(50), scaled(50);
        for (std::size_t i = 0; i < 50; ++i) {
            t[i] = z(g);
            p[i] = t[i] + z(g);
            shifted[i] = p[i] + 3.0;
            scaled[i] = 2.5 * p[i];
        }
        const auto m = evaluate(t, p);
        EXPECT_LE(m.mae, m.rmse + 1e-15);
        EXPECT_LE(*m.r_squared, 1.0);
        EXPECT_GE(*m.pcc, -1.0);
        EXPECT_LE(*m.pcc, 1.0);
        EXPECT_NEAR(*evaluate(t, shifted).pcc, *m.pcc, 1e-12);
        EXPECT_NEAR(*evaluate(t, scaled).pcc, *m.pcc, 1e-12);
        EXPECT_NEAR(*evaluate(p, t).pcc, *m.pcc, 1e-12);
    }
}
