#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <json.hpp>

namespace ssrforge {

/// R², Pearson correlation, RMSE and MAE of a prediction vector. R² is undefined
/// when the truth has zero variance; PCC when either vector does.
struct MetricsReport {
    std::optional<double> r_squared;
    std::optional<double> pcc;
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
};

MetricsReport evaluate(std::span<const double> truth, std::span<const double> pred);

/// {"r2":..,"pcc":..,"rmse":..,"mae":..,"n":..}; undefined values become null.
nlohmann::ordered_json to_json(const MetricsReport& m);

}  // namespace ssrforge
