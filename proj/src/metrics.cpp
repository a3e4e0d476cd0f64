#include "ssrforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssrforge/error.hpp"

namespace ssrforge {

MetricsReport evaluate(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size())
        throw DataError("metrics: length mismatch (" + std::to_string(truth.size()) + " vs " +
                        std::to_string(pred.size()) + ")");
    const auto n = truth.size();
    if (n < 2) throw DataError("metrics: at least two values are required");
    const double dn = static_cast<double>(n);

    double mean_t = 0.0;
    double mean_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_t += truth[i];
        mean_p += pred[i];
    }
    mean_t /= dn;
    mean_p /= dn;

    double abs_err = 0.0;
    double rss = 0.0;
    double tss = 0.0;
    double spp = 0.0;
    double stp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = truth[i] - pred[i];
        const double dt = truth[i] - mean_t;
        const double dp = pred[i] - mean_p;
        abs_err += std::abs(e);
        rss += e * e;
        tss += dt * dt;
        spp += dp * dp;
        stp += dt * dp;
    }

    MetricsReport m;
    m.n = n;
    m.mae = abs_err / dn;
    m.rmse = std::sqrt(rss / dn);
    if (tss > 0.0) m.r_squared = (tss - rss) / tss;
    if (tss > 0.0 && spp > 0.0) m.pcc = std::clamp(stp / std::sqrt(tss * spp), -1.0, 1.0);
    return m;
}

nlohmann::ordered_json to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["r2"] = m.r_squared ? nlohmann::ordered_json(*m.r_squared) : nlohmann::ordered_json(nullptr);
    j["pcc"] = m.pcc ? nlohmann::ordered_json(*m.pcc) : nlohmann::ordered_json(nullptr);
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    j["n"] = m.n;
    return j;
}

}  // namespace ssrforge
