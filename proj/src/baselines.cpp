#include "ssrforge/baselines.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "ssrforge/error.hpp"

namespace ssrforge {

LinearModel::LinearModel(double intercept, std::vector<double> coefficients, std::vector<EncodedColumn> encoding,
                         bool ridge_fallback)
    : intercept_(intercept),
      coefficients_(std::move(coefficients)),
      encoding_(std::move(encoding)),
      ridge_fallback_(ridge_fallback) {
    if (coefficients_.size() != encoding_.size())
        throw ConfigError("linear: coefficient arity does not match the encoding");
}

std::vector<double> LinearModel::encode(const Instance& x) const {
    std::vector<double> row(encoding_.size());
    for (std::size_t j = 0; j < encoding_.size(); ++j) {
        const auto& col = encoding_[j];
        const double v = x.x.at(col.feature);
        row[j] = col.category ? (v == *col.category ? 1.0 : 0.0) : v;
    }
    return row;
}

double LinearModel::predict(const Instance& x) const {
    const auto row = encode(x);
    double y = intercept_;
    for (std::size_t j = 0; j < row.size(); ++j) y += coefficients_[j] * row[j];
    return y;
}

double predict_linear(const LinearModel& m, const Instance& x) { return m.predict(x); }

std::vector<EncodedColumn> linear_encoding(const Dataset& L) {
    std::vector<EncodedColumn> cols;
    const auto& features = L.schema().features();
    for (std::size_t f = 0; f < features.size(); ++f) {
        if (features[f].numeric()) {
            cols.push_back({f, std::nullopt});
            continue;
        }
        std::set<double> seen;
        for (const auto& inst : L.instances()) seen.insert(inst.x[f]);
        bool first = true;
        for (double code : seen) {
            if (first) {
                first = false;
                continue;
            }
            cols.push_back({f, code});
        }
    }
    return cols;
}

LinearModel fit_linear(const Dataset& L) {
    if (!L.fully_labeled()) throw DataError("linear: training set contains unlabeled instances");
    auto encoding = linear_encoding(L);
    const auto p = encoding.size();
    const auto n = L.size();
    if (n < p + 1)
        throw DataError("linear: " + std::to_string(n) + " instances cannot determine " + std::to_string(p + 1) +
                        " coefficients");

    const LinearModel shape(0.0, std::vector<double>(p, 0.0), encoding, false);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        const auto row = shape.encode(L[i]);
        for (std::size_t j = 0; j < p; ++j) X(r, static_cast<Eigen::Index>(j + 1)) = row[j];
        y(r) = *L[i].y;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::VectorXd beta;
    bool ridge = false;
    if (qr.rank() == X.cols()) {
        beta = qr.solve(y);
    } else {
        ridge = true;
        Eigen::MatrixXd gram = X.transpose() * X;
        gram.diagonal().array() += 1e-8;
        beta = gram.ldlt().solve(X.transpose() * y);
    }
    std::vector<double> coef(p);
    for (std::size_t j = 0; j < p; ++j) coef[j] = beta(static_cast<Eigen::Index>(j + 1));
    return LinearModel(beta(0), std::move(coef), std::move(encoding), ridge);
}

KnnRegressor knn_baseline(const Dataset& L, std::size_t k) {
    return KnnRegressor(KnnModel(L, k, DistanceConfig::fit(L, 2.0)));
}

double KnnEnsemble::predict(const Instance& x) const {
    double sum = 0.0;
    for (const auto& m : members_) sum += m.predict(x);
    return sum / static_cast<double>(members_.size());
}

void SelfTrainParams::validate() const {
    if (base_ks.size() < 2) throw ConfigError("mssra: at least two base learners are required");
    for (auto k : base_ks)
        if (k == 0) throw ConfigError("mssra: base neighbor counts must be positive");
    if (agreement_tol && !(*agreement_tol >= 0.0)) throw ConfigError("mssra: agreement_tol must be >= 0");
}

SelfTrainResult self_train_mssra(const Dataset& L, const Dataset& U, const SelfTrainParams& params) {
    params.validate();
    if (!L.fully_labeled()) throw DataError("mssra: labeled set contains unlabeled instances");
    const auto kmax = *std::max_element(params.base_ks.begin(), params.base_ks.end());
    if (L.size() < kmax)
        throw DataError("mssra: labeled set of " + std::to_string(L.size()) + " is smaller than k = " +
                        std::to_string(kmax));

    const auto cfg = coreg_distance(L, U, 2.0);
    double tol = 0.0;
    if (params.agreement_tol) {
        tol = *params.agreement_tol;
    } else {
        const auto t = L.targets();
        const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        tol = 0.05 * (*hi - *lo);
    }

    std::vector<Instance> augmented(L.instances());
    std::vector<Instance> pending(U.instances());
    auto build = [&] {
        std::vector<KnnModel> members;
        const auto ref = L.with_instances(augmented, L.provenance() + "+mssra");
        for (auto k : params.base_ks) members.emplace_back(ref, k, cfg);
        return members;
    };

    SelfTrainResult result{KnnEnsemble(build()), {}, 0, tol};
    for (std::size_t round = 0; round < params.max_rounds && !pending.empty(); ++round) {
        const auto& members = result.ensemble.members();
        std::vector<Instance> keep;
        std::size_t absorbed = 0;
        for (auto& inst : pending) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            double sum = 0.0;
            for (const auto& m : members) {
                const double v = m.predict(inst);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                sum += v;
            }
            if (hi - lo <= tol) {
                inst.y = sum / static_cast<double>(members.size());
                augmented.push_back(std::move(inst));
                ++absorbed;
            } else {
                keep.push_back(std::move(inst));
            }
        }
        pending = std::move(keep);
        if (absorbed == 0) break;
        result.absorbed_per_round.push_back(absorbed);
        result.ensemble = KnnEnsemble(build());
    }
    result.final_labeled = augmented.size();
    return result;
}

}  // namespace ssrforge
