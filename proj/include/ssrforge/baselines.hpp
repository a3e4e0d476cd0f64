#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "ssrforge/coreg.hpp"
#include "ssrforge/data.hpp"
#include "ssrforge/distance.hpp"

namespace ssrforge {

/// Anything that maps an instance to a real prediction.
class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict(const Instance& x) const = 0;
};

// ---------------------------------------------------------------------------
// Ordinary least squares

/// One design column: a numeric feature, or one non-reference category of a nominal feature.
struct EncodedColumn {
    std::size_t feature = 0;
    std::optional<double> category;  // nominal indicator when set
};

class LinearModel final : public Regressor {
public:
    LinearModel(double intercept, std::vector<double> coefficients, std::vector<EncodedColumn> encoding,
                bool ridge_fallback);

    double intercept() const { return intercept_; }
    const std::vector<double>& coefficients() const { return coefficients_; }
    const std::vector<EncodedColumn>& encoding() const { return encoding_; }
    /// True when the design was rank deficient and a 1e-8 ridge term was added.
    bool ridge_fallback() const { return ridge_fallback_; }

    std::vector<double> encode(const Instance& x) const;
    double predict(const Instance& x) const override;

private:
    double intercept_;
    std::vector<double> coefficients_;
    std::vector<EncodedColumn> encoding_;
    bool ridge_fallback_;
};

/// One-hot encoding (observed categories, first dropped) for the schema of `L`.
std::vector<EncodedColumn> linear_encoding(const Dataset& L);

LinearModel fit_linear(const Dataset& L);
double predict_linear(const LinearModel& m, const Instance& x);

// ---------------------------------------------------------------------------
// k-NN and ensembles

class KnnRegressor final : public Regressor {
public:
    explicit KnnRegressor(KnnModel model) : model_(std::move(model)) {}
    const KnnModel& model() const { return model_; }
    double predict(const Instance& x) const override { return model_.predict(x); }

private:
    KnnModel model_;
};

/// Euclidean k-NN over L with ranges taken from L.
KnnRegressor knn_baseline(const Dataset& L, std::size_t k);

/// Mean of several k-NN regressors.
class KnnEnsemble final : public Regressor {
public:
    explicit KnnEnsemble(std::vector<KnnModel> members) : members_(std::move(members)) {}
    const std::vector<KnnModel>& members() const { return members_; }
    double predict(const Instance& x) const override;

private:
    std::vector<KnnModel> members_;
};

class CoregRegressor final : public Regressor {
public:
    explicit CoregRegressor(CoregModel model) : model_(std::move(model)) {}
    const CoregModel& model() const { return model_; }
    double predict(const Instance& x) const override { return model_.predict(x); }

private:
    CoregModel model_;
};

// ---------------------------------------------------------------------------
// Multi-regressor self-training (k-NN final stage)

struct SelfTrainParams {
    std::vector<std::size_t> base_ks{3, 7, 9};
    std::optional<double> agreement_tol;  // default: 5% of the labeled target range
    std::size_t max_rounds = 10;

    void validate() const;
};

struct SelfTrainResult {
    KnnEnsemble ensemble;
    std::vector<std::size_t> absorbed_per_round;
    std::size_t final_labeled = 0;
    double agreement_tol = 0.0;
};

SelfTrainResult self_train_mssra(const Dataset& L, const Dataset& U, const SelfTrainParams& params);

}  // namespace ssrforge
