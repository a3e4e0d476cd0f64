#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ssrforge/data.hpp"
#include "ssrforge/distance.hpp"

namespace ssrforge {

struct CoregParams {
    std::size_t k1 = 3;
    std::size_t k2 = 3;
    double p1 = 2.0;
    double p2 = 3.0;
    std::size_t max_iterations = 500;
    std::size_t pool_size = 100;
    std::uint64_t seed = 0;

    /// The 100-iteration budget used before tuning.
    static CoregParams initial_budget();
    void validate() const;
};

struct CoregStep {
    std::size_t iteration = 0;
    int learner = 1;  // learner whose prediction became the pseudo-label
    InstanceId uid = 0;
    double delta = 0.0;
    double pseudo_label = 0.0;
};

/// Two k-NN regressors trained on their augmented labeled sets; predicts by averaging.
class CoregModel {
public:
    CoregModel(KnnModel learner1, KnnModel learner2, std::vector<CoregStep> history, std::size_t iterations);

    const KnnModel& learner1() const { return learner1_; }
    const KnnModel& learner2() const { return learner2_; }
    const std::vector<CoregStep>& history() const { return history_; }
    std::size_t iterations() const { return iterations_; }

    double predict(const Instance& x) const;

private:
    KnnModel learner1_;
    KnnModel learner2_;
    std::vector<CoregStep> history_;
    std::size_t iterations_;
};

/// Squared-error reduction over the candidate's labeled neighborhood when the
/// learner is retrained with (x_u, y_hat) added. Predictions at neighborhood
/// members skip the member itself.
double delta_mse(const KnnModel& learner, const Instance& x_u, double y_hat);

/// Distance configuration shared by both learners: ranges over L and U together.
DistanceConfig coreg_distance(const Dataset& labeled, const Dataset& unlabeled, double order);

CoregModel coreg_train(const Dataset& labeled, const Dataset& unlabeled, const CoregParams& params);

double coreg_predict(const CoregModel& model, const Instance& x);

}  // namespace ssrforge
