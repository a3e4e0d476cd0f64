#include "ssrforge/coreg.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "ssrforge/error.hpp"
#include "ssrforge/random.hpp"

namespace ssrforge {

CoregParams CoregParams::initial_budget() {
    CoregParams p;
    p.max_iterations = 100;
    return p;
}

void CoregParams::validate() const {
    if (k1 == 0 || k2 == 0) throw ConfigError("coreg: neighbor counts must be positive");
    if (!(p1 >= 1.0) || !(p2 >= 1.0)) throw ConfigError("coreg: distance orders must be >= 1");
    if (p1 == p2) throw ConfigError("coreg: the two learners need different distance orders");
    if (max_iterations == 0) throw ConfigError("coreg: max_iterations must be positive");
    if (pool_size == 0) throw ConfigError("coreg: pool_size must be positive");
}

CoregModel::CoregModel(KnnModel learner1, KnnModel learner2, std::vector<CoregStep> history,
                       std::size_t iterations)
    : learner1_(std::move(learner1)),
      learner2_(std::move(learner2)),
      history_(std::move(history)),
      iterations_(iterations) {}

double CoregModel::predict(const Instance& x) const {
    return (learner1_.predict(x) + learner2_.predict(x)) / 2.0;
}

double coreg_predict(const CoregModel& model, const Instance& x) { return model.predict(x); }

namespace {

double mean_target(std::span<const Neighbor> nn, std::span<const double> targets, double extra_target,
                   std::size_t extra_index) {
    double sum = 0.0;
    for (const auto& n : nn) sum += n.index == extra_index ? extra_target : targets[n.index];
    return sum / static_cast<double>(nn.size());
}

}  // namespace

double delta_mse(const KnnModel& learner, const Instance& x_u, double y_hat) {
    const auto& ref = learner.reference();
    const auto k = learner.k();
    if (ref.size() <= k)
        throw DataError("delta_mse: need more than k = " + std::to_string(k) + " labeled instances");
    const auto& cfg = learner.config();
    const auto targets = learner.targets();
    const auto nu = cfg.normalize(x_u);
    const std::size_t added = ref.size();  // index x_u takes in the refined reference

    double delta = 0.0;
    for (const auto& omega : learner.query(x_u, k)) {
        const auto& xi = ref[omega.index];
        const auto nn = learner.query(xi, k);
        const double h = mean_target(nn, targets, 0.0, added);
        TopK refined(k);
        for (const auto& n : nn) refined.offer(n);
        refined.offer({added, minkowski(cfg.normalize(xi), nu, cfg)});
        const double h_new = mean_target(refined.items(), targets, y_hat, added);
        const double yi = targets[omega.index];
        delta += (yi - h) * (yi - h) - (yi - h_new) * (yi - h_new);
    }
    return delta;
}

DistanceConfig coreg_distance(const Dataset& labeled, const Dataset& unlabeled, double order) {
    const Dataset* refs[] = {&labeled, &unlabeled};
    return DistanceConfig::fit(unlabeled.empty() ? std::span<const Dataset* const>(refs, 1)
                                                 : std::span<const Dataset* const>(refs, 2),
                               order);
}

namespace {

// One learner's state during training. Every instance of L ∪ U (the
// "universe") keeps its k nearest neighbors within this learner's current
// labeled set, excluding itself, so Δ needs no scans.
class Learner {
public:
    Learner(std::size_t k, DistanceConfig cfg, std::span<const double> rows, std::size_t dim,
            std::size_t universe, std::size_t initial, std::span<const double> initial_targets)
        : k_(k), cfg_(std::move(cfg)), rows_(rows), dim_(dim) {
        cache_.assign(universe, TopK(k));
        for (std::size_t i = 0; i < initial; ++i) add(i, initial_targets[i]);
    }

    std::size_t size() const { return members_.size(); }
    const std::vector<std::size_t>& members() const { return members_; }
    const std::vector<double>& labels() const { return labels_; }

    double dist(std::size_t a, std::size_t b) const {
        return minkowski(rows_.subspan(a * dim_, dim_), rows_.subspan(b * dim_, dim_), cfg_);
    }

    void add(std::size_t u, double label) {
        const std::size_t pos = members_.size();
        members_.push_back(u);
        labels_.push_back(label);
        for (std::size_t v = 0; v < cache_.size(); ++v)
            if (v != u) cache_[v].offer({pos, dist(v, u)});
    }

    double predict(std::size_t u) const { return mean(cache_[u].items(), 0.0, npos); }

    // Δ for universe index u (not a member) with pseudo-label y_hat.
    double delta(std::size_t u, double y_hat) const {
        const std::size_t added = members_.size();
        double total = 0.0;
        for (const auto& omega : cache_[u].items()) {
            const std::size_t w = members_[omega.index];
            const auto& nn = cache_[w];
            const double h = mean(nn.items(), 0.0, npos);
            TopK refined(k_);
            for (const auto& n : nn.items()) refined.offer(n);
            refined.offer({added, dist(w, u)});
            const double h_new = mean(refined.items(), y_hat, added);
            const double yi = labels_[omega.index];
            total += (yi - h) * (yi - h) - (yi - h_new) * (yi - h_new);
        }
        return total;
    }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    double mean(std::span<const Neighbor> nn, double extra, std::size_t extra_pos) const {
        double sum = 0.0;
        for (const auto& n : nn) sum += n.index == extra_pos ? extra : labels_[n.index];
        return sum / static_cast<double>(nn.size());
    }

    std::size_t k_;
    DistanceConfig cfg_;
    std::span<const double> rows_;
    std::size_t dim_;
    std::vector<TopK> cache_;
    std::vector<std::size_t> members_;
    std::vector<double> labels_;
};

struct Choice {
    std::size_t pool_pos = 0;
    double delta = 0.0;
    double label = 0.0;
};

std::optional<Choice> select(const Learner& learner, std::span<const std::size_t> pool,
                             std::optional<std::size_t> taken) {
    std::optional<Choice> best;
    for (std::size_t p = 0; p < pool.size(); ++p) {
        if (taken && *taken == pool[p]) continue;
        const double y_hat = learner.predict(pool[p]);
        const double d = learner.delta(pool[p], y_hat);
        if (d > 0.0 && (!best || d > best->delta)) best = Choice{p, d, y_hat};
    }
    return best;
}

}  // namespace

CoregModel coreg_train(const Dataset& labeled, const Dataset& unlabeled, const CoregParams& params) {
    params.validate();
    if (!labeled.fully_labeled()) throw DataError("coreg: labeled set contains unlabeled instances");
    const auto kmax = std::max(params.k1, params.k2);
    if (labeled.size() < kmax || (!unlabeled.empty() && labeled.size() <= kmax))
        throw DataError("coreg: labeled set of " + std::to_string(labeled.size()) +
                        " instances is too small for k = " + std::to_string(kmax));

    const auto cfg1 = coreg_distance(labeled, unlabeled, params.p1);
    auto cfg2 = cfg1;
    cfg2.order = params.p2;

    // Universe: L first, then U.
    const std::size_t nl = labeled.size();
    const std::size_t n = nl + unlabeled.size();
    const auto dim = cfg1.arity();
    auto instance = [&](std::size_t u) -> const Instance& { return u < nl ? labeled[u] : unlabeled[u - nl]; };
    std::vector<double> rows(n * dim);
    for (std::size_t u = 0; u < n; ++u)
        cfg1.normalize_into(instance(u).x, std::span<double>(rows).subspan(u * dim, dim));
    const auto targets = labeled.targets();

    std::vector<CoregStep> history;
    std::size_t iterations = 0;
    std::vector<std::size_t> remaining;
    for (std::size_t u = nl; u < n; ++u) remaining.push_back(u);

    std::vector<std::size_t> extra1;  // universe indices added to L1, with labels
    std::vector<double> extra1_labels;
    std::vector<std::size_t> extra2;
    std::vector<double> extra2_labels;

    if (!remaining.empty()) {
        Learner h1(params.k1, cfg1, rows, dim, n, nl, targets);
        Learner h2(params.k2, cfg2, rows, dim, n, nl, targets);
        Rng rng(params.seed);
        std::vector<std::size_t> pool;
        while (iterations < params.max_iterations && !remaining.empty()) {
            ++iterations;
            // Partial Fisher–Yates: the first pool_size slots form U'.
            const auto m = std::min(params.pool_size, remaining.size());
            for (std::size_t i = 0; i < m; ++i) std::swap(remaining[i], remaining[i + rng.index(remaining.size() - i)]);
            pool.assign(remaining.begin(), remaining.begin() + static_cast<std::ptrdiff_t>(m));

            const auto c1 = select(h1, pool, std::nullopt);
            const auto c2 = select(h2, pool, c1 ? std::optional<std::size_t>(pool[c1->pool_pos]) : std::nullopt);
            if (!c1 && !c2) break;

            auto take = [&](const Choice& c, int learner, Learner& other, std::vector<std::size_t>& extra,
                            std::vector<double>& extra_labels) {
                const auto u = pool[c.pool_pos];
                other.add(u, c.label);
                extra.push_back(u);
                extra_labels.push_back(c.label);
                history.push_back(CoregStep{iterations, learner, instance(u).uid, c.delta, c.label});
                remaining.erase(std::find(remaining.begin(), remaining.end(), u));
            };
            if (c1) take(*c1, 1, h2, extra2, extra2_labels);
            if (c2) take(*c2, 2, h1, extra1, extra1_labels);
        }
    }

    auto augmented = [&](const std::vector<std::size_t>& extra, const std::vector<double>& labels) {
        std::vector<Instance> out(labeled.instances());
        for (std::size_t i = 0; i < extra.size(); ++i) {
            Instance inst = instance(extra[i]);
            inst.y = labels[i];
            out.push_back(std::move(inst));
        }
        return labeled.with_instances(std::move(out), labeled.provenance() + "+coreg");
    };
    KnnModel l1(augmented(extra1, extra1_labels), params.k1, cfg1);
    KnnModel l2(augmented(extra2, extra2_labels), params.k2, cfg2);
    return CoregModel(std::move(l1), std::move(l2), std::move(history), iterations);
}

}  // namespace ssrforge
