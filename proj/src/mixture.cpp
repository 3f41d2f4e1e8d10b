#include "kreg/data_mixture.hpp"

#include "kreg/errors.hpp"
#include "kreg/parallel.hpp"
#include "kreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kreg {

MixtureModel sample_mixture_model(std::uint64_t seed, const MixtureConfig& config) {
    if (config.components_per_class < 1) throw InputError("mixture needs at least one component per class");
    Rng rng(seed);
    MixtureModel model;
    model.component_sd = config.component_sd;
    model.means_pos.resize(config.components_per_class, 2);
    model.means_neg.resize(config.components_per_class, 2);
    for (int k = 0; k < config.components_per_class; ++k) {
        for (int c = 0; c < 2; ++c) model.means_pos(k, c) = config.center_pos(c) + config.mean_sd * rng.normal();
    }
    for (int k = 0; k < config.components_per_class; ++k) {
        for (int c = 0; c < 2; ++c) model.means_neg(k, c) = config.center_neg(c) + config.mean_sd * rng.normal();
    }
    return model;
}

namespace {

Eigen::Vector2d draw_point(const Eigen::MatrixXd& means, double sd, Rng& rng) {
    const auto k = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(means.rows())));
    const double x0 = means(k, 0) + sd * rng.normal();
    const double x1 = means(k, 1) + sd * rng.normal();
    return {x0, x1};
}

// log of sum_k exp(-|x - m_k|^2 / (2 sd^2)); shared normalizing constants cancel.
double log_mixture_density(const Eigen::MatrixXd& means, double sd, const Eigen::Vector2d& x) {
    const double scale = 1.0 / (2.0 * sd * sd);
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents(static_cast<std::size_t>(means.rows()));
    for (Eigen::Index k = 0; k < means.rows(); ++k) {
        const double dx = x(0) - means(k, 0);
        const double dy = x(1) - means(k, 1);
        exponents[static_cast<std::size_t>(k)] = -(dx * dx + dy * dy) * scale;
        top = std::max(top, exponents[static_cast<std::size_t>(k)]);
    }
    double sum = 0.0;
    for (double e : exponents) sum += std::exp(e - top);
    return top + std::log(sum);
}

constexpr long kShardSize = 10'000;

}  // namespace

Dataset sample_dataset(const MixtureModel& model, int n_per_class, std::uint64_t seed) {
    if (n_per_class < 1) throw InputError("sample_dataset: n_per_class must be at least 1");
    Rng rng(seed);
    Dataset data;
    data.X.resize(2 * n_per_class, 2);
    data.y.resize(2 * n_per_class);
    for (int i = 0; i < n_per_class; ++i) {
        data.X.row(i) = draw_point(model.means_pos, model.component_sd, rng).transpose();
        data.y(i) = 1;
    }
    for (int i = 0; i < n_per_class; ++i) {
        data.X.row(n_per_class + i) = draw_point(model.means_neg, model.component_sd, rng).transpose();
        data.y(n_per_class + i) = -1;
    }
    data.provenance = GeneratedFrom{seed};
    return data;
}

double bayes_posterior(const MixtureModel& model, const Eigen::Vector2d& x) {
    const double log_pos = std::log(model.class_prior) +
                           log_mixture_density(model.means_pos, model.component_sd, x) -
                           std::log(static_cast<double>(model.means_pos.rows()));
    const double log_neg = std::log(1.0 - model.class_prior) +
                           log_mixture_density(model.means_neg, model.component_sd, x) -
                           std::log(static_cast<double>(model.means_neg.rows()));
    // logistic of the log-odds, stable in both tails
    const double log_odds = log_pos - log_neg;
    if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

BayesErrorEstimate bayes_error(const MixtureModel& model, long n_mc, std::uint64_t seed) {
    if (n_mc < 1000) throw InputError("bayes_error: n_mc must be at least 1000");
    const long shards = (n_mc + kShardSize - 1) / kShardSize;
    std::vector<long> mistakes(static_cast<std::size_t>(shards), 0);
    parallel_for(static_cast<std::size_t>(shards), [&](std::size_t shard) {
        Rng rng(derive_seed(seed, shard));
        const long begin = static_cast<long>(shard) * kShardSize;
        const long count = std::min(kShardSize, n_mc - begin);
        long wrong = 0;
        for (long t = 0; t < count; ++t) {
            const bool positive = rng.uniform() < model.class_prior;
            const Eigen::Vector2d x =
                draw_point(positive ? model.means_pos : model.means_neg, model.component_sd, rng);
            const bool predicted_positive = bayes_posterior(model, x) > 0.5;
            if (predicted_positive != positive) ++wrong;
        }
        mistakes[shard] = wrong;
    });
    long total = 0;
    for (long m : mistakes) total += m;
    BayesErrorEstimate out;
    out.draws = n_mc;
    out.error = static_cast<double>(total) / static_cast<double>(n_mc);
    out.standard_error = std::sqrt(out.error * (1.0 - out.error) / static_cast<double>(n_mc));
    return out;
}

Eigen::MatrixXd sample_standard_normal_1d(int n, std::uint64_t seed) {
    if (n < 1) throw InputError("sample size must be at least 1");
    Rng rng(seed);
    Eigen::MatrixXd X(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = rng.normal();
    return X;
}

}  // namespace kreg
