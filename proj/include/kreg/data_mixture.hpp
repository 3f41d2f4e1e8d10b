#pragma once

#include "kreg/estimators.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace kreg {

/// Generation constants for the two-class mixture. Component means are drawn from
/// N(center, mean_sd^2 I); observations from N(mean, component_sd^2 I) around a
/// uniformly chosen mean of their class.
struct MixtureConfig {
    Eigen::Vector2d center_pos{1.0, 0.0};
    Eigen::Vector2d center_neg{0.0, 1.0};
    double mean_sd = 1.0;
    double component_sd = 0.4472135954999579;  // sqrt(1/5)
    int components_per_class = 10;
};

struct MixtureModel {
    Eigen::MatrixXd means_pos;  // components x 2
    Eigen::MatrixXd means_neg;
    double component_sd = 0.4472135954999579;
    double class_prior = 0.5;
};

struct GeneratedFrom {
    std::uint64_t seed = 0;
};

struct LoadedFrom {
    std::filesystem::path path;
};

struct Dataset {
    Eigen::MatrixXd X;
    Labels y;
    std::variant<GeneratedFrom, LoadedFrom> provenance;

    [[nodiscard]] Eigen::Index size() const { return X.rows(); }
    [[nodiscard]] Eigen::Index dimension() const { return X.cols(); }
};

[[nodiscard]] MixtureModel sample_mixture_model(std::uint64_t seed, const MixtureConfig& config = {});

/// n_per_class observations of class +1 followed by n_per_class of class -1.
[[nodiscard]] Dataset sample_dataset(const MixtureModel& model, int n_per_class, std::uint64_t seed);

/// P(y = +1 | x) under equal class priors.
[[nodiscard]] double bayes_posterior(const MixtureModel& model, const Eigen::Vector2d& x);

struct BayesErrorEstimate {
    double error = 0.0;
    double standard_error = 0.0;
    long draws = 0;
};

/// Monte-Carlo error of the rule 1{posterior > 1/2} on n_mc fresh draws (classes drawn
/// with the model prior). Draws are generated in fixed shards of 10,000 seeded by
/// (seed, shard), so the estimate does not depend on the thread count.
[[nodiscard]] BayesErrorEstimate bayes_error(const MixtureModel& model, long n_mc, std::uint64_t seed);

/// n draws from the standard normal as an n x 1 input matrix.
[[nodiscard]] Eigen::MatrixXd sample_standard_normal_1d(int n, std::uint64_t seed);

enum class DatasetFormat {
    NativeCsv,  // header x1,...,xd,y; labels -1/+1
    EslMixture  // whitespace-separated coordinates then a 0/1 label
};

/// Throws ParseError (with line number) on malformed input and InputError on I/O failure.
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// Writes the native CSV layout with shortest round-trip decimal numbers.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

[[nodiscard]] Dataset parse_dataset(const std::string& text, DatasetFormat format);
[[nodiscard]] std::string format_dataset(const Dataset& dataset);

}  // namespace kreg
