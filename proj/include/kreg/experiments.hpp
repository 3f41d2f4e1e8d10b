#pragma once

#include "kreg/data_mixture.hpp"
#include "kreg/estimators.hpp"
#include "kreg/svg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kreg {

inline constexpr const char* kVersion = "kreg 1.0.0";

/// Where training or test inputs come from.
///   gen:N      mixture data, N observations per class
///   gauss1d:N  N standard-normal draws in one dimension (no labels)
///   esl:PATH   whitespace layout with 0/1 labels
///   csv:PATH   native CSV
///   PATH       native CSV if the extension is .csv, ESL layout otherwise
struct DataSource {
    enum class Kind { Generate, Gauss1d, File };
    Kind kind = Kind::Generate;
    int count = 100;
    std::filesystem::path path;
    DatasetFormat format = DatasetFormat::NativeCsv;

    [[nodiscard]] std::string text() const;
};

[[nodiscard]] DataSource parse_data_source(const std::string& text);

struct LambdaGridSpec {
    double min = 1e-4;
    double max = 1e2;
    int count = 50;

    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] std::string text() const;
};

/// Parses MIN:MAX:COUNT.
[[nodiscard]] LambdaGridSpec parse_lambda_grid(const std::string& text);

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::vector<double> gammas{0.1, 0.5, 1.0, 5.0};
    LambdaGridSpec lambda_grid;
    Loss loss = Loss::Hinge;
    DataSource train;
    std::optional<DataSource> test;
    std::filesystem::path output_dir = ".";
    std::set<std::string> formats{"csv"};
    double rank_threshold = kDefaultRankThreshold;
    double deviance_scale = 1.0;
    double lambda = 1.0;  // used by the fit command
    double tolerance = 1e-8;
    int max_iterations = 10'000;
    long bayes_draws = 100'000;

    void validate() const;

    /// Every setting that influences results, as ordered key/value pairs.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Defaults for a subcommand (table1, spectra, eigpanel, errcurves, losscmp, fit, gen-data).
[[nodiscard]] ExperimentConfig default_config(const std::string& command);

/// Applies one key=value setting. Keys match the long CLI flag names without dashes:
/// seed, gamma, gammas, lambda-grid, loss, train, test, rank-threshold, out, format,
/// deviance-scale, lambda, tolerance, max-iterations, bayes-draws.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Applies a plain-text file of key=value lines; '#' starts a comment.
void apply_config_text(ExperimentConfig& config, const std::string& text);

/// A named table of numeric columns plus the metadata needed to regenerate it.
struct SeriesFile {
    std::string name;
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_column(std::string column_name, std::vector<double> values);
    [[nodiscard]] std::size_t rows() const;
    [[nodiscard]] const std::vector<double>& column(const std::string& column_name) const;
};

[[nodiscard]] std::string to_csv(const SeriesFile& file);
[[nodiscard]] std::string to_json(const SeriesFile& file);

struct NamedSvg {
    std::string name;
    SvgDocument document;
};

struct ExperimentOutput {
    std::vector<SeriesFile> files;
    std::vector<NamedSvg> plots;
    std::vector<std::pair<std::string, std::string>> extra_files;  // name, content
};

/// Writes every output in a fixed order; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& output, const ExperimentConfig& config);

/// Per gamma: effective rank of the training Gram and minimal hinge training errors over
/// the lambda grid.
[[nodiscard]] ExperimentOutput table1(const ExperimentConfig& config);

/// Per gamma: the descending eigenvalue sequence of the training Gram.
[[nodiscard]] ExperimentOutput spectra(const ExperimentConfig& config);

/// First 16 eigenvectors and features of a one-dimensional Gram, rows sorted by x.
[[nodiscard]] ExperimentOutput eigpanel(const ExperimentConfig& config);

/// Per gamma and lambda: training and test error of the hinge fit.
[[nodiscard]] ExperimentOutput errcurves(const ExperimentConfig& config);

/// Hinge loss and scaled binomial deviance over yf in [-3, 3].
[[nodiscard]] ExperimentOutput losscmp(const ExperimentConfig& config);

/// Single fit: model JSON plus a summary table.
[[nodiscard]] ExperimentOutput fit_command(const ExperimentConfig& config);

/// Generated train (and test) datasets as native CSV.
[[nodiscard]] ExperimentOutput gen_data(const ExperimentConfig& config);

[[nodiscard]] ExperimentOutput run_command(const ExperimentConfig& config);

/// Index position of the test-error minimum on a grid, as the mean index of all
/// grid points attaining the minimum.
[[nodiscard]] double argmin_position(const std::vector<double>& values);

}  // namespace kreg
