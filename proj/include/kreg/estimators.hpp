#pragma once

#include "kreg/kernel_core.hpp"
#include "kreg/losses.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace kreg {

/// Class labels, each -1 or +1.
using Labels = Eigen::VectorXi;

/// Settings for minimizing  sum_i l(y_i, b + (K alpha)_i) + lambda * alpha' K alpha.
struct FitSpec {
    Loss loss = Loss::Hinge;
    KernelSpec kernel;
    double lambda = 1.0;
    double tolerance = 1e-8;
    int max_iterations = 10'000;

    void validate() const;
};

struct SolverReport {
    long iterations = 0;
    bool converged = false;
    std::optional<double> kkt_residual;
    /// Objective after each accepted iterate: the primal criterion for the Newton
    /// solvers, the dual objective (sampled every n updates) for the hinge solver.
    std::vector<double> objective_trace;
};

/// Fitted decision function f(x) = intercept + sum_i alpha_i K(x, x_i).
struct Model {
    double intercept = 0.0;
    Eigen::VectorXd alpha;
    Eigen::MatrixXd training_inputs;
    KernelSpec kernel;
    Loss loss = Loss::Hinge;
    double lambda = 1.0;
    double objective_value = 0.0;
    SolverReport solver_report;
};

/// Coefficients of the same fit in the eigenbasis of K: fitted values are
/// intercept + U beta and the penalty is beta' D^{-1} beta = theta' theta with
/// theta_j = beta_j / sqrt(d_j). Components on eigenvalues at or below the rank
/// threshold are exactly zero.
struct ReparamCoefficients {
    double intercept = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd theta;
};

/// Fit settings shared by every point of a lambda sweep.
struct PathSpec {
    Loss loss = Loss::Hinge;
    KernelSpec kernel;
    double tolerance = 1e-8;
    int max_iterations = 10'000;

    [[nodiscard]] FitSpec at(double lambda) const;
};

struct PathOptions {
    /// Start each fit from the previous lambda's solution. When false every grid
    /// point is fitted from scratch and fits may run concurrently.
    bool warm_start = true;
};

struct PathRecord {
    double lambda = 0.0;
    double training_error = 0.0;
    long training_mistakes = 0;
    std::optional<double> test_error;
    double objective_value = 0.0;
    double penalty = 0.0;
    double intercept = 0.0;
    long iterations = 0;
    bool converged = false;
};

struct PathResult {
    std::vector<double> lambda_grid;
    std::vector<PathRecord> records;
};

struct TestSet {
    const Eigen::MatrixXd& X;
    const Labels& y;
};

/// L(y, b + K alpha) + lambda * alpha' K alpha.
[[nodiscard]] double objective_alpha(const Labels& y, const KernelMatrix& K, double intercept,
                                     const Eigen::VectorXd& alpha, double lambda, Loss loss);

/// L(y, b + U beta) + lambda * sum_{d_j > threshold} beta_j^2 / d_j. Nonzero beta on a
/// direction with d_j <= threshold is rejected (infinite penalty).
[[nodiscard]] double objective_reparam(const Labels& y, const EigenDecomposition& eig,
                                       double intercept, const Eigen::VectorXd& beta,
                                       double lambda, Loss loss,
                                       double threshold = kDefaultRankThreshold);

/// Map alpha to the eigenbasis: beta = D U' alpha, theta_j = beta_j / sqrt(d_j) on the
/// retained spectrum.
[[nodiscard]] ReparamCoefficients to_reparam(const EigenDecomposition& eig, double intercept,
                                             const Eigen::VectorXd& alpha,
                                             double threshold = kDefaultRankThreshold);

/// Solves the alpha-parametrized criterion.
///   Squared: bordered linear system [K + lambda I, 1; 1', 0].
///   Deviance, Exponential: damped Newton on (b, alpha).
///   Hinge: SMO-type dual coordinate descent with C = 1 / (2 lambda).
[[nodiscard]] Model fit(const FitSpec& spec, const Eigen::MatrixXd& X, const Labels& y);

/// As fit, reusing a precomputed Gram matrix and optionally starting from warm.
[[nodiscard]] Model fit_gram(const FitSpec& spec, const Eigen::MatrixXd& X, const KernelMatrix& K,
                             const Labels& y, const Model* warm = nullptr);

/// Solves the same criterion over (b, theta) with features H = U D^{1/2} restricted
/// to eigenvalues above the rank threshold, and returns both representations.
[[nodiscard]] std::pair<Model, ReparamCoefficients> fit_reparam(const FitSpec& spec,
                                                                const Eigen::MatrixXd& X,
                                                                const Labels& y);

[[nodiscard]] Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& Xstar);

/// Sign of predict, with sign(0) = +1.
[[nodiscard]] Labels classify(const Model& model, const Eigen::MatrixXd& Xstar);

[[nodiscard]] Labels sign_labels(const Eigen::VectorXd& f);

[[nodiscard]] double error_rate(const Labels& predicted, const Labels& truth);

/// Descending log-spaced grid from max_lambda to min_lambda.
[[nodiscard]] std::vector<double> log_lambda_grid(double max_lambda, double min_lambda, int count);

/// 50 points from 1e2 down to 1e-4.
[[nodiscard]] std::vector<double> default_lambda_grid();

[[nodiscard]] PathResult lambda_path(const PathSpec& spec, const Eigen::MatrixXd& X,
                                     const Labels& y, const std::vector<double>& grid,
                                     const std::optional<TestSet>& test = std::nullopt,
                                     const PathOptions& options = {});

/// Largest violation of the optimality conditions of the hinge dual
///   min 1/2 a'Qa - 1'a,  0 <= a_i <= C,  y'a = 0,  C = 1 / (2 lambda),
/// with a_i = y_i alpha_i and the model intercept as the equality multiplier.
/// Per point the violation is |a_i - clip(a_i - (y_i f_i - 1), 0, C)|; box and
/// equality violations are included. Zero at an exact optimum.
[[nodiscard]] double kkt_residual(const Model& model, const Labels& y, const KernelMatrix& K,
                                  double lambda);

/// Throws InputError unless every label is -1 or +1; DegenerateFitError if only one class.
void validate_labels(const Labels& y);

}  // namespace kreg
