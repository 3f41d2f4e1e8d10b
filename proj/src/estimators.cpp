#include "kreg/estimators.hpp"

#include "kreg/errors.hpp"
#include "kreg/parallel.hpp"
#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kreg {

void FitSpec::validate() const {
    kernel.validate();
    if (!(lambda > 0.0 && std::isfinite(lambda))) throw InputError("lambda must be positive");
    if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (max_iterations < 1) throw InputError("max_iterations must be at least 1");
}

FitSpec PathSpec::at(double lambda) const {
    return FitSpec{loss, kernel, lambda, tolerance, max_iterations};
}

void validate_labels(const Labels& y) {
    bool has_pos = false;
    bool has_neg = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 1) has_pos = true;
        else if (y(i) == -1) has_neg = true;
        else throw InputError("label at index " + std::to_string(i) + " is not -1 or +1");
    }
    if (!has_pos || !has_neg) {
        throw DegenerateFitError("labels contain a single class; a classifier cannot be fitted");
    }
}

namespace {

void check_training_shapes(const Eigen::MatrixXd& X, const Labels& y) {
    if (X.rows() < 2) throw InputError("fit requires at least two observations");
    if (X.rows() != y.size()) {
        throw InputError("fit: " + std::to_string(X.rows()) + " inputs but " +
                         std::to_string(y.size()) + " labels");
    }
    validate_labels(y);
}

long dual_update_budget(const FitSpec& spec, Eigen::Index n) {
    return static_cast<long>(spec.max_iterations) * std::max<long>(n, 1);
}

void throw_unconverged(const std::string& what, double objective, double residual) {
    throw ConvergenceError(what, objective, residual);
}

}  // namespace

Model fit_gram(const FitSpec& spec, const Eigen::MatrixXd& X, const KernelMatrix& K,
               const Labels& y, const Model* warm) {
    spec.validate();
    check_training_shapes(X, y);
    const Eigen::Index n = X.rows();
    if (K.n() != n) throw InputError("fit: Gram matrix size does not match inputs");
    const bool usable_warm = warm != nullptr && warm->alpha.size() == n;

    Model model;
    model.training_inputs = X;
    model.kernel = spec.kernel;
    model.loss = spec.loss;
    model.lambda = spec.lambda;

    switch (spec.loss) {
        case Loss::Squared: {
            const auto solution = detail::squared_closed_form(K.entries, y, spec.lambda);
            model.intercept = solution.intercept;
            model.alpha = solution.coef;
            model.solver_report.iterations = solution.iterations;
            model.solver_report.converged = true;
            model.solver_report.objective_trace = solution.trace;
            break;
        }
        case Loss::BinomialDeviance:
        case Loss::Exponential: {
            const double b0 = usable_warm ? warm->intercept : 0.0;
            const Eigen::VectorXd a0 = usable_warm ? warm->alpha : Eigen::VectorXd::Zero(n);
            const auto solution = detail::newton_alpha(K.entries, y, spec.loss, spec.lambda,
                                                       spec.tolerance, spec.max_iterations, b0, a0);
            model.intercept = solution.intercept;
            model.alpha = solution.coef;
            model.solver_report.iterations = solution.iterations;
            model.solver_report.converged = solution.converged;
            model.solver_report.objective_trace = solution.trace;
            break;
        }
        case Loss::Hinge: {
            const double C = 1.0 / (2.0 * spec.lambda);
            Eigen::VectorXd warm_dual;
            if (usable_warm && warm->loss == Loss::Hinge) {
                warm_dual = warm->alpha.cwiseProduct(y.cast<double>());
            }
            const auto solution = detail::solve_hinge_dual(
                K.entries, y, C, spec.tolerance, dual_update_budget(spec, n),
                warm_dual.size() == n ? &warm_dual : nullptr);
            model.alpha = solution.a.cwiseProduct(y.cast<double>());
            model.intercept = solution.bias;
            model.solver_report.iterations = solution.updates;
            model.solver_report.converged = solution.converged;
            model.solver_report.objective_trace = solution.dual_trace;
            if (!solution.converged) {
                throw_unconverged("hinge dual solver reached its update budget",
                                  objective_alpha(y, K, model.intercept, model.alpha, spec.lambda,
                                                  spec.loss),
                                  solution.gap);
            }
            model.solver_report.kkt_residual = kkt_residual(model, y, K, spec.lambda);
            break;
        }
    }
    model.objective_value = objective_alpha(y, K, model.intercept, model.alpha, spec.lambda, spec.loss);
    return model;
}

Model fit(const FitSpec& spec, const Eigen::MatrixXd& X, const Labels& y) {
    spec.validate();
    check_training_shapes(X, y);
    return fit_gram(spec, X, gram_matrix(spec.kernel, X), y);
}

std::pair<Model, ReparamCoefficients> fit_reparam(const FitSpec& spec, const Eigen::MatrixXd& X,
                                                  const Labels& y) {
    spec.validate();
    check_training_shapes(X, y);
    const Eigen::Index n = X.rows();
    const KernelMatrix K = gram_matrix(spec.kernel, X);
    const EigenDecomposition eig = eigendecompose(K);
    const Eigen::Index rank = effective_rank(eig);
    if (rank == 0) throw NumericError("fit_reparam: kernel matrix has no retained eigenvalues");

    // Eigenvalues are sorted, so the retained spectrum is the leading block.
    const Eigen::VectorXd roots = eig.eigenvalues.head(rank).cwiseSqrt();
    const Eigen::MatrixXd H = eig.eigenvectors.leftCols(rank) * roots.asDiagonal();

    double intercept = 0.0;
    Eigen::VectorXd theta;
    SolverReport report;
    if (spec.loss == Loss::Hinge) {
        const Eigen::MatrixXd reduced_gram = H * H.transpose();
        const auto solution = detail::solve_hinge_dual(reduced_gram, y, 1.0 / (2.0 * spec.lambda),
                                                       spec.tolerance, dual_update_budget(spec, n));
        if (!solution.converged) {
            throw ConvergenceError("hinge dual solver (feature form) reached its update budget",
                                   0.0, solution.gap);
        }
        theta = H.transpose() * solution.a.cwiseProduct(y.cast<double>());
        intercept = solution.bias;
        report.iterations = solution.updates;
        report.converged = true;
        report.objective_trace = solution.dual_trace;
    } else {
        const auto solution = detail::newton_features(H, y, spec.loss, spec.lambda, spec.tolerance,
                                                      spec.max_iterations);
        theta = solution.coef;
        intercept = solution.intercept;
        report.iterations = solution.iterations;
        report.converged = solution.converged;
        report.objective_trace = solution.trace;
    }

    ReparamCoefficients coefficients;
    coefficients.intercept = intercept;
    coefficients.theta = Eigen::VectorXd::Zero(n);
    coefficients.beta = Eigen::VectorXd::Zero(n);
    coefficients.theta.head(rank) = theta;
    coefficients.beta.head(rank) = roots.cwiseProduct(theta);

    Model model;
    model.intercept = intercept;
    model.alpha = eig.eigenvectors.leftCols(rank) * theta.cwiseQuotient(roots);
    model.training_inputs = X;
    model.kernel = spec.kernel;
    model.loss = spec.loss;
    model.lambda = spec.lambda;
    model.solver_report = report;
    if (spec.loss == Loss::Hinge) model.solver_report.kkt_residual = kkt_residual(model, y, K, spec.lambda);
    model.objective_value = objective_alpha(y, K, model.intercept, model.alpha, spec.lambda, spec.loss);
    return {std::move(model), std::move(coefficients)};
}

Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& Xstar) {
    if (Xstar.cols() != model.training_inputs.cols()) {
        throw InputError("predict: inputs have dimension " + std::to_string(Xstar.cols()) +
                         ", model was trained on dimension " +
                         std::to_string(model.training_inputs.cols()));
    }
    if (model.alpha.size() != model.training_inputs.rows()) {
        throw InputError("predict: model has inconsistent coefficient count");
    }
    const Eigen::MatrixXd cross = cross_kernel(model.kernel, Xstar, model.training_inputs);
    return (cross * model.alpha).array() + model.intercept;
}

Labels sign_labels(const Eigen::VectorXd& f) {
    Labels out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) out(i) = f(i) >= 0.0 ? 1 : -1;
    return out;
}

Labels classify(const Model& model, const Eigen::MatrixXd& Xstar) {
    return sign_labels(predict(model, Xstar));
}

double error_rate(const Labels& predicted, const Labels& truth) {
    if (predicted.size() != truth.size()) {
        throw InputError("error_rate: length mismatch (" + std::to_string(predicted.size()) +
                         " vs " + std::to_string(truth.size()) + ")");
    }
    if (truth.size() == 0) throw InputError("error_rate: empty label vectors");
    long wrong = 0;
    for (Eigen::Index i = 0; i < truth.size(); ++i) wrong += predicted(i) != truth(i) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

std::vector<double> log_lambda_grid(double max_lambda, double min_lambda, int count) {
    if (count < 1) throw InputError("lambda grid needs at least one point");
    if (!(max_lambda > 0.0 && min_lambda > 0.0)) throw InputError("lambda grid bounds must be positive");
    if (count == 1) return {max_lambda};
    if (!(max_lambda > min_lambda)) throw InputError("lambda grid requires max > min");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double hi = std::log10(max_lambda);
    const double lo = std::log10(min_lambda);
    for (int k = 0; k < count; ++k) {
        grid[static_cast<std::size_t>(k)] = std::pow(10.0, hi + (lo - hi) * k / (count - 1));
    }
    return grid;
}

std::vector<double> default_lambda_grid() { return log_lambda_grid(1e2, 1e-4, 50); }

namespace {

[[noreturn]] void rethrow_with_lambda(double lambda) {
    std::ostringstream where;
    where << "at lambda=" << lambda << ": ";
    try {
        throw;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(where.str() + e.what(), e.last_objective(), e.residual());
    } catch (const DegenerateFitError& e) {
        throw DegenerateFitError(where.str() + e.what());
    } catch (const InputError& e) {
        throw InputError(where.str() + e.what());
    } catch (const NumericError& e) {
        throw NumericError(where.str() + e.what());
    }
}

}  // namespace

PathResult lambda_path(const PathSpec& spec, const Eigen::MatrixXd& X, const Labels& y,
                       const std::vector<double>& grid, const std::optional<TestSet>& test,
                       const PathOptions& options) {
    if (grid.empty()) throw InputError("lambda_path: empty grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0.0)) throw InputError("lambda_path: grid values must be positive");
        if (k > 0 && !(grid[k] < grid[k - 1])) {
            throw InputError("lambda_path: grid must be strictly descending");
        }
    }
    spec.at(grid.front()).validate();
    check_training_shapes(X, y);
    if (test && (test->X.rows() != test->y.size() || test->X.cols() != X.cols())) {
        throw InputError("lambda_path: test set shape does not match training data");
    }

    const KernelMatrix K = gram_matrix(spec.kernel, X);
    Eigen::MatrixXd test_cross;
    if (test) test_cross = cross_kernel(spec.kernel, test->X, X);

    PathResult result;
    result.lambda_grid = grid;
    result.records.resize(grid.size());

    auto summarize = [&](std::size_t k, const Model& model) {
        PathRecord& record = result.records[k];
        record.lambda = grid[k];
        const Eigen::VectorXd fitted = (K.entries * model.alpha).array() + model.intercept;
        const Labels predicted = sign_labels(fitted);
        record.training_error = error_rate(predicted, y);
        record.training_mistakes = std::lround(record.training_error * static_cast<double>(y.size()));
        if (test) {
            const Eigen::VectorXd f = (test_cross * model.alpha).array() + model.intercept;
            record.test_error = error_rate(sign_labels(f), test->y);
        }
        record.objective_value = model.objective_value;
        record.penalty = model.alpha.dot(K.entries * model.alpha);
        record.intercept = model.intercept;
        record.iterations = model.solver_report.iterations;
        record.converged = model.solver_report.converged;
    };

    if (options.warm_start) {
        Model previous;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            Model model;
            try {
                model = fit_gram(spec.at(grid[k]), X, K, y, k > 0 ? &previous : nullptr);
            } catch (const Error&) {
                rethrow_with_lambda(grid[k]);
            }
            summarize(k, model);
            previous = std::move(model);
        }
    } else {
        parallel_for(grid.size(), [&](std::size_t k) {
            try {
                summarize(k, fit_gram(spec.at(grid[k]), X, K, y));
            } catch (const Error&) {
                rethrow_with_lambda(grid[k]);
            }
        });
    }
    return result;
}

double kkt_residual(const Model& model, const Labels& y, const KernelMatrix& K, double lambda) {
    if (model.loss != Loss::Hinge) throw InputError("kkt_residual is defined for hinge-loss models only");
    const Eigen::Index n = K.n();
    if (model.alpha.size() != n || y.size() != n) throw InputError("kkt_residual: dimension mismatch");
    if (!(lambda > 0.0)) throw InputError("kkt_residual: lambda must be positive");
    const double C = 1.0 / (2.0 * lambda);
    const Eigen::VectorXd f = (K.entries * model.alpha).array() + model.intercept;

    double residual = std::abs(model.alpha.sum());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = y(i) * model.alpha(i);
        const double gradient = y(i) * f(i) - 1.0;
        residual = std::max(residual, std::max({0.0, -a, a - C}));
        residual = std::max(residual, std::abs(a - std::clamp(a - gradient, 0.0, C)));
    }
    return residual;
}

}  // namespace kreg
