#pragma once

// Internal solver entry points shared by fit and fit_reparam.

#include "kreg/estimators.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kreg::detail {

struct DualSolution {
    Eigen::VectorXd a;  // dual variables in [0, C]
    double bias = 0.0;
    long updates = 0;
    bool converged = false;
    double gap = 0.0;
    std::vector<double> dual_trace;
};

/// Minimizes 1/2 a'Qa - 1'a with Q_ij = y_i y_j K_ij, 0 <= a_i <= C, y'a = 0 using
/// maximal-violating-pair selection with second-order working-set choice. Stops when
/// the violating-pair gap is at most tolerance. The returned bias b makes
/// f = K (a .* y) + b the primal decision function.
DualSolution solve_hinge_dual(const Eigen::MatrixXd& K, const Labels& y, double C,
                              double tolerance, long max_updates,
                              const Eigen::VectorXd* warm = nullptr);

struct NewtonSolution {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    long iterations = 0;
    bool converged = false;
    double objective = 0.0;
    std::vector<double> trace;
};

/// Damped Newton on (b, alpha) for  L(y, b + K alpha) + lambda alpha' K alpha.
NewtonSolution newton_alpha(const Eigen::MatrixXd& K, const Labels& y, Loss loss, double lambda,
                            double tolerance, int max_iterations, double intercept0,
                            const Eigen::VectorXd& alpha0);

/// Damped Newton on (b, theta) for  L(y, b + H theta) + lambda theta' theta.
NewtonSolution newton_features(const Eigen::MatrixXd& H, const Labels& y, Loss loss,
                               double lambda, double tolerance, int max_iterations);

/// Closed-form squared-loss solution: [K + lambda I, 1; 1', 0] [alpha; b] = [y; 0].
NewtonSolution squared_closed_form(const Eigen::MatrixXd& K, const Labels& y, double lambda);

/// Sum of losses at fitted values f.
double total_loss(const Labels& y, const Eigen::VectorXd& f, Loss loss);

}  // namespace kreg::detail
