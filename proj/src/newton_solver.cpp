// Damped Newton iterations for the twice-differentiable losses.

#include "kreg/errors.hpp"
#include "solvers.hpp"

#include <cmath>
#include <functional>

namespace kreg::detail {

namespace {

constexpr double kCurvatureFloor = 1e-10;
constexpr int kMaxHalvings = 50;
constexpr double kArmijo = 1e-4;

struct Derivatives {
    Eigen::VectorXd slope;      // l'(y_i, f_i)
    Eigen::VectorXd curvature;  // max(l''(y_i, f_i), floor)
};

Derivatives derivatives(const Labels& y, const Eigen::VectorXd& f, Loss loss) {
    Derivatives d{Eigen::VectorXd(f.size()), Eigen::VectorXd(f.size())};
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        d.slope(i) = loss_gradient(loss, y(i), f(i));
        d.curvature(i) = std::max(loss_curvature(loss, y(i), f(i)), kCurvatureFloor);
    }
    return d;
}

// A problem in the form  sum_i l(y_i, b + (A c)_i) + lambda * penalty(c).
struct Problem {
    const Eigen::MatrixXd& design;
    const Labels& y;
    Loss loss;
    double lambda;
    std::function<double(const Eigen::VectorXd& coef, const Eigen::VectorXd& design_coef)> penalty;
    // Returns (step_b, step_c, directional derivative of the objective along the step).
    std::function<void(const Derivatives&, double b, const Eigen::VectorXd& coef, double& step_b,
                       Eigen::VectorXd& step_c, double& slope)>
        direction;
};

NewtonSolution run(const Problem& problem, double tolerance, int max_iterations, double b0,
                   const Eigen::VectorXd& coef0) {
    NewtonSolution out;
    out.intercept = b0;
    out.coef = coef0;

    auto evaluate = [&](double b, const Eigen::VectorXd& coef, Eigen::VectorXd& f) {
        const Eigen::VectorXd design_coef = problem.design * coef;
        f = design_coef.array() + b;
        return total_loss(problem.y, f, problem.loss) +
               problem.lambda * problem.penalty(coef, design_coef);
    };

    Eigen::VectorXd f;
    out.objective = evaluate(out.intercept, out.coef, f);
    out.trace.push_back(out.objective);

    double decrement = 0.0;
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        const Derivatives deriv = derivatives(problem.y, f, problem.loss);
        double step_b = 0.0;
        Eigen::VectorXd step_c;
        double slope = 0.0;
        problem.direction(deriv, out.intercept, out.coef, step_b, step_c, slope);
        decrement = -slope;
        const double stop_level = tolerance * (1.0 + std::abs(out.objective));
        if (!std::isfinite(decrement) || decrement <= 0.0) {
            out.converged = true;
            return out;
        }

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial_f;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, t *= 0.5) {
            const double trial_b = out.intercept + t * step_b;
            const Eigen::VectorXd trial_c = out.coef + t * step_c;
            const double trial = evaluate(trial_b, trial_c, trial_f);
            if (std::isfinite(trial) && trial <= out.objective + kArmijo * t * slope) {
                accepted = trial < out.objective || decrement <= stop_level;
                if (trial < out.objective) {
                    out.intercept = trial_b;
                    out.coef = trial_c;
                    out.objective = trial;
                    f = trial_f;
                    out.trace.push_back(trial);
                }
                break;
            }
        }
        ++out.iterations;
        if (!accepted) {
            if (decrement <= stop_level) {
                out.converged = true;
                return out;
            }
            throw ConvergenceError("newton line search failed", out.objective, decrement);
        }
        if (decrement <= stop_level) {
            out.converged = true;
            return out;
        }
    }
    throw ConvergenceError("newton solver reached " + std::to_string(max_iterations) +
                               " iterations",
                           out.objective, decrement);
}

}  // namespace

NewtonSolution newton_alpha(const Eigen::MatrixXd& K, const Labels& y, Loss loss, double lambda,
                            double tolerance, int max_iterations, double intercept0,
                            const Eigen::VectorXd& alpha0) {
    const Eigen::Index n = K.rows();
    Problem problem{
        K, y, loss, lambda,
        [](const Eigen::VectorXd& alpha, const Eigen::VectorXd& k_alpha) { return alpha.dot(k_alpha); },
        [&](const Derivatives& d, double, const Eigen::VectorXd& alpha, double& step_b,
            Eigen::VectorXd& step_c, double& slope) {
            // With H = diag(1, K) A and g = diag(1, K) r, solving A step = -r gives a
            // Newton step even when K is singular. A is nonsingular for lambda > 0.
            Eigen::MatrixXd A(n + 1, n + 1);
            A(0, 0) = d.curvature.sum();
            A.block(0, 1, 1, n) = d.curvature.transpose() * K;
            A.block(1, 0, n, 1) = d.curvature;
            A.block(1, 1, n, n) = d.curvature.asDiagonal() * K;
            A.block(1, 1, n, n).diagonal().array() += 2.0 * lambda;
            Eigen::VectorXd r(n + 1);
            r(0) = d.slope.sum();
            r.tail(n) = d.slope + 2.0 * lambda * alpha;
            const Eigen::VectorXd step = A.partialPivLu().solve(-r);
            step_b = step(0);
            step_c = step.tail(n);
            slope = r(0) * step_b + (K * r.tail(n)).dot(step_c);
        }};
    return run(problem, tolerance, max_iterations, intercept0, alpha0);
}

NewtonSolution newton_features(const Eigen::MatrixXd& H, const Labels& y, Loss loss,
                               double lambda, double tolerance, int max_iterations) {
    const Eigen::Index p = H.cols();
    Problem problem{
        H, y, loss, lambda,
        [](const Eigen::VectorXd& theta, const Eigen::VectorXd&) { return theta.squaredNorm(); },
        [&](const Derivatives& d, double, const Eigen::VectorXd& theta, double& step_b,
            Eigen::VectorXd& step_c, double& slope) {
            Eigen::MatrixXd hessian(p + 1, p + 1);
            hessian(0, 0) = d.curvature.sum();
            const Eigen::RowVectorXd cross = d.curvature.transpose() * H;
            hessian.block(0, 1, 1, p) = cross;
            hessian.block(1, 0, p, 1) = cross.transpose();
            hessian.block(1, 1, p, p) = H.transpose() * d.curvature.asDiagonal() * H;
            hessian.block(1, 1, p, p).diagonal().array() += 2.0 * lambda;
            Eigen::VectorXd gradient(p + 1);
            gradient(0) = d.slope.sum();
            gradient.tail(p) = H.transpose() * d.slope + 2.0 * lambda * theta;
            const Eigen::VectorXd step = hessian.ldlt().solve(-gradient);
            step_b = step(0);
            step_c = step.tail(p);
            slope = gradient.dot(step);
        }};
    return run(problem, tolerance, max_iterations, 0.0, Eigen::VectorXd::Zero(p));
}

NewtonSolution squared_closed_form(const Eigen::MatrixXd& K, const Labels& y, double lambda) {
    const Eigen::Index n = K.rows();
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 1, n + 1);
    system.topLeftCorner(n, n) = K;
    system.topLeftCorner(n, n).diagonal().array() += lambda;
    system.block(0, n, n, 1).setOnes();
    system.block(n, 0, 1, n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = y.cast<double>();
    const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
    if (!solution.allFinite()) throw NumericError("squared-loss linear system is singular");

    NewtonSolution out;
    out.coef = solution.head(n);
    out.intercept = solution(n);
    out.iterations = 1;
    out.converged = true;
    const Eigen::VectorXd k_alpha = K * out.coef;
    out.objective = total_loss(y, k_alpha.array() + out.intercept, Loss::Squared) +
                    lambda * out.coef.dot(k_alpha);
    out.trace = {out.objective};
    return out;
}

}  // namespace kreg::detail
