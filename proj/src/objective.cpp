#include "kreg/errors.hpp"
#include "kreg/estimators.hpp"
#include "solvers.hpp"

#include <cmath>

namespace kreg {

namespace detail {

double total_loss(const Labels& y, const Eigen::VectorXd& f, Loss loss) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) sum += loss_value(loss, y(i), f(i));
    return sum;
}

}  // namespace detail

double objective_alpha(const Labels& y, const KernelMatrix& K, double intercept,
                       const Eigen::VectorXd& alpha, double lambda, Loss loss) {
    const Eigen::Index n = K.n();
    if (y.size() != n || alpha.size() != n) {
        throw InputError("objective_alpha: dimension mismatch");
    }
    const Eigen::VectorXd k_alpha = K.entries * alpha;
    const Eigen::VectorXd f = k_alpha.array() + intercept;
    return detail::total_loss(y, f, loss) + lambda * alpha.dot(k_alpha);
}

double objective_reparam(const Labels& y, const EigenDecomposition& eig, double intercept,
                         const Eigen::VectorXd& beta, double lambda, Loss loss,
                         double threshold) {
    const Eigen::Index n = eig.n();
    if (y.size() != n || beta.size() != n) {
        throw InputError("objective_reparam: dimension mismatch");
    }
    double penalty = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = eig.eigenvalues(j);
        if (d > threshold) {
            penalty += beta(j) * beta(j) / d;
        } else if (beta(j) != 0.0) {
            throw InputError("objective_reparam: nonzero coefficient on null direction " +
                             std::to_string(j) + " (eigenvalue " + std::to_string(d) + ")");
        }
    }
    const Eigen::VectorXd f = (eig.eigenvectors * beta).array() + intercept;
    return detail::total_loss(y, f, loss) + lambda * penalty;
}

ReparamCoefficients to_reparam(const EigenDecomposition& eig, double intercept,
                               const Eigen::VectorXd& alpha, double threshold) {
    if (alpha.size() != eig.n()) throw InputError("to_reparam: dimension mismatch");
    const Eigen::VectorXd projected = eig.eigenvectors.transpose() * alpha;
    ReparamCoefficients out;
    out.intercept = intercept;
    out.beta = Eigen::VectorXd::Zero(eig.n());
    out.theta = Eigen::VectorXd::Zero(eig.n());
    for (Eigen::Index j = 0; j < eig.n(); ++j) {
        const double d = eig.eigenvalues(j);
        if (d > threshold) {
            out.beta(j) = d * projected(j);
            out.theta(j) = std::sqrt(d) * projected(j);
        }
    }
    return out;
}

}  // namespace kreg
