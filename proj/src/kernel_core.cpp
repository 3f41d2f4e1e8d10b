#include "kreg/kernel_core.hpp"

#include "kreg/errors.hpp"
#include "kreg/parallel.hpp"

#include <cmath>

namespace kreg {

KernelSpec KernelSpec::radial(double gamma) {
    KernelSpec spec{KernelFamily::Radial, gamma};
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::linear() { return KernelSpec{KernelFamily::Linear, 0.0}; }

void KernelSpec::validate() const {
    if (family == KernelFamily::Radial && !(gamma > 0.0 && std::isfinite(gamma))) {
        throw InputError("radial kernel requires gamma > 0, got " + std::to_string(gamma));
    }
}

std::string to_string(KernelFamily family) {
    return family == KernelFamily::Radial ? "radial" : "linear";
}

KernelFamily parse_kernel_family(const std::string& name) {
    if (name == "radial") return KernelFamily::Radial;
    if (name == "linear") return KernelFamily::Linear;
    throw InputError("unknown kernel family '" + name + "'");
}

namespace {

// Row-wise evaluation without materializing row copies.
double eval_rows(const KernelSpec& spec, const Eigen::MatrixXd& A, Eigen::Index i,
                 const Eigen::MatrixXd& B, Eigen::Index j) {
    const Eigen::Index d = A.cols();
    if (spec.family == KernelFamily::Linear) {
        double dot = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) dot += A(i, k) * B(j, k);
        return dot;
    }
    double dist2 = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = A(i, k) - B(j, k);
        dist2 += diff * diff;
    }
    return std::exp(-spec.gamma * dist2);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
    spec.validate();
    if (x.size() != x_prime.size() || x.size() == 0) {
        throw InputError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(x_prime.size()) + ")");
    }
    if (spec.family == KernelFamily::Linear) return x.dot(x_prime);
    return std::exp(-spec.gamma * (x - x_prime).squaredNorm());
}

KernelMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    spec.validate();
    if (X.rows() == 0 || X.cols() == 0) throw InputError("gram_matrix: empty input");
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        for (Eigen::Index j = 0; j < n; ++j) K(i, j) = eval_rows(spec, X, i, X, j);
    });
    Eigen::MatrixXd sym = 0.5 * (K + K.transpose());
    return KernelMatrix{std::move(sym)};
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& Xstar,
                             const Eigen::MatrixXd& X) {
    spec.validate();
    if (Xstar.cols() != X.cols()) {
        throw InputError("cross_kernel: dimension mismatch (" + std::to_string(Xstar.cols()) +
                         " vs " + std::to_string(X.cols()) + ")");
    }
    const Eigen::Index m = Xstar.rows();
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd out(m, n);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = eval_rows(spec, Xstar, i, X, j);
    });
    return out;
}

EigenDecomposition eigendecompose(const KernelMatrix& K) {
    if (K.n() == 0) throw InputError("eigendecompose: empty matrix");
    return eigendecompose_symmetric(K.entries);
}

Eigen::Index effective_rank(const EigenDecomposition& eig, double threshold) {
    if (!(threshold > 0.0)) throw InputError("effective_rank: threshold must be positive");
    Eigen::Index count = 0;
    for (Eigen::Index j = 0; j < eig.n(); ++j) {
        if (std::max(eig.eigenvalues(j), 0.0) > threshold) ++count;
    }
    return count;
}

FeatureMatrix feature_matrix(const EigenDecomposition& eig) {
    const Eigen::Index n = eig.n();
    Eigen::VectorXd root(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = eig.eigenvalues(j);
        if (d < kNegativeEigenvalueLimit) {
            throw NumericError("feature_matrix: eigenvalue " + std::to_string(d) +
                               " is below the negative limit; matrix is not a kernel matrix");
        }
        root(j) = std::sqrt(std::max(d, 0.0));
    }
    return FeatureMatrix{eig.eigenvectors * root.asDiagonal()};
}

}  // namespace kreg
