#pragma once

#include <Eigen/Dense>

#include <string>

namespace kreg {

/// Eigenvalues at or below this are treated as numerically zero.
inline constexpr double kDefaultRankThreshold = 1e-12;

/// Eigenvalues below this (negative) make a Gram matrix unusable as a kernel matrix.
inline constexpr double kNegativeEigenvalueLimit = -1e-8;

enum class KernelFamily { Radial, Linear };

/// Kernel family plus hyperparameters. Radial: exp(-gamma * |x - x'|^2).
/// Linear: <x, x'>, used to build analytically rank-deficient Grams.
struct KernelSpec {
    KernelFamily family = KernelFamily::Radial;
    double gamma = 1.0;

    static KernelSpec radial(double gamma);
    static KernelSpec linear();

    /// Throws InputError when gamma is not positive for a Radial kernel.
    void validate() const;
};

[[nodiscard]] std::string to_string(KernelFamily family);
[[nodiscard]] KernelFamily parse_kernel_family(const std::string& name);

/// Symmetric n x n matrix of pairwise kernel evaluations.
struct KernelMatrix {
    Eigen::MatrixXd entries;

    [[nodiscard]] Eigen::Index n() const { return entries.rows(); }
};

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
/// Each eigenvector's first entry with magnitude above 1e-12 is positive.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    [[nodiscard]] Eigen::Index n() const { return eigenvalues.size(); }
};

/// H = U D^{1/2}; row i holds the empirical feature vector of training point i.
struct FeatureMatrix {
    Eigen::MatrixXd columns;
};

[[nodiscard]] double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& x_prime);

/// Gram matrix of the rows of X, symmetrized as (K + K^T) / 2.
[[nodiscard]] KernelMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);

/// m x n matrix K(x*_i, x_j) between the rows of Xstar and the rows of X.
[[nodiscard]] Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& Xstar,
                                           const Eigen::MatrixXd& X);

[[nodiscard]] EigenDecomposition eigendecompose(const KernelMatrix& K);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Convergence when the
/// off-diagonal Frobenius norm drops to 1e-12 * |A|_F; capped at 100 * n sweeps.
[[nodiscard]] EigenDecomposition eigendecompose_symmetric(const Eigen::MatrixXd& A);

/// Number of eigenvalues strictly greater than threshold.
[[nodiscard]] Eigen::Index effective_rank(const EigenDecomposition& eig,
                                          double threshold = kDefaultRankThreshold);

/// H = U D^{1/2} with eigenvalues in (-1e-8, 0) clamped to zero.
/// Throws NumericError if an eigenvalue lies below -1e-8.
[[nodiscard]] FeatureMatrix feature_matrix(const EigenDecomposition& eig);

}  // namespace kreg
