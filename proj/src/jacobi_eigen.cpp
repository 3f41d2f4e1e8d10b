// Cyclic Jacobi eigensolver for dense symmetric matrices.

#include "kreg/errors.hpp"
#include "kreg/kernel_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace kreg {

namespace {

constexpr double kOffDiagonalTolerance = 1e-12;
constexpr int kSweepsPerDimension = 100;
constexpr double kSignTolerance = 1e-12;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double sum = 0.0;
    const Eigen::Index n = a.rows();
    for (Eigen::Index q = 1; q < n; ++q) {
        for (Eigen::Index p = 0; p < q; ++p) sum += a(p, q) * a(p, q);
    }
    return std::sqrt(2.0 * sum);
}

void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
    const double apq = a(p, q);
    const double diff = a(q, q) - a(p, p);
    double t;
    if (std::abs(diff) + 100.0 * std::abs(apq) == std::abs(diff)) {
        t = apq / diff;
    } else {
        const double theta = 0.5 * diff / apq;
        t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    const Eigen::Index n = a.rows();
    for (Eigen::Index r = 0; r < n; ++r) {
        if (r == p || r == q) continue;
        const double g = a(r, p);
        const double h = a(r, q);
        const double new_p = g - s * (h + g * tau);
        const double new_q = h + s * (g - h * tau);
        a(r, p) = new_p;
        a(p, r) = new_p;
        a(r, q) = new_q;
        a(q, r) = new_q;
    }
    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    for (Eigen::Index r = 0; r < n; ++r) {
        const double g = v(r, p);
        const double h = v(r, q);
        v(r, p) = g - s * (h + g * tau);
        v(r, q) = h + s * (g - h * tau);
    }
}

}  // namespace

EigenDecomposition eigendecompose_symmetric(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    if (n == 0 || A.cols() != n) throw InputError("eigendecompose: matrix must be square and non-empty");
    if (!A.allFinite()) throw InputError("eigendecompose: matrix has non-finite entries");

    Eigen::MatrixXd a = 0.5 * (A + A.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double tolerance = kOffDiagonalTolerance * a.norm();
    const long max_sweeps = static_cast<long>(kSweepsPerDimension) * n;

    double off = off_diagonal_norm(a);
    long sweep = 0;
    while (off > tolerance) {
        if (sweep >= max_sweeps) {
            throw ConvergenceError("jacobi eigensolver did not converge after " +
                                       std::to_string(sweep) + " sweeps",
                                   off, off);
        }
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) {
                if (a(p, q) != 0.0) rotate(a, v, p, q);
            }
        }
        ++sweep;
        off = off_diagonal_norm(a);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = a(src, src);
        auto column = out.eigenvectors.col(k);
        column = v.col(src);
        for (Eigen::Index r = 0; r < n; ++r) {
            if (std::abs(column(r)) > kSignTolerance) {
                if (column(r) < 0.0) column = -column;
                break;
            }
        }
    }
    return out;
}

}  // namespace kreg
