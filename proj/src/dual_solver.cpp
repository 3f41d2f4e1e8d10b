// Box- and equality-constrained dual of the hinge-loss criterion.
//
// With C = 1 / (2 lambda), dividing  sum_i hinge_i + lambda alpha'K alpha  by 2 lambda
// gives the C-SVM primal  C sum_i xi_i + 1/2 |w|^2, whose dual is solved here.
// The primal coefficients are alpha_i = y_i a_i and the intercept is the multiplier
// of y'a = 0.

#include "kreg/errors.hpp"
#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace kreg::detail {

namespace {

constexpr double kMinCurvature = 1e-12;

struct Violation {
    Eigen::Index up = -1;    // argmax over I_up of -y_t G_t
    double up_value = -std::numeric_limits<double>::infinity();
    double low_value = std::numeric_limits<double>::infinity();  // min over I_low
};

bool in_up(int y, double a, double C) { return y > 0 ? a < C : a > 0.0; }
bool in_low(int y, double a, double C) { return y > 0 ? a > 0.0 : a < C; }

Violation scan(const Eigen::VectorXd& a, const Eigen::VectorXd& G, const Labels& y, double C) {
    Violation v;
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        const double value = -y(t) * G(t);
        if (in_up(y(t), a(t), C) && value > v.up_value) {
            v.up_value = value;
            v.up = t;
        }
        if (in_low(y(t), a(t), C) && value < v.low_value) v.low_value = value;
    }
    return v;
}

Eigen::VectorXd full_gradient(const Eigen::MatrixXd& K, const Labels& y, const Eigen::VectorXd& a) {
    const Eigen::VectorXd ya = a.cwiseProduct(y.cast<double>());
    return (K * ya).cwiseProduct(y.cast<double>()).array() - 1.0;
}

double dual_objective(const Eigen::VectorXd& a, const Eigen::VectorXd& G) {
    // 1/2 a'Qa - 1'a = 1/2 a'(G + 1) - 1'a = 1/2 a'(G - 1)
    return 0.5 * (a.array() * (G.array() - 1.0)).sum();
}

double intercept_from(const Eigen::VectorXd& a, const Eigen::VectorXd& G, const Labels& y,
                      double C, const Violation& v) {
    double sum = 0.0;
    long free_count = 0;
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (a(t) > 0.0 && a(t) < C) {
            sum += -y(t) * G(t);
            ++free_count;
        }
    }
    if (free_count > 0) return sum / static_cast<double>(free_count);
    if (!std::isfinite(v.up_value)) return v.low_value;
    if (!std::isfinite(v.low_value)) return v.up_value;
    return 0.5 * (v.up_value + v.low_value);
}

enum class Bound : char { Lower, Free, Upper };

std::vector<Bound> bound_pattern(const Eigen::VectorXd& a, double C) {
    std::vector<Bound> pattern(static_cast<std::size_t>(a.size()));
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        pattern[static_cast<std::size_t>(t)] = a(t) <= 0.0 ? Bound::Lower : (a(t) >= C ? Bound::Upper : Bound::Free);
    }
    return pattern;
}

// Minimizes the dual exactly on the face given by the current bound pattern, keeping
// bounded variables fixed. When the face minimizer leaves the box, moves toward it as
// far as the box allows (a descent step for the convex dual), fixes the blocking
// variable at its bound and tries again on the smaller face.
// Returns true once (a, G) meets the stopping rule.
bool polish(const Eigen::MatrixXd& K, const Labels& y, double C, double tolerance,
            Eigen::VectorXd& a, Eigen::VectorXd& G) {
    const Eigen::Index n = K.rows();
    for (Eigen::Index face = 0; face < n; ++face) {
        const auto pattern = bound_pattern(a, C);
        std::vector<Eigen::Index> free;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (pattern[static_cast<std::size_t>(t)] == Bound::Free) free.push_back(t);
        }
        if (free.empty()) return false;
        const auto m = static_cast<Eigen::Index>(free.size());

        Eigen::VectorXd bounded = Eigen::VectorXd::Zero(n);
        for (Eigen::Index t = 0; t < n; ++t) {
            if (pattern[static_cast<std::size_t>(t)] == Bound::Upper) bounded(t) = C;
        }
        const Eigen::VectorXd y_bounded = bounded.cwiseProduct(y.cast<double>());
        const Eigen::VectorXd from_bounded = K * y_bounded;

        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs(m + 1);
        for (Eigen::Index p = 0; p < m; ++p) {
            const Eigen::Index i = free[static_cast<std::size_t>(p)];
            for (Eigen::Index q = 0; q < m; ++q) {
                const Eigen::Index j = free[static_cast<std::size_t>(q)];
                M(p, q) = y(i) * y(j) * K(i, j);
            }
            M(p, m) = y(i);
            M(m, p) = y(i);
            rhs(p) = 1.0 - y(i) * from_bounded(i);
        }
        rhs(m) = -y_bounded.sum();

        // Direction d on the free coordinates: toward the face minimizer when it exists,
        // otherwise along a zero-curvature descent direction of the face.
        Eigen::VectorXd d(m);
        double max_step = 1.0;
        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(M);
        const Eigen::VectorXd x = solver.solve(rhs);
        if (x.allFinite() &&
            (M * x - rhs).cwiseAbs().maxCoeff() <=
                1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff() + M.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff())) {
            for (Eigen::Index p = 0; p < m; ++p) d(p) = x(p) - a(free[static_cast<std::size_t>(p)]);
        } else {
            // null space of [Q_FF; y_F'] is the null space of Q_FF + y_F y_F'
            Eigen::MatrixXd A = M.topLeftCorner(m, m) + M.col(m).head(m) * M.col(m).head(m).transpose();
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
            const double cutoff = 1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
            Eigen::VectorXd gradient(m);
            for (Eigen::Index p = 0; p < m; ++p) gradient(p) = G(free[static_cast<std::size_t>(p)]);
            d.setZero();
            for (Eigen::Index k = 0; k < m; ++k) {
                if (eig.eigenvalues()(k) > cutoff) continue;
                const Eigen::VectorXd v = eig.eigenvectors().col(k);
                d -= v * v.dot(gradient);
            }
            if (!(gradient.dot(d) < -1e-12 * (1.0 + gradient.squaredNorm()))) return false;
            max_step = std::numeric_limits<double>::infinity();
        }

        double step = max_step;
        Eigen::Index blocking = -1;
        bool blocks_low = false;
        for (Eigen::Index p = 0; p < m; ++p) {
            const Eigen::Index t = free[static_cast<std::size_t>(p)];
            double limit = std::numeric_limits<double>::infinity();
            if (d(p) < 0.0) limit = a(t) / -d(p);
            else if (d(p) > 0.0) limit = (C - a(t)) / d(p);
            if (limit < step) {
                step = limit;
                blocking = t;
                blocks_low = d(p) < 0.0;
            }
        }
        if (!std::isfinite(step)) return false;
        Eigen::VectorXd candidate = a;
        for (Eigen::Index p = 0; p < m; ++p) {
            const Eigen::Index t = free[static_cast<std::size_t>(p)];
            candidate(t) = std::clamp(a(t) + step * d(p), 0.0, C);
        }
        if (blocking >= 0) candidate(blocking) = blocks_low ? 0.0 : C;
        Eigen::VectorXd candidate_G = full_gradient(K, y, candidate);
        const double before = dual_objective(a, G);
        // objectives this large are only resolved to the rounding of a'G
        const double noise = std::sqrt(std::numeric_limits<double>::epsilon()) *
                             (a.array() * (G.array().abs() + 1.0)).sum();
        if (dual_objective(candidate, candidate_G) > before + noise) return false;
        a = std::move(candidate);
        G = std::move(candidate_G);
        if (blocking < 0) {
            const Violation v = scan(a, G, y, C);
            return v.up < 0 || v.up_value - v.low_value <= tolerance;
        }
    }
    return false;
}

}  // namespace

DualSolution solve_hinge_dual(const Eigen::MatrixXd& K, const Labels& y, double C,
                              double tolerance, long max_updates, const Eigen::VectorXd* warm) {
    const Eigen::Index n = K.rows();
    DualSolution out;
    out.a = Eigen::VectorXd::Zero(n);
    if (warm != nullptr && warm->size() == n) {
        out.a = *warm;
        const double largest = out.a.maxCoeff();
        if (largest > C) out.a *= C / largest;
        out.a = out.a.cwiseMax(0.0).cwiseMin(C);
        // clipping can break y'a = 0; fall back to a cold start in that case
        if (std::abs(out.a.dot(y.cast<double>())) > 1e-12 * std::max(1.0, C)) {
            out.a.setZero();
        }
    }
    Eigen::VectorXd G = full_gradient(K, y, out.a);
    const Eigen::VectorXd diag = K.diagonal();
    // The gradient carries rounding error of about eps * C * (row sum of |K|); a gap
    // below that cannot be certified.
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * C *
                         K.cwiseAbs().rowwise().sum().maxCoeff();
    tolerance = std::max(tolerance, noise);

    auto record_trace = [&] { out.dual_trace.push_back(dual_objective(out.a, G)); };
    record_trace();

    const long trace_every = std::max<Eigen::Index>(n, 1);
    const long polish_every = 2 * trace_every;
    std::vector<Bound> last_polished;
    for (;;) {
        if (out.updates > 0 && out.updates % polish_every == 0) {
            auto pattern = bound_pattern(out.a, C);
            if (pattern != last_polished) {
                polish(K, y, C, tolerance, out.a, G);
                last_polished = bound_pattern(out.a, C);
            }
        }
        Violation v = scan(out.a, G, y, C);
        if (v.up < 0 || v.up_value - v.low_value <= tolerance) {
            // confirm with a freshly accumulated gradient before stopping
            G = full_gradient(K, y, out.a);
            v = scan(out.a, G, y, C);
            if (v.up < 0 || v.up_value - v.low_value <= tolerance) {
                out.converged = true;
                out.gap = v.up < 0 ? 0.0 : std::max(0.0, v.up_value - v.low_value);
                out.bias = intercept_from(out.a, G, y, C, v);
                record_trace();
                return out;
            }
        }
        if (out.updates >= max_updates) {
            out.gap = v.up_value - v.low_value;
            out.bias = intercept_from(out.a, G, y, C, v);
            return out;
        }

        // second-order choice of the partner among violating I_low members
        const Eigen::Index i = v.up;
        Eigen::Index j = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(y(t), out.a(t), C)) continue;
            const double value = -y(t) * G(t);
            const double slope = v.up_value - value;
            if (slope <= 0.0) continue;
            const double curvature = std::max(diag(i) + diag(t) - 2.0 * K(i, t), kMinCurvature);
            const double score = -(slope * slope) / curvature;
            if (score < best) {
                best = score;
                j = t;
            }
        }
        if (j < 0) {
            // no strictly violating partner within rounding: treat as converged
            G = full_gradient(K, y, out.a);
            out.converged = true;
            out.gap = std::max(0.0, v.up_value - v.low_value);
            out.bias = intercept_from(out.a, G, y, C, scan(out.a, G, y, C));
            return out;
        }

        // Move a_i += y_i delta, a_j -= y_j delta; this keeps y'a fixed.
        const double slope = v.up_value - (-y(j) * G(j));
        const double curvature = std::max(diag(i) + diag(j) - 2.0 * K(i, j), kMinCurvature);
        double delta = slope / curvature;
        const double room_i = y(i) > 0 ? C - out.a(i) : out.a(i);
        const double room_j = y(j) > 0 ? out.a(j) : C - out.a(j);
        bool clip_i = false;
        bool clip_j = false;
        if (delta >= room_i) {
            delta = room_i;
            clip_i = true;
        }
        if (delta >= room_j) {
            delta = room_j;
            clip_j = true;
            clip_i = room_i == room_j;
        }

        out.a(i) += y(i) * delta;
        out.a(j) -= y(j) * delta;
        if (clip_i) out.a(i) = y(i) > 0 ? C : 0.0;
        if (clip_j) out.a(j) = y(j) > 0 ? 0.0 : C;
        out.a(i) = std::clamp(out.a(i), 0.0, C);
        out.a(j) = std::clamp(out.a(j), 0.0, C);

        for (Eigen::Index t = 0; t < n; ++t) G(t) += y(t) * delta * (K(t, i) - K(t, j));
        ++out.updates;
        if (out.updates % trace_every == 0) record_trace();
    }
}

}  // namespace kreg::detail
