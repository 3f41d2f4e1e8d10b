#pragma once

#include <string>

namespace kreg {

/// Convex margin losses l(y, f) for labels y in {-1, +1}.
///   Hinge             max(0, 1 - yf)
///   BinomialDeviance  log(1 + exp(-yf))
///   Exponential       exp(-yf)
///   Squared           (1 - yf)^2
enum class Loss { Hinge, BinomialDeviance, Exponential, Squared };

inline constexpr Loss kAllLosses[] = {Loss::Hinge, Loss::BinomialDeviance, Loss::Exponential,
                                      Loss::Squared};

[[nodiscard]] std::string to_string(Loss loss);

/// Accepts "hinge", "deviance" (or "binomial-deviance"), "exponential", "squared".
[[nodiscard]] Loss parse_loss(const std::string& name);

[[nodiscard]] bool is_twice_differentiable(Loss loss);

[[nodiscard]] double loss_value(Loss loss, int y, double f);

/// d/df of the loss. The hinge subgradient is -y when yf < 1 and 0 otherwise,
/// including the kink yf = 1.
[[nodiscard]] double loss_gradient(Loss loss, int y, double f);

/// d^2/df^2 of the loss. Throws NotTwiceDifferentiable for the hinge.
[[nodiscard]] double loss_curvature(Loss loss, int y, double f);

/// Expected loss p * l(+1, f) + (1 - p) * l(-1, f) at a point with P(y = +1) = p.
[[nodiscard]] double population_risk(Loss loss, double p, double f);

/// Closed-form minimizer of population_risk over f.
///   Hinge: +1 for p >= 1/2, -1 otherwise (at p = 1/2 the minimizing set is [-1, 1]).
///   BinomialDeviance: log(p / (1 - p)); Exponential: half of that; Squared: 2p - 1.
/// Throws DivergenceError for p in {0, 1} with the deviance or exponential loss.
[[nodiscard]] double population_minimizer(Loss loss, double p);

/// Numerical minimizer of population_risk: golden-section search on [-30, 30] for
/// smooth losses; for the hinge a 1e-4 grid with local refinement, returning the
/// midpoint of the minimizing set.
[[nodiscard]] double population_minimizer_numeric(Loss loss, double p);

}  // namespace kreg
