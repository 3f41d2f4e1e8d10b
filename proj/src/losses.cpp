#include "kreg/losses.hpp"

#include "kreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kreg {

namespace {

void check_label(int y) {
    if (y != 1 && y != -1) throw InputError("label must be -1 or +1, got " + std::to_string(y));
}

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability must lie in [0, 1]");
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

constexpr double kSearchLow = -30.0;
constexpr double kSearchHigh = 30.0;

}  // namespace

std::string to_string(Loss loss) {
    switch (loss) {
        case Loss::Hinge: return "hinge";
        case Loss::BinomialDeviance: return "deviance";
        case Loss::Exponential: return "exponential";
        case Loss::Squared: return "squared";
    }
    return "unknown";
}

Loss parse_loss(const std::string& name) {
    if (name == "hinge") return Loss::Hinge;
    if (name == "deviance" || name == "binomial-deviance") return Loss::BinomialDeviance;
    if (name == "exponential") return Loss::Exponential;
    if (name == "squared") return Loss::Squared;
    throw InputError("unknown loss '" + name + "'");
}

bool is_twice_differentiable(Loss loss) { return loss != Loss::Hinge; }

double loss_value(Loss loss, int y, double f) {
    check_label(y);
    const double margin = y * f;
    switch (loss) {
        case Loss::Hinge: return std::max(0.0, 1.0 - margin);
        case Loss::BinomialDeviance: return softplus(-margin);
        case Loss::Exponential: return std::exp(-margin);
        case Loss::Squared: return (1.0 - margin) * (1.0 - margin);
    }
    return 0.0;
}

double loss_gradient(Loss loss, int y, double f) {
    check_label(y);
    const double margin = y * f;
    switch (loss) {
        case Loss::Hinge: return margin < 1.0 ? -static_cast<double>(y) : 0.0;
        case Loss::BinomialDeviance: {
            // -y / (1 + e^{yf}) in a form that cannot overflow
            const double e = std::exp(-std::abs(margin));
            const double sigma = margin >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
            return -y * sigma;
        }
        case Loss::Exponential: return -y * std::exp(-margin);
        case Loss::Squared: return -2.0 * y * (1.0 - margin);
    }
    return 0.0;
}

double loss_curvature(Loss loss, int y, double f) {
    check_label(y);
    const double margin = y * f;
    switch (loss) {
        case Loss::Hinge: throw NotTwiceDifferentiable("hinge loss has no second derivative");
        case Loss::BinomialDeviance: {
            const double e = std::exp(-std::abs(margin));
            return e / ((1.0 + e) * (1.0 + e));
        }
        case Loss::Exponential: return std::exp(-margin);
        case Loss::Squared: return 2.0;
    }
    return 0.0;
}

double population_risk(Loss loss, double p, double f) {
    check_probability(p);
    double risk = 0.0;
    if (p > 0.0) risk += p * loss_value(loss, 1, f);
    if (p < 1.0) risk += (1.0 - p) * loss_value(loss, -1, f);
    return risk;
}

double population_minimizer(Loss loss, double p) {
    check_probability(p);
    switch (loss) {
        case Loss::Hinge: return p >= 0.5 ? 1.0 : -1.0;
        case Loss::Squared: return 2.0 * p - 1.0;
        case Loss::BinomialDeviance:
        case Loss::Exponential: {
            if (p == 0.0 || p == 1.0) {
                throw DivergenceError("population minimizer of " + to_string(loss) +
                                      " diverges at p = " + std::to_string(p));
            }
            const double logit = std::log(p / (1.0 - p));
            return loss == Loss::Exponential ? 0.5 * logit : logit;
        }
    }
    return 0.0;
}

double population_minimizer_numeric(Loss loss, double p) {
    check_probability(p);
    if ((loss == Loss::BinomialDeviance || loss == Loss::Exponential) && (p == 0.0 || p == 1.0)) {
        throw DivergenceError("population minimizer of " + to_string(loss) + " diverges at p = " +
                              std::to_string(p));
    }
    auto risk = [&](double f) { return population_risk(loss, p, f); };

    if (loss == Loss::Hinge) {
        constexpr double step = 1e-4;
        const long count = std::lround((kSearchHigh - kSearchLow) / step);
        double best = std::numeric_limits<double>::infinity();
        for (long k = 0; k <= count; ++k) best = std::min(best, risk(kSearchLow + k * step));
        const double slack = 1e-12 * (1.0 + best);
        long first = -1;
        long last = -1;
        for (long k = 0; k <= count; ++k) {
            if (risk(kSearchLow + k * step) <= best + slack) {
                if (first < 0) first = k;
                last = k;
            }
        }
        // Refine each end of the minimizing set by bisection between the last
        // grid point outside it and the first inside.
        auto refine = [&](double outside, double inside) {
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (outside + inside);
                if (risk(mid) <= best + slack) inside = mid;
                else outside = mid;
            }
            return inside;
        };
        double lo = kSearchLow + first * step;
        double hi = kSearchLow + last * step;
        if (first > 0) lo = refine(lo - step, lo);
        if (last < count) hi = refine(hi + step, hi);
        return 0.5 * (lo + hi);
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = kSearchLow;
    double b = kSearchHigh;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = risk(c);
    double fd = risk(d);
    while (b - a > 1e-7) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = risk(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = risk(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace kreg
