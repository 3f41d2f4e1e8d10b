#include "kreg/errors.hpp"
#include "kreg/losses.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kreg;

namespace {

std::vector<double> probability_grid() {
    std::vector<double> p;
    for (int k = 1; k <= 19; ++k) p.push_back(0.05 * k);
    return p;
}

// Brute-force grid minimum of the population risk, independent of the library search.
double grid_argmin(Loss loss, double p, double lo, double hi, double step) {
    double best_f = lo;
    double best = std::numeric_limits<double>::infinity();
    for (double f = lo; f <= hi; f += step) {
        const double r = p * oracle::raw_loss(loss, 1, f) + (1 - p) * oracle::raw_loss(loss, -1, f);
        if (r < best) {
            best = r;
            best_f = f;
        }
    }
    return best_f;
}

}  // namespace

TEST(LossValue, Examples) {
    EXPECT_EQ(loss_value(Loss::Hinge, 1, 0.0), 1.0);
    EXPECT_EQ(loss_value(Loss::Hinge, 1, 2.0), 0.0);
    EXPECT_NEAR(loss_value(Loss::BinomialDeviance, 1, 0.0), 0.693147, 1e-6);
    EXPECT_NEAR(loss_value(Loss::BinomialDeviance, 1, 1.0), 0.3133, 1e-4);
    EXPECT_NEAR(loss_value(Loss::BinomialDeviance, 1, -3.0), 3.0486, 1e-4);
    EXPECT_EQ(loss_value(Loss::Hinge, 1, -3.0), 4.0);
    EXPECT_EQ(loss_value(Loss::Exponential, -1, 0.0), 1.0);
    EXPECT_EQ(loss_value(Loss::Squared, -1, 1.0), 4.0);
}

TEST(LossValue, MatchesFormulasOnRandomInputs) {
    oracle::Gen gen(21);
    for (int k = 0; k < 500; ++k) {
        const int y = gen.label();
        const double f = gen.uniform(-10, 10);
        for (Loss loss : kAllLosses) {
            EXPECT_NEAR(loss_value(loss, y, f), oracle::raw_loss(loss, y, f), 1e-12 * (1 + oracle::raw_loss(loss, y, f)));
        }
    }
}

TEST(LossValue, DevianceIsOverflowSafe) {
    EXPECT_NEAR(loss_value(Loss::BinomialDeviance, 1, -1000.0), 1000.0, 1e-9);
    EXPECT_GT(loss_value(Loss::BinomialDeviance, 1, 30.0), 0.0);
    EXPECT_EQ(loss_value(Loss::BinomialDeviance, 1, 800.0), 0.0);
    EXPECT_TRUE(std::isfinite(loss_value(Loss::BinomialDeviance, -1, 1e6)));
}

TEST(LossValue, RejectsInvalidLabel) {
    for (Loss loss : kAllLosses) {
        EXPECT_THROW((void)loss_value(loss, 0, 1.0), InputError);
        EXPECT_THROW((void)loss_gradient(loss, 2, 1.0), InputError);
    }
}

TEST(LossGradient, Examples) {
    EXPECT_EQ(loss_gradient(Loss::Hinge, 1, 0.0), -1.0);
    EXPECT_EQ(loss_gradient(Loss::Hinge, 1, 1.0), 0.0);
    EXPECT_EQ(loss_gradient(Loss::Hinge, -1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(loss_gradient(Loss::BinomialDeviance, 1, 0.0), -0.5);
}

TEST(LossGradient, FiniteDifferenceAgreement) {
    oracle::Gen gen(22);
    for (Loss loss : {Loss::BinomialDeviance, Loss::Exponential, Loss::Squared}) {
        for (int k = 0; k < 100; ++k) {
            const int y = gen.label();
            const double f = gen.uniform(-4, 4);
            const double h = 1e-5;
            const double fd = (loss_value(loss, y, f + h) - loss_value(loss, y, f - h)) / (2 * h);
            const double g = loss_gradient(loss, y, f);
            EXPECT_NEAR(fd, g, 1e-6 * std::max(1.0, std::abs(g)));
            const double fd2 = (loss_gradient(loss, y, f + h) - loss_gradient(loss, y, f - h)) / (2 * h);
            const double c = loss_curvature(loss, y, f);
            EXPECT_NEAR(fd2, c, 1e-6 * std::max(1.0, std::abs(c)));
        }
    }
}

TEST(LossCurvature, ExamplesAndHingeError) {
    EXPECT_DOUBLE_EQ(loss_curvature(Loss::BinomialDeviance, 1, 0.0), 0.25);
    EXPECT_EQ(loss_curvature(Loss::Squared, -1, 3.7), 2.0);
    EXPECT_THROW((void)loss_curvature(Loss::Hinge, 1, 0.0), NotTwiceDifferentiable);
    EXPECT_FALSE(is_twice_differentiable(Loss::Hinge));
    EXPECT_TRUE(is_twice_differentiable(Loss::Exponential));
}

TEST(LossProperties, ChordConvexity) {
    oracle::Gen gen(23);
    for (Loss loss : kAllLosses) {
        for (int k = 0; k < 1000; ++k) {
            double f[3] = {gen.uniform(-5, 5), gen.uniform(-5, 5), gen.uniform(-5, 5)};
            std::sort(f, f + 3);
            if (f[2] - f[0] < 1e-9) continue;
            const int y = gen.label();
            const double t = (f[1] - f[0]) / (f[2] - f[0]);
            const double chord = (1 - t) * loss_value(loss, y, f[0]) + t * loss_value(loss, y, f[2]);
            EXPECT_LE(loss_value(loss, y, f[1]), chord + 1e-12 * (1 + chord));
        }
    }
}

TEST(LossProperties, NonIncreasingBelowUnitMargin) {
    for (Loss loss : kAllLosses) {
        double previous = loss_value(loss, 1, -5.0);
        for (double m = -5.0; m <= 1.0; m += 0.01) {
            const double v = loss_value(loss, 1, m);
            EXPECT_LE(v, previous + 1e-15);
            previous = v;
        }
    }
}

TEST(LossProperties, HingeAndDevianceShapes) {
    for (double m = -3.0; m <= 3.0; m += 0.01) {
        const double hinge = loss_value(Loss::Hinge, 1, m);
        const double dev = loss_value(Loss::BinomialDeviance, 1, m);
        EXPECT_GE(hinge, 0.0);
        EXPECT_GT(dev, 0.0);
        if (m >= 1.0) EXPECT_EQ(hinge, 0.0);
    }
    // Both grow with unit slope far out on the negative side.
    EXPECT_NEAR(loss_value(Loss::BinomialDeviance, 1, -30.0) - loss_value(Loss::BinomialDeviance, 1, -31.0), -1.0, 1e-9);
    EXPECT_LT(std::abs(loss_value(Loss::Hinge, 1, -3.0) - loss_value(Loss::BinomialDeviance, 1, -3.0)), 1.0);
}

TEST(PopulationRisk, Examples) {
    EXPECT_EQ(population_risk(Loss::Hinge, 0.5, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(population_risk(Loss::Exponential, 1.0, 0.3), loss_value(Loss::Exponential, 1, 0.3));
    EXPECT_NEAR(population_risk(Loss::BinomialDeviance, 0.75, std::log(3.0)),
                0.75 * std::log(4.0 / 3.0) + 0.25 * std::log(4.0), 1e-12);
    EXPECT_NEAR(population_risk(Loss::BinomialDeviance, 0.75, std::log(3.0)), 0.5623, 1e-4);
    EXPECT_THROW((void)population_risk(Loss::Hinge, 1.5, 0.0), InputError);
    EXPECT_THROW((void)population_risk(Loss::Hinge, -0.1, 0.0), InputError);
}

TEST(PopulationMinimizer, ClosedFormExamples) {
    EXPECT_NEAR(population_minimizer(Loss::BinomialDeviance, 0.5), 0.0, 1e-15);
    EXPECT_NEAR(population_minimizer(Loss::BinomialDeviance, 0.75), std::log(3.0), 1e-12);
    EXPECT_EQ(population_minimizer(Loss::Hinge, 0.75), 1.0);
    EXPECT_EQ(population_minimizer(Loss::Hinge, 0.25), -1.0);
    EXPECT_EQ(population_minimizer(Loss::Hinge, 0.5), 1.0);
    EXPECT_NEAR(population_minimizer(Loss::Squared, 0.75), 0.5, 1e-15);
    EXPECT_NEAR(population_minimizer(Loss::Exponential, 0.9), 0.5 * std::log(9.0), 1e-12);
}

TEST(PopulationMinimizer, DivergesAtCertainty) {
    for (Loss loss : {Loss::BinomialDeviance, Loss::Exponential}) {
        EXPECT_THROW((void)population_minimizer(loss, 0.0), DivergenceError);
        EXPECT_THROW((void)population_minimizer(loss, 1.0), DivergenceError);
    }
    EXPECT_THROW((void)population_minimizer(Loss::Squared, 1.2), InputError);
}

TEST(PopulationMinimizer, ClosedFormsMatchIndependentGrid) {
    EXPECT_NEAR(grid_argmin(Loss::BinomialDeviance, 0.75, -20, 20, 1e-3), std::log(3.0), 1e-3);
    EXPECT_NEAR(grid_argmin(Loss::Hinge, 0.75, -5, 5, 1e-3), 1.0, 1e-3);
    for (Loss loss : {Loss::BinomialDeviance, Loss::Exponential, Loss::Squared}) {
        for (double p : probability_grid()) {
            EXPECT_NEAR(population_minimizer(loss, p), grid_argmin(loss, p, -5, 5, 1e-4), 2e-4)
                << to_string(loss) << " p=" << p;
        }
    }
}

TEST(PopulationMinimizerNumeric, Examples) {
    EXPECT_NEAR(population_minimizer_numeric(Loss::Squared, 0.75), 0.5, 1e-4);
    EXPECT_NEAR(population_minimizer_numeric(Loss::Exponential, 0.9), 1.0986, 1e-4);
    for (Loss loss : kAllLosses) EXPECT_NEAR(population_minimizer_numeric(loss, 0.5), 0.0, 1e-4) << to_string(loss);
}

TEST(PopulationMinimizerNumeric, AgreesWithClosedFormAndSign) {
    for (Loss loss : kAllLosses) {
        for (double p : probability_grid()) {
            const double closed = population_minimizer(loss, p);
            const double numeric = population_minimizer_numeric(loss, p);
            if (loss == Loss::Hinge && std::abs(p - 0.5) < 1e-12) {
                // The minimizing set is [-1, 1]; both answers must lie in it.
                EXPECT_LE(std::abs(numeric), 1.0 + 1e-3);
                EXPECT_LE(std::abs(closed), 1.0);
                continue;
            }
            EXPECT_NEAR(closed, numeric, 1e-3) << to_string(loss) << " p=" << p;
            if (std::abs(p - 0.5) > 1e-12) {
                EXPECT_EQ(closed > 0, p > 0.5) << to_string(loss) << " p=" << p;
                EXPECT_EQ(numeric > 0, p > 0.5) << to_string(loss) << " p=" << p;
            }
        }
    }
}

TEST(LossNames, RoundTrip) {
    for (Loss loss : kAllLosses) EXPECT_EQ(parse_loss(to_string(loss)), loss);
    EXPECT_EQ(parse_loss("binomial-deviance"), Loss::BinomialDeviance);
    EXPECT_THROW((void)parse_loss("logistic-ish"), InputError);
}
