#include "kreg/data_mixture.hpp"
#include "kreg/errors.hpp"
#include "kreg/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace kreg;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("kreg_test_" + name);
}

MixtureModel reflected_model(std::uint64_t seed) {
    MixtureModel m = sample_mixture_model(seed);
    m.means_neg = m.means_pos.rowwise().reverse();
    return m;
}

}  // namespace

TEST(Rng, DeterministicAndInRange) {
    Rng a(5), b(5);
    for (int k = 0; k < 1000; ++k) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const auto v = a.below(7);
        EXPECT_EQ(v, b.below(7));
        EXPECT_LT(v, 7u);
    }
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(Rng, NormalMoments) {
    Rng rng(77);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(MixtureModel, DeterministicPerSeed) {
    const auto a = sample_mixture_model(42);
    const auto b = sample_mixture_model(42);
    EXPECT_EQ(a.means_pos, b.means_pos);
    EXPECT_EQ(a.means_neg, b.means_neg);
    EXPECT_EQ(a.means_pos.rows(), 10);
    EXPECT_EQ(a.means_neg.rows(), 10);
    EXPECT_NEAR(a.component_sd, std::sqrt(0.2), 1e-15);
    EXPECT_EQ(a.class_prior, 0.5);
    EXPECT_NE(a.means_pos, sample_mixture_model(43).means_pos);
}

TEST(MixtureModel, NoDuplicateMeans) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto m = sample_mixture_model(seed);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) EXPECT_NE(m.means_pos.row(i), m.means_neg.row(j));
    }
}

TEST(MixtureModel, MeanCentersMonteCarlo) {
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();
    Eigen::Vector2d neg = Eigen::Vector2d::Zero();
    const int models = 10000;
    for (int s = 0; s < models; ++s) {
        const auto m = sample_mixture_model(static_cast<std::uint64_t>(s));
        pos += m.means_pos.colwise().mean().transpose();
        neg += m.means_neg.colwise().mean().transpose();
    }
    pos /= models;
    neg /= models;
    EXPECT_NEAR(pos(0), 1.0, 0.05);
    EXPECT_NEAR(pos(1), 0.0, 0.05);
    EXPECT_NEAR(neg(0), 0.0, 0.05);
    EXPECT_NEAR(neg(1), 1.0, 0.05);
}

TEST(SampleDataset, BalancedAndDeterministic) {
    const auto model = sample_mixture_model(1);
    const auto a = sample_dataset(model, 100, 2);
    const auto b = sample_dataset(model, 100, 2);
    ASSERT_EQ(a.size(), 200);
    EXPECT_EQ(a.dimension(), 2);
    EXPECT_EQ((a.y.array() == 1).count(), 100);
    EXPECT_EQ((a.y.array() == -1).count(), 100);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(format_dataset(a), format_dataset(b));
    EXPECT_THROW((void)sample_dataset(model, 0, 1), InputError);
}

TEST(SampleDataset, ClassMeanMonteCarlo) {
    const auto model = sample_mixture_model(3);
    const auto data = sample_dataset(model, 10000, 4);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < data.size(); ++i)
        if (data.y(i) == 1) mean += data.X.row(i).transpose();
    mean /= 10000.0;
    const Eigen::Vector2d expected = model.means_pos.colwise().mean().transpose();
    EXPECT_LT((mean - expected).norm(), 0.15);
}

TEST(BayesPosterior, SymmetryAndNormalization) {
    const auto m = reflected_model(7);
    EXPECT_NEAR(bayes_posterior(m, Eigen::Vector2d(0.3, 0.3)), 0.5, 1e-12);
    EXPECT_NEAR(bayes_posterior(m, Eigen::Vector2d(-2.0, -2.0)), 0.5, 1e-12);
    oracle::Gen gen(8);
    const auto model = sample_mixture_model(9);
    MixtureModel swapped = model;
    std::swap(swapped.means_pos, swapped.means_neg);
    for (int k = 0; k < 1000; ++k) {
        const Eigen::Vector2d x(gen.uniform(-4, 4), gen.uniform(-4, 4));
        const double p = bayes_posterior(model, x);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_NEAR(p + bayes_posterior(swapped, x), 1.0, 1e-12);
    }
}

TEST(BayesPosterior, FarAlongAPositiveMean) {
    MixtureModel m = sample_mixture_model(10);
    m.means_pos.row(0) << 6.0, -6.0;
    EXPECT_GT(bayes_posterior(m, Eigen::Vector2d(6.0, -6.0)), 0.99);
}

TEST(BayesPosterior, MatchesDirectDensityRatio) {
    const auto m = sample_mixture_model(11);
    oracle::Gen gen(12);
    const double var = m.component_sd * m.component_sd;
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector2d x(gen.uniform(-2, 3), gen.uniform(-2, 3));
        double pos = 0.0;
        double neg = 0.0;
        for (int j = 0; j < 10; ++j) {
            pos += std::exp(-(x - m.means_pos.row(j).transpose()).squaredNorm() / (2 * var));
            neg += std::exp(-(x - m.means_neg.row(j).transpose()).squaredNorm() / (2 * var));
        }
        EXPECT_NEAR(bayes_posterior(m, x), pos / (pos + neg), 1e-10);
    }
}

TEST(BayesPosterior, CalibratedOnDraws) {
    const auto model = sample_mixture_model(13);
    const auto data = sample_dataset(model, 25000, 14);
    const int bins = 10;
    std::vector<double> count(bins, 0.0), positives(bins, 0.0), centers(bins, 0.0);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double p = bayes_posterior(model, data.X.row(i).transpose());
        const int b = std::min(bins - 1, static_cast<int>(p * bins));
        count[b] += 1;
        positives[b] += data.y(i) == 1 ? 1 : 0;
        centers[b] += p;
    }
    for (int b = 0; b < bins; ++b) {
        if (count[b] < 100) continue;
        const double expected = centers[b] / count[b];
        const double observed = positives[b] / count[b];
        const double se = std::sqrt(std::max(expected * (1 - expected), 1e-4) / count[b]);
        EXPECT_LE(std::abs(observed - expected), 3 * se + 1e-3) << "bin " << b;
    }
}

TEST(BayesError, IndistinguishableClasses) {
    MixtureModel m = sample_mixture_model(15);
    m.means_neg = m.means_pos;
    const auto est = bayes_error(m, 20000, 16);
    EXPECT_NEAR(est.error, 0.5, 3 * est.standard_error);
    EXPECT_EQ(est.draws, 20000);
}

TEST(BayesError, WellSeparated) {
    MixtureModel m = sample_mixture_model(17);
    m.means_pos.rowwise() = Eigen::RowVector2d(10.0, 0.0);
    m.means_neg.rowwise() = Eigen::RowVector2d(0.0, 0.0);
    m.component_sd = 0.1;
    EXPECT_LT(bayes_error(m, 10000, 18).error, 0.001);
}

TEST(BayesError, StableAcrossSeedsAndValidated) {
    const auto m = sample_mixture_model(19);
    const auto a = bayes_error(m, 50000, 1);
    const auto b = bayes_error(m, 50000, 2);
    EXPECT_LE(std::abs(a.error - b.error), 4 * std::hypot(a.standard_error, b.standard_error));
    EXPECT_EQ(bayes_error(m, 30000, 5).error, bayes_error(m, 30000, 5).error);
    EXPECT_THROW((void)bayes_error(m, 999, 1), InputError);
}

TEST(BayesError, BoundsFittedRuleOnSameTestSet) {
    const auto m = sample_mixture_model(20);
    const auto test = sample_dataset(m, 1000, 21);
    long wrong = 0;
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const int guess = bayes_posterior(m, test.X.row(i).transpose()) > 0.5 ? 1 : -1;
        wrong += guess != test.y(i);
    }
    const double bayes_on_test = static_cast<double>(wrong) / test.size();
    const auto est = bayes_error(m, 100000, 22);
    const double se_test = std::sqrt(est.error * (1 - est.error) / test.size());
    EXPECT_LE(est.error, bayes_on_test + 3 * std::hypot(est.standard_error, se_test));
}

TEST(Gauss1d, ShapeAndDeterminism) {
    const Eigen::MatrixXd a = sample_standard_normal_1d(50, 3);
    EXPECT_EQ(a.rows(), 50);
    EXPECT_EQ(a.cols(), 1);
    EXPECT_EQ(a, sample_standard_normal_1d(50, 3));
}

TEST(DatasetIo, NativeRoundTripIsExact) {
    oracle::Gen gen(23);
    Dataset data;
    data.X = gen.points(17, 3, 1e3);
    data.X(0, 0) = 1e-300;
    data.X(1, 1) = -0.1;
    data.y = gen.labels(17);
    const auto path = temp_file("roundtrip.csv");
    save_dataset(data, path);
    const Dataset back = load_dataset(path, DatasetFormat::NativeCsv);
    EXPECT_EQ(back.X, data.X);
    EXPECT_EQ(back.y, data.y);
    ASSERT_TRUE(std::holds_alternative<LoadedFrom>(back.provenance));
    std::filesystem::remove(path);
}

TEST(DatasetIo, EslLayoutMapsLabels) {
    const Dataset d = parse_dataset("# comment\n 0.5  1.25 0\n-1.0\t2.0 1\n\n3 4 1\n", DatasetFormat::EslMixture);
    ASSERT_EQ(d.size(), 3);
    EXPECT_EQ(d.dimension(), 2);
    EXPECT_EQ(d.y, Eigen::Vector3i(-1, 1, 1));
    EXPECT_EQ(d.X(1, 0), -1.0);
}

TEST(DatasetIo, ParseErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text, DatasetFormat format) -> long {
        try {
            (void)parse_dataset(text, format);
        } catch (const ParseError& e) {
            return static_cast<long>(e.line());
        }
        return -1;
    };
    EXPECT_EQ(line_of("1 2 0\n3 4 1\n5 6 7 1\n", DatasetFormat::EslMixture), 3);
    EXPECT_EQ(line_of("1 2 0\n3 x 1\n", DatasetFormat::EslMixture), 2);
    EXPECT_EQ(line_of("1 2 0\n3 4 2\n", DatasetFormat::EslMixture), 2);
    EXPECT_EQ(line_of("x1,x2,y\n1,2,1\n3,4,0\n", DatasetFormat::NativeCsv), 3);
    EXPECT_EQ(line_of("x1,x2,y\n1,2\n", DatasetFormat::NativeCsv), 2);
    EXPECT_EQ(line_of("a,b,c\n1,2,1\n", DatasetFormat::NativeCsv), 1);
    EXPECT_NE(line_of("", DatasetFormat::NativeCsv), -1);
    EXPECT_NE(line_of("# only a comment\n", DatasetFormat::EslMixture), -1);
    EXPECT_THROW((void)load_dataset(temp_file("missing_file.csv"), DatasetFormat::NativeCsv), InputError);
}
