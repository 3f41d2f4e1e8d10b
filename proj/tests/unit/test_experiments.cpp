#include "kreg/errors.hpp"
#include "kreg/experiments.hpp"
#include "kreg/parallel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace kreg;

namespace {

std::string metadata_as_config(const SeriesFile& file) {
    std::string text;
    for (const auto& [key, value] : file.metadata) text += key + "=" + value + "\n";
    return text;
}

long count_of(const std::string& text, const std::string& needle) {
    long n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST(Config, Defaults) {
    const auto c = default_config("errcurves");
    EXPECT_EQ(c.gammas, (std::vector<double>{0.1, 0.5, 1.0, 5.0}));
    EXPECT_EQ(c.lambda_grid.count, 50);
    EXPECT_EQ(c.loss, Loss::Hinge);
    ASSERT_TRUE(c.test.has_value());
    EXPECT_EQ(c.test->count, 1000);
    EXPECT_EQ(c.rank_threshold, 1e-12);
    EXPECT_EQ(c.deviance_scale, 1.0);
    EXPECT_EQ(default_config("table1").gammas, (std::vector<double>{5.0, 1.0, 0.5, 0.1}));
    EXPECT_EQ(default_config("table1").lambda_grid.min, 1e-8);
    EXPECT_EQ(default_config("errcurves").lambda_grid.min, 1e-4);
    EXPECT_THROW((void)default_config("plot-everything"), InputError);
}

TEST(Config, SettingsAndValidation) {
    auto c = default_config("table1");
    apply_setting(c, "gammas", "5, 1");
    apply_setting(c, "lambda-grid", "0.01:10:7");
    apply_setting(c, "loss", "deviance");
    apply_setting(c, "train", "esl:/tmp/some file.txt");
    apply_setting(c, "format", "csv,svg");
    EXPECT_EQ(c.gammas, (std::vector<double>{5.0, 1.0}));
    EXPECT_EQ(c.lambda_grid.values().size(), 7u);
    EXPECT_EQ(c.loss, Loss::BinomialDeviance);
    EXPECT_EQ(c.train.kind, DataSource::Kind::File);
    EXPECT_EQ(c.train.format, DatasetFormat::EslMixture);
    EXPECT_EQ(c.train.path, "/tmp/some file.txt");
    EXPECT_EQ(c.formats, (std::set<std::string>{"csv", "svg"}));
    apply_setting(c, "gammas", "1,-2");
    EXPECT_THROW(c.validate(), InputError);
}

TEST(Config, RejectsBadValues) {
    auto c = default_config("table1");
    EXPECT_THROW(apply_setting(c, "seed", "abc"), InputError);
    EXPECT_THROW(apply_setting(c, "lambda-grid", "1:2"), InputError);
    EXPECT_THROW(apply_setting(c, "lambda-grid", "1:0.1:5"), InputError);
    EXPECT_THROW(apply_setting(c, "lambda-grid", "0.1:1:0"), InputError);
    EXPECT_THROW(apply_setting(c, "loss", "zero-one"), InputError);
    EXPECT_THROW(apply_setting(c, "train", "gen:0"), InputError);
    EXPECT_THROW(apply_setting(c, "colour", "blue"), InputError);
    c.gammas = {0.0};
    EXPECT_THROW(c.validate(), InputError);
    c = default_config("table1");
    c.formats = {"png"};
    EXPECT_THROW(c.validate(), InputError);
}

TEST(Config, ConfigTextReportsLine) {
    auto c = default_config("fit");
    apply_config_text(c, "# comment\nseed = 9\n\nlambda=0.5 # trailing\n");
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.lambda, 0.5);
    try {
        apply_config_text(c, "seed=1\nnonsense line\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        apply_config_text(c, "seed=1\nseed=1\nloss=huber\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(DataSourceText, RoundTrips) {
    for (const std::string text : {"gen:100", "gauss1d:50", "esl:data/mix.txt", "csv:out/train.csv"}) {
        EXPECT_EQ(parse_data_source(text).text(), text);
    }
    EXPECT_EQ(parse_data_source("train.csv").format, DatasetFormat::NativeCsv);
    EXPECT_EQ(parse_data_source("mixture.data").format, DatasetFormat::EslMixture);
}

TEST(SeriesFileFormat, CsvAndJson) {
    SeriesFile f;
    f.name = "demo";
    f.metadata = {{"seed", "3"}, {"note", "x"}};
    f.add_column("a", {1.0, 0.1});
    f.add_column("b", {-2.5, 1e-300});
    EXPECT_EQ(to_csv(f), "# seed=3\n# note=x\na,b\n1,-2.5\n0.1,1e-300\n");
    const std::string json = to_json(f);
    EXPECT_NE(json.find("\"columns\""), std::string::npos);
    EXPECT_NE(json.find("\"seed\": \"3\""), std::string::npos);
    EXPECT_THROW(f.add_column("c", {1.0}), InputError);
    EXPECT_EQ(f.column("b")[0], -2.5);
    EXPECT_THROW((void)f.column("z"), InputError);
}

TEST(ArgminPosition, MeanOfTies) {
    EXPECT_EQ(argmin_position({3, 1, 2}), 1.0);
    EXPECT_DOUBLE_EQ(argmin_position({1, 3, 1, 1}), 5.0 / 3.0);
    EXPECT_THROW((void)argmin_position({}), InputError);
}

TEST(Svg, TwoPointSeries) {
    const auto doc = render_svg({{"s", {0.0, 1.0}, {1.0, 2.0}}}, PlotSpec{});
    EXPECT_EQ(count_of(doc.text, "<polyline"), 1);
    const std::regex points("points=\"([^\"]*)\"");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(doc.text, m, points));
    std::istringstream coords(m[1].str());
    std::string pair;
    int pairs = 0;
    while (coords >> pair) ++pairs;
    EXPECT_EQ(pairs, 2);
    EXPECT_EQ(doc.text.rfind("<svg", 0) == 0 || doc.text.rfind("<?xml", 0) == 0, true);
    EXPECT_EQ(doc.text, render_svg({{"s", {0.0, 1.0}, {1.0, 2.0}}}, PlotSpec{}).text);
}

TEST(Svg, LogScaleClipsZero) {
    PlotSpec spec;
    spec.log_y = true;
    const auto doc = render_svg({{"s", {1.0, 2.0, 3.0}, {1.0, 0.0, 1e-3}}}, spec);
    EXPECT_EQ(doc.clipped_values, 1);
    EXPECT_NE(doc.text.find("clipped"), std::string::npos);
}

TEST(Svg, RenderErrors) {
    EXPECT_THROW((void)render_svg({}, PlotSpec{}), RenderError);
    EXPECT_THROW((void)render_svg({{"s", {}, {}}}, PlotSpec{}), RenderError);
    EXPECT_THROW((void)render_svg({{"s", {0.0, 1.0}, {1.0, NAN}}}, PlotSpec{}), RenderError);
    PlotSpec log_spec;
    log_spec.log_y = true;
    EXPECT_THROW((void)render_svg({{"s", {0.0, 1.0}, {1.0, INFINITY}}}, log_spec), RenderError);
}

TEST(Losscmp, Values) {
    const auto out = losscmp(default_config("losscmp"));
    const auto& f = out.files.front();
    ASSERT_EQ(f.rows(), 601u);
    const auto& yf = f.column("yf");
    const auto& hinge = f.column("hinge");
    const auto& dev = f.column("deviance");
    EXPECT_EQ(yf.front(), -3.0);
    EXPECT_EQ(yf.back(), 3.0);
    EXPECT_EQ(hinge[400], 0.0);
    EXPECT_NEAR(yf[400], 1.0, 1e-12);
    EXPECT_NEAR(dev[400], 0.3133, 1e-4);
    EXPECT_NEAR(hinge[300], 1.0, 1e-12);
    EXPECT_EQ(hinge[0], 4.0);
    EXPECT_NEAR(dev[0], 3.0486, 1e-4);
    EXPECT_LT(hinge[0] - dev[0], 1.0);
    auto scaled = default_config("losscmp");
    scaled.deviance_scale = 1.0 / std::log(2.0);
    EXPECT_NEAR(losscmp(scaled).files.front().column("deviance")[300], 1.0, 1e-12);
}

TEST(Spectra, OneDimensionalGaussianSample) {
    auto c = default_config("spectra");
    c.train = parse_data_source("gauss1d:50");
    c.gammas = {1.0};
    const auto f = spectra(c).files.front();
    const auto& values = f.column("eigenvalue_gamma=1");
    ASSERT_EQ(values.size(), 50u);
    for (std::size_t k = 1; k < values.size(); ++k) EXPECT_LE(values[k], values[k - 1]);
    EXPECT_GT(values.front(), 1e6 * std::max(values.back(), 1e-300));
}

TEST(Spectra, MixtureWideKernelHasFewerLargeEigenvalues) {
    auto c = default_config("spectra");
    c.gammas = {0.1, 5.0};
    const auto f = spectra(c).files.front();
    auto above = [](const std::vector<double>& v) { return std::count_if(v.begin(), v.end(), [](double d) { return d > 1e-6; }); };
    EXPECT_LT(above(f.column("eigenvalue_gamma=0.1")), above(f.column("eigenvalue_gamma=5")));
}

TEST(Spectra, FlatForIdentityGram) {
    const auto eig = eigendecompose(gram_matrix(KernelSpec::linear(), Eigen::MatrixXd::Identity(5, 5)));
    EXPECT_LE((eig.eigenvalues.array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(Eigpanel, ColumnsAndDecay) {
    const auto out = eigpanel(default_config("eigpanel"));
    ASSERT_EQ(out.files.size(), 2u);
    const auto& vectors = out.files[0];
    const auto& features = out.files[1];
    EXPECT_EQ(vectors.column_names.size(), 17u);
    const auto& x = vectors.column("x");
    for (std::size_t k = 1; k < x.size(); ++k) EXPECT_LE(x[k - 1], x[k]);
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double a : v) s += a * a;
        return std::sqrt(s);
    };
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double a : v) m = std::max(m, std::abs(a));
        return m;
    };
    for (int j = 1; j <= 16; ++j) EXPECT_NEAR(norm(vectors.column("u" + std::to_string(j))), 1.0, 1e-10);
    EXPECT_LT(max_abs(features.column("h16")), 1e-3 * max_abs(features.column("h1")));

    const auto spectrum = spectra([] {
        auto c = default_config("eigpanel");
        c.command = "spectra";
        return c;
    }()).files.front().column("eigenvalue_gamma=1");
    for (int j = 1; j <= 16; ++j) {
        EXPECT_NEAR(norm(features.column("h" + std::to_string(j))), std::sqrt(std::max(spectrum[j - 1], 0.0)), 1e-10);
    }
}

TEST(Eigpanel, RejectsTwoDimensionalData) {
    auto c = default_config("eigpanel");
    c.train = parse_data_source("gen:20");
    EXPECT_THROW((void)eigpanel(c), InputError);
    c = default_config("eigpanel");
    c.gammas = {1.0, 2.0};
    EXPECT_THROW((void)eigpanel(c), InputError);
}

TEST(Table1, SingleGammaGivesOneRow) {
    auto c = default_config("table1");
    c.gammas = {1.0};
    c.train = parse_data_source("gen:30");
    c.lambda_grid = parse_lambda_grid("0.01:10:5");
    const auto f = table1(c).files.front();
    EXPECT_EQ(f.rows(), 1u);
    EXPECT_EQ(f.column_names[0], "gamma");
    EXPECT_EQ(f.column_names[1], "effective_rank");
    EXPECT_EQ(f.column_names[2], "min_training_errors");
}

TEST(Table1, RejectsUnlabeledData) {
    auto c = default_config("table1");
    c.train = parse_data_source("gauss1d:20");
    EXPECT_THROW((void)table1(c), InputError);
}

TEST(Errcurves, SmallRunHasBayesReferenceAndSummary) {
    auto c = default_config("errcurves");
    c.train = parse_data_source("gen:30");
    c.test = parse_data_source("gen:200");
    c.gammas = {0.5, 5.0};
    c.lambda_grid = parse_lambda_grid("0.001:10:6");
    c.bayes_draws = 20000;
    c.formats = {"csv", "svg"};
    const auto out = errcurves(c);
    ASSERT_EQ(out.files.size(), 2u);
    EXPECT_EQ(out.files[0].rows(), 12u);
    EXPECT_EQ(out.files[1].rows(), 2u);
    double bayes = -1;
    double se = -1;
    for (const auto& [k, v] : out.files[0].metadata) {
        if (k == "bayes_error") bayes = std::stod(v);
        if (k == "bayes_standard_error") se = std::stod(v);
    }
    ASSERT_GT(bayes, 0.0);
    for (double e : out.files[0].column("test_error")) EXPECT_GE(e, bayes - 3 * se - 3 * std::sqrt(bayes * (1 - bayes) / 400));
    ASSERT_EQ(out.plots.size(), 1u);
    EXPECT_NE(out.plots[0].document.text.find("Bayes error"), std::string::npos);
    c.test.reset();
    EXPECT_THROW((void)errcurves(c), InputError);
}

TEST(Fit, CommandWritesModel) {
    auto c = default_config("fit");
    c.train = parse_data_source("gen:20");
    const auto out = fit_command(c);
    ASSERT_EQ(out.extra_files.size(), 1u);
    EXPECT_EQ(out.extra_files[0].first, "model.json");
    EXPECT_NE(out.extra_files[0].second.find("\"alpha\""), std::string::npos);
    EXPECT_EQ(out.files.front().column("converged")[0], 1.0);
}

TEST(Metadata, EchoRegeneratesIdenticalOutput) {
    auto c = default_config("table1");
    c.seed = 17;
    c.gammas = {5.0, 0.5};
    c.train = parse_data_source("gen:25");
    c.lambda_grid = parse_lambda_grid("0.001:1:4");
    const auto first = table1(c).files.front();
    auto again = default_config("table1");
    apply_config_text(again, metadata_as_config(first));
    const auto second = table1(again).files.front();
    EXPECT_EQ(to_csv(first), to_csv(second));
    bool has_version = false;
    bool has_regenerate = false;
    for (const auto& [k, v] : first.metadata) {
        has_version |= k == "version" && v == kVersion;
        has_regenerate |= k == "regenerate";
    }
    EXPECT_TRUE(has_version);
    EXPECT_TRUE(has_regenerate);
}

TEST(Determinism, ThreadCountDoesNotChangeOutput) {
    auto c = default_config("errcurves");
    c.train = parse_data_source("gen:25");
    c.test = parse_data_source("gen:100");
    c.lambda_grid = parse_lambda_grid("0.01:10:4");
    c.bayes_draws = 10000;
    set_max_threads(1);
    const auto serial = to_csv(errcurves(c).files.front());
    set_max_threads(4);
    const auto parallel = to_csv(errcurves(c).files.front());
    set_max_threads(0);
    EXPECT_EQ(serial, parallel);
}

TEST(WriteOutputs, FixedOrderAndFormats) {
    auto c = default_config("losscmp");
    c.output_dir = std::filesystem::temp_directory_path() / "kreg_write_outputs";
    std::filesystem::remove_all(c.output_dir);
    c.formats = {"svg", "json", "csv"};
    const auto written = write_outputs(losscmp(c), c);
    ASSERT_EQ(written.size(), 3u);
    EXPECT_EQ(written[0].filename(), "losscmp.csv");
    EXPECT_EQ(written[1].filename(), "losscmp.json");
    EXPECT_EQ(written[2].filename(), "losscmp.svg");
    for (const auto& p : written) EXPECT_TRUE(std::filesystem::exists(p));
    std::filesystem::remove_all(c.output_dir);
}
