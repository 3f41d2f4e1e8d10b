#include "kreg/errors.hpp"
#include "kreg/experiments.hpp"
#include "kreg/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

struct Entry {
    const char* name;
    const char* help;
};

const Entry kCommands[] = {
    {"table1", "effective rank and minimal training errors per gamma"},
    {"spectra", "Gram-matrix eigenvalues per gamma"},
    {"eigpanel", "leading eigenvectors and features on 1-D inputs"},
    {"errcurves", "training and test error along the lambda path"},
    {"losscmp", "margin losses on a common axis"},
    {"fit", "fit one model and write it as JSON"},
    {"gen-data", "sample mixture training and test sets"},
};

// Flags that map one-to-one onto config settings.
const Entry kSettings[] = {
    {"seed", "base random seed"},
    {"gamma", "single radial kernel width"},
    {"gammas", "comma-separated radial kernel widths"},
    {"lambda-grid", "MIN:MAX:COUNT, log-spaced, fitted from MAX down"},
    {"loss", "hinge | deviance | exponential | squared"},
    {"train", "gen:N (N per class), gauss1d:N, or a data file"},
    {"test", "same forms as --train, or none"},
    {"rank-threshold", "eigenvalues at or below this are treated as zero"},
    {"out", "output directory"},
    {"format", "comma-separated subset of csv,json,svg"},
    {"deviance-scale", "factor applied to the deviance curve in losscmp"},
    {"lambda", "penalty weight for fit"},
    {"tolerance", "solver stopping tolerance"},
    {"max-iterations", "solver iteration budget"},
    {"bayes-draws", "Monte-Carlo draws for the Bayes error"},
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kreg::InputError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int run(int argc, char** argv) {
    CLI::App app{"Regularized kernel estimation experiments"};
    app.set_version_flag("--version", std::string(kreg::kVersion));
    app.require_subcommand(1);

    struct Flags {
        std::map<std::string, std::string> settings;
        std::string config_file;
        unsigned threads = 0;
    };
    std::map<std::string, Flags> flags;
    for (const auto& command : kCommands) {
        CLI::App* sub = app.add_subcommand(command.name, command.help);
        Flags& f = flags[command.name];
        for (const auto& setting : kSettings) {
            const char* key = setting.name;
            sub->add_option_function<std::string>(
                std::string("--") + key, [&f, key](const std::string& v) { f.settings[key] = v; }, setting.help);
        }
        sub->add_option("--config", f.config_file, "key=value settings file; flags take precedence");
        sub->add_option("--threads", f.threads, "worker threads (0 = all cores, 1 = serial)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Flags& f = flags[command];
    kreg::ExperimentConfig config = kreg::default_config(command);
    if (!f.config_file.empty()) kreg::apply_config_text(config, read_file(f.config_file));
    for (const auto& setting : kSettings) {
        const auto it = f.settings.find(setting.name);
        if (it != f.settings.end()) kreg::apply_setting(config, setting.name, it->second);
    }
    kreg::set_max_threads(f.threads);

    const kreg::ExperimentOutput output = kreg::run_command(config);
    for (const auto& path : kreg::write_outputs(output, config)) std::cout << path.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const kreg::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const kreg::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
