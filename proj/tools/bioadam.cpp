#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <utility>

#include "bioadam/error.hpp"
#include "bioadam/harness/config.hpp"
#include "bioadam/harness/experiments.hpp"

namespace {

void fail(const std::string& msg) { std::fprintf(stderr, "bioadam: error: %s\n", msg.c_str()); }

std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace bioadam;

    CLI::App app{"Bio-Adam experiments: substance traces, optimizer comparisons, symmetry runs, sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "flat key = value settings file");

    // Every settings key is also a flag; flags override the config file.
    std::map<std::string, std::string> flag_values;
    for (const auto& [key, help] : harness::known_keys()) {
        app.add_option("--" + key, flag_values[key], help);
    }

    const std::pair<harness::Experiment, const char*> commands[] = {
        {harness::Experiment::trace, "continuous m+/m-/rho response to a piecewise-constant gradient"},
        {harness::Experiment::compare, "optimizers side by side on a dataset or an analytic function"},
        {harness::Experiment::train, "train one MLP and log loss, accuracy and B/W alignment"},
        {harness::Experiment::symmetry, "independent B and W pulled together by predisposition"},
        {harness::Experiment::toy_symmetry, "two-synapse predisposition toy"},
        {harness::Experiment::sweep, "gamma x (tau_m, tau_rho) grid, run in parallel"},
    };
    for (const auto& [e, help] : commands) app.add_subcommand(std::string(harness::to_string(e)), help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail(one_line(e.what()));
        return 2;
    }

    try {
        const auto experiment = harness::parse_experiment(app.get_subcommands().front()->get_name());
        harness::Settings settings;
        if (!config_path.empty()) settings = harness::load_settings_file(config_path);
        for (const auto& [key, help] : harness::known_keys()) {
            if (app.count("--" + key) > 0) settings[key] = flag_values[key];
        }
        const auto cfg = harness::resolve_config(experiment, settings);
        const auto table = harness::run_experiment(cfg);
        table.write_to(cfg.out);
    } catch (const ConfigError& e) {
        fail(one_line(e.what()));
        return 2;
    } catch (const std::exception& e) {
        fail(one_line(e.what()));
        return 1;
    }
    return 0;
}
