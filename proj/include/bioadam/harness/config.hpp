#pragma once

// Experiment configuration. Settings arrive as flat key=value pairs, from a
// config file and/or CLI flags with the same names; flags win. Keys use
// dashes (tau-m); underscores are accepted and normalized.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bioadam/dynamics.hpp"
#include "bioadam/net.hpp"
#include "bioadam/optim.hpp"

namespace bioadam::harness {

enum class Experiment { trace, compare, train, symmetry, toy_symmetry, sweep };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

using Settings = std::map<std::string, std::string>;

// Parses "key = value" lines; '#' starts a comment. Throws ConfigError on a
// malformed line or unknown key.
Settings parse_settings(std::string_view text);
Settings load_settings_file(const std::string& path);
std::string normalize_key(std::string_view key);
// Every key the harness understands, with a one-line description.
const std::vector<std::pair<std::string, std::string>>& known_keys();

struct DatasetSpec {
    enum class Kind { blobs, idx } kind = Kind::blobs;
    std::size_t blobs_per_class = 100;
    std::size_t blobs_classes = 4;
    std::size_t blobs_dim = 8;
    double blobs_spread = 0.3;
    std::size_t blobs_test_per_class = 50;
    std::string idx_images;
    std::string idx_labels;
    std::string idx_test_images;
    std::string idx_test_labels;
    // Keep only the first `limit` training samples (0 = all).
    std::size_t limit = 0;
    std::size_t test_limit = 0;
};

struct ToySpec {
    double init_a = 1.0;
    double init_b = -1.0;
    double step_size = 0.1;
    std::size_t steps = 200;
    // ltp | ltd | alternating | random
    std::string drive = "alternating";
};

// Grid of gamma x (tau_m, tau_rho). Bio-Adam cells use the pair directly,
// Adam cells the matching beta1 = 1 - 1/tau_m, beta2 = 1 - 1/tau_rho.
struct SweepSpec {
    std::vector<double> gammas{1e-5, 1e-4, 1e-3};
    std::vector<std::pair<double, double>> taus{{10.0, 1000.0}, {5.0, 100.0}, {20.0, 10000.0}};
    std::vector<optim::Kind> optimizers{optim::Kind::bioadam, optim::Kind::adam};
    double rho_rest = 1e8;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct TraceSpec {
    dynamics::GradientProgram program = dynamics::five_slice_program();
    double dt = 1.0;
    double tau_m = 1000.0;
    double tau_rho = 1000.0;
    double rho_rest = 1.0;
    double m_rest = 1.0;
};

struct FunctionSpec {
    // rosenbrock | quadratic; empty means train on the dataset instead.
    std::string name;
    std::vector<double> start{-1.2, 1.0};
    std::size_t steps = 50000;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::train;
    std::uint64_t seed = 1;
    std::string out;  // empty or "-" = stdout

    // train/symmetry use `optimizer`; compare runs every entry of `optimizers`.
    optim::OptimizerConfig optimizer;
    std::vector<optim::OptimizerConfig> optimizers;

    std::vector<std::size_t> hidden{32, 32};
    net::Activation hidden_activation = net::Activation::tanh;
    net::LossKind loss = net::LossKind::softmax_xent;
    bool backward_equals_forward = true;
    net::PredispositionConfig predisposition;

    DatasetSpec dataset;
    std::size_t epochs = 10;
    std::size_t batch_size = 16;
    // Rows every N steps for trace/compare, every N epochs for train/symmetry.
    std::size_t log_every = 1;

    std::string model_in;
    std::string model_out;

    TraceSpec trace;
    FunctionSpec function;
    ToySpec toy;
    SweepSpec sweep;

    // Resolved key=value pairs, echoed at the top of every CSV.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

// Defaults for an experiment before any settings apply.
ExperimentConfig default_config(Experiment e);

// Applies settings over the experiment defaults, then validates. Throws
// ConfigError with the offending key on any parse or constraint failure.
ExperimentConfig resolve_config(Experiment e, const Settings& settings);

void validate(const ExperimentConfig& cfg);

}  // namespace bioadam::harness
