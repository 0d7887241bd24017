#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bioadam/data.hpp"
#include "bioadam/harness/config.hpp"
#include "bioadam/harness/csv.hpp"
#include "bioadam/net.hpp"

namespace bioadam::harness {

// Each experiment returns its table with the resolved config echoed as
// comment lines. All randomness derives from cfg.seed.
CsvTable run_trace(const ExperimentConfig& cfg);
CsvTable run_compare(const ExperimentConfig& cfg);
CsvTable run_train(const ExperimentConfig& cfg);
CsvTable run_symmetry(const ExperimentConfig& cfg);
CsvTable run_toy_symmetry(const ExperimentConfig& cfg);
CsvTable run_sweep(const ExperimentConfig& cfg);
CsvTable run_experiment(const ExperimentConfig& cfg);

// Train and evaluation sets. Blobs draw both from `rng`; IDX without test
// files holds out the last sixth of the (limited) training set.
std::pair<data::Dataset, data::Dataset> load_datasets(const DatasetSpec& spec, Rng& rng);

// Layer widths: input, hidden..., classes. Output layer is identity.
net::Network build_network(const ExperimentConfig& cfg, std::size_t inputs, std::size_t classes, Rng& rng);

// Analytic test functions and their gradients.
double rosenbrock(std::span<const double> x);
std::vector<double> rosenbrock_grad(std::span<const double> x);
double quadratic(std::span<const double> x);
std::vector<double> quadratic_grad(std::span<const double> x);

struct ToyWeights {
    double a = 0.0;
    double b = 0.0;
};

// One shared-drive step: LTP raises both weights by step * p(w, LTP), LTD
// lowers them by step * p(w, LTD).
ToyWeights toy_step(ToyWeights w, net::Direction drive, double step_size, double temperature);

}  // namespace bioadam::harness
