#pragma once

// Discrete-time optimizers over flat parameter arrays: SGD, SGD with
// momentum, RMSProp, Adam (without bias correction) and Bio-Adam.
//
// Bio-Adam keeps two per-parameter densities:
//   m   <- (1 - 1/tau_m) m + g / tau_m
//   rho <- (rho (tau_rho - 1) + rho_rest) / (tau_rho + rho_rest |g|)
//   theta <- theta - gamma m rho
// With tau_m = 1/(1-beta1), tau_rho = 1/(1-beta2), rho_rest = 1/eps its
// momentum is Adam's and rho settles where Adam's 1/(sqrt(v)+eps) does.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bioadam::optim {

enum class Kind { sgd, momentum, rmsprop, adam, bioadam };

std::string_view to_string(Kind kind);
// Throws ConfigError for unknown names.
Kind parse_kind(std::string_view name);

struct OptimizerConfig {
    Kind kind = Kind::bioadam;
    double gamma = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double tau_m = 10.0;
    double tau_rho = 1000.0;
    double rho_rest = 1e8;
    // Initial rho. Algorithm default is 1 regardless of rho_rest.
    double rho_init = 1.0;
};

OptimizerConfig sgd_config(double gamma);
OptimizerConfig momentum_config(double gamma, double beta1 = 0.9);
OptimizerConfig rmsprop_config(double gamma, double beta2 = 0.99, double epsilon = 1e-8);
OptimizerConfig adam_config(double gamma, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
// Either rho_rest or epsilon may be given; the other is its reciprocal. If
// both are given they must agree. If neither, rho_rest = 1e8.
OptimizerConfig bioadam_config(double gamma, double tau_m = 10.0, double tau_rho = 1000.0,
                               std::optional<double> rho_rest = std::nullopt,
                               std::optional<double> epsilon = std::nullopt);

// Throws ConfigError on any violated constraint for cfg.kind.
void validate(const OptimizerConfig& cfg);

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct BioAdamParams {
    double tau_m = 10.0;
    double tau_rho = 1000.0;
    double rho_rest = 1e8;
};

// tau = 1/(1-beta), rho_rest = 1/eps. Throws ConfigError for beta outside
// [0, 1). beta = 0 maps to tau = 1, which bioadam validation then rejects.
BioAdamParams to_bioadam(const AdamParams& p);
AdamParams to_adam(const BioAdamParams& p);

// Same learning rate, hyperparameters mapped across.
OptimizerConfig translate(const OptimizerConfig& cfg);

struct OptimizerState {
    std::vector<double> m;
    // v for rmsprop/adam, rho for bioadam, empty otherwise.
    std::vector<double> v_or_rho;
    std::size_t step_count = 0;

    std::size_t size() const { return m.size(); }
};

OptimizerState init_state(const OptimizerConfig& cfg, std::size_t n);

// Steppers update theta and state in place. Lengths of theta, g and state
// must all agree (ShapeError otherwise).
void sgd_step(std::span<double> theta, std::span<const double> g, const OptimizerConfig& cfg);
void momentum_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                   const OptimizerConfig& cfg);
void rmsprop_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                  const OptimizerConfig& cfg);
void adam_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
               const OptimizerConfig& cfg);
void bioadam_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                  const OptimizerConfig& cfg);

// Bio-Adam substance update only (m and rho), without touching parameters.
// The network uses this to share one m/rho pair between a forward weight
// and its backward partner.
void bioadam_update_substances(std::span<const double> g, OptimizerState& state,
                               const OptimizerConfig& cfg);

// Dispatch on cfg.kind.
void step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
          const OptimizerConfig& cfg);

}  // namespace bioadam::optim
