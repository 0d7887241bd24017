#include "bioadam/optim.hpp"

#include <cmath>

#include "bioadam/error.hpp"

namespace bioadam::optim {

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::sgd: return "sgd";
        case Kind::momentum: return "momentum";
        case Kind::rmsprop: return "rmsprop";
        case Kind::adam: return "adam";
        case Kind::bioadam: return "bioadam";
    }
    return "unknown";
}

Kind parse_kind(std::string_view name) {
    if (name == "sgd") return Kind::sgd;
    if (name == "momentum") return Kind::momentum;
    if (name == "rmsprop") return Kind::rmsprop;
    if (name == "adam") return Kind::adam;
    if (name == "bioadam") return Kind::bioadam;
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

OptimizerConfig sgd_config(double gamma) {
    OptimizerConfig c;
    c.kind = Kind::sgd;
    c.gamma = gamma;
    return c;
}

OptimizerConfig momentum_config(double gamma, double beta1) {
    OptimizerConfig c;
    c.kind = Kind::momentum;
    c.gamma = gamma;
    c.beta1 = beta1;
    return c;
}

OptimizerConfig rmsprop_config(double gamma, double beta2, double epsilon) {
    OptimizerConfig c;
    c.kind = Kind::rmsprop;
    c.gamma = gamma;
    c.beta2 = beta2;
    c.epsilon = epsilon;
    return c;
}

OptimizerConfig adam_config(double gamma, double beta1, double beta2, double epsilon) {
    OptimizerConfig c;
    c.kind = Kind::adam;
    c.gamma = gamma;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.epsilon = epsilon;
    return c;
}

OptimizerConfig bioadam_config(double gamma, double tau_m, double tau_rho,
                               std::optional<double> rho_rest, std::optional<double> epsilon) {
    OptimizerConfig c;
    c.kind = Kind::bioadam;
    c.gamma = gamma;
    c.tau_m = tau_m;
    c.tau_rho = tau_rho;
    if (rho_rest && epsilon) {
        if (std::abs(*rho_rest * *epsilon - 1.0) > 1e-12) {
            throw ConfigError("bioadam requires rho_rest == 1/epsilon");
        }
        c.rho_rest = *rho_rest;
        c.epsilon = *epsilon;
    } else if (rho_rest) {
        c.rho_rest = *rho_rest;
        c.epsilon = 1.0 / *rho_rest;
    } else if (epsilon) {
        c.epsilon = *epsilon;
        c.rho_rest = 1.0 / *epsilon;
    } else {
        c.rho_rest = 1e8;
        c.epsilon = 1e-8;
    }
    validate(c);
    return c;
}

namespace {

void require_beta(double beta, const char* name) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1), got " + std::to_string(beta));
    }
}

void require_epsilon(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("epsilon must be positive");
}

void require_lengths(std::size_t theta, std::size_t g, std::size_t state, const char* what) {
    if (theta != g || theta != state) {
        throw ShapeError(std::string(what) + ": length mismatch theta=" + std::to_string(theta) +
                         " g=" + std::to_string(g) + " state=" + std::to_string(state));
    }
}

}  // namespace

void validate(const OptimizerConfig& cfg) {
    if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw ConfigError("gamma must be >= 0");
    switch (cfg.kind) {
        case Kind::sgd: break;
        case Kind::momentum: require_beta(cfg.beta1, "beta1"); break;
        case Kind::rmsprop:
            require_beta(cfg.beta2, "beta2");
            require_epsilon(cfg.epsilon);
            break;
        case Kind::adam:
            require_beta(cfg.beta1, "beta1");
            require_beta(cfg.beta2, "beta2");
            require_epsilon(cfg.epsilon);
            break;
        case Kind::bioadam:
            if (!(cfg.tau_m > 1.0)) throw ConfigError("tau_m must exceed 1");
            if (!(cfg.tau_rho > 1.0)) throw ConfigError("tau_rho must exceed 1");
            if (!(cfg.rho_rest > 0.0) || !std::isfinite(cfg.rho_rest)) {
                throw ConfigError("rho_rest must be positive");
            }
            if (std::abs(cfg.rho_rest * cfg.epsilon - 1.0) > 1e-12) {
                throw ConfigError("bioadam requires rho_rest == 1/epsilon");
            }
            if (!(cfg.rho_init > 0.0 && cfg.rho_init <= cfg.rho_rest)) {
                throw ConfigError("rho_init must lie in (0, rho_rest]");
            }
            break;
    }
}

BioAdamParams to_bioadam(const AdamParams& p) {
    require_beta(p.beta1, "beta1");
    require_beta(p.beta2, "beta2");
    require_epsilon(p.epsilon);
    return {1.0 / (1.0 - p.beta1), 1.0 / (1.0 - p.beta2), 1.0 / p.epsilon};
}

AdamParams to_adam(const BioAdamParams& p) {
    if (!(p.tau_m >= 1.0) || !(p.tau_rho >= 1.0)) throw ConfigError("time constants must be >= 1");
    if (!(p.rho_rest > 0.0)) throw ConfigError("rho_rest must be positive");
    return {1.0 - 1.0 / p.tau_m, 1.0 - 1.0 / p.tau_rho, 1.0 / p.rho_rest};
}

OptimizerConfig translate(const OptimizerConfig& cfg) {
    if (cfg.kind == Kind::adam) {
        const auto b = to_bioadam({cfg.beta1, cfg.beta2, cfg.epsilon});
        return bioadam_config(cfg.gamma, b.tau_m, b.tau_rho, b.rho_rest);
    }
    if (cfg.kind == Kind::bioadam) {
        const auto a = to_adam({cfg.tau_m, cfg.tau_rho, cfg.rho_rest});
        return adam_config(cfg.gamma, a.beta1, a.beta2, a.epsilon);
    }
    throw ConfigError("only adam and bioadam configs translate");
}

OptimizerState init_state(const OptimizerConfig& cfg, std::size_t n) {
    validate(cfg);
    OptimizerState s;
    switch (cfg.kind) {
        case Kind::sgd: break;
        case Kind::momentum: s.m.assign(n, 0.0); break;
        case Kind::rmsprop: s.v_or_rho.assign(n, 0.0); break;
        case Kind::adam:
            s.m.assign(n, 0.0);
            s.v_or_rho.assign(n, 0.0);
            break;
        case Kind::bioadam:
            s.m.assign(n, 0.0);
            s.v_or_rho.assign(n, cfg.rho_init);
            break;
    }
    return s;
}

void sgd_step(std::span<double> theta, std::span<const double> g, const OptimizerConfig& cfg) {
    require_lengths(theta.size(), g.size(), theta.size(), "sgd_step");
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.gamma * g[i];
}

void momentum_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                   const OptimizerConfig& cfg) {
    require_lengths(theta.size(), g.size(), state.m.size(), "momentum_step");
    const double b1 = cfg.beta1;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g[i];
        theta[i] -= cfg.gamma * state.m[i];
    }
    ++state.step_count;
}

void rmsprop_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                  const OptimizerConfig& cfg) {
    require_lengths(theta.size(), g.size(), state.v_or_rho.size(), "rmsprop_step");
    const double b2 = cfg.beta2;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        auto& v = state.v_or_rho[i];
        v = b2 * v + (1.0 - b2) * g[i] * g[i];
        theta[i] -= cfg.gamma * g[i] / (std::sqrt(v) + cfg.epsilon);
    }
    ++state.step_count;
}

void adam_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
               const OptimizerConfig& cfg) {
    require_lengths(theta.size(), g.size(), state.m.size(), "adam_step");
    require_lengths(theta.size(), g.size(), state.v_or_rho.size(), "adam_step");
    const double b1 = cfg.beta1;
    const double b2 = cfg.beta2;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        auto& m = state.m[i];
        auto& v = state.v_or_rho[i];
        m = b1 * m + (1.0 - b1) * g[i];
        v = b2 * v + (1.0 - b2) * g[i] * g[i];
        theta[i] -= cfg.gamma * m / (std::sqrt(v) + cfg.epsilon);
    }
    ++state.step_count;
}

void bioadam_update_substances(std::span<const double> g, OptimizerState& state,
                               const OptimizerConfig& cfg) {
    require_lengths(g.size(), state.m.size(), state.v_or_rho.size(), "bioadam_update_substances");
    const double tau_m = cfg.tau_m;
    const double tau_rho = cfg.tau_rho;
    const double rest = cfg.rho_rest;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto& m = state.m[i];
        auto& rho = state.v_or_rho[i];
        m = (1.0 - 1.0 / tau_m) * m + g[i] / tau_m;
        rho = (rho * (tau_rho - 1.0) + rest) / (tau_rho + rest * std::abs(g[i]));
    }
    ++state.step_count;
}

void bioadam_step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
                  const OptimizerConfig& cfg) {
    require_lengths(theta.size(), g.size(), state.m.size(), "bioadam_step");
    bioadam_update_substances(g, state, cfg);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] -= cfg.gamma * state.m[i] * state.v_or_rho[i];
    }
}

void step(std::span<double> theta, std::span<const double> g, OptimizerState& state,
          const OptimizerConfig& cfg) {
    switch (cfg.kind) {
        case Kind::sgd:
            sgd_step(theta, g, cfg);
            ++state.step_count;
            break;
        case Kind::momentum: momentum_step(theta, g, state, cfg); break;
        case Kind::rmsprop: rmsprop_step(theta, g, state, cfg); break;
        case Kind::adam: adam_step(theta, g, state, cfg); break;
        case Kind::bioadam: bioadam_step(theta, g, state, cfg); break;
    }
}

}  // namespace bioadam::optim
