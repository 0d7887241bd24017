#include "bioadam/dynamics.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "bioadam/error.hpp"

namespace bioadam::dynamics {

void validate(const SubstanceState& s) {
    if (!(s.tau_m > 1.0)) throw ConfigError("tau_m must exceed 1, got " + std::to_string(s.tau_m));
    if (!(s.tau_rho > 1.0)) throw ConfigError("tau_rho must exceed 1, got " + std::to_string(s.tau_rho));
    if (!(s.rho_rest > 0.0)) throw ConfigError("rho_rest must be positive");
    if (!(s.m_rest >= 0.0)) throw ConfigError("m_rest must be non-negative");
}

SubstanceState resting_state(double m_rest, double rho_rest, double tau_m, double tau_rho) {
    SubstanceState s{m_rest, m_rest, rho_rest, m_rest, rho_rest, tau_m, tau_rho};
    validate(s);
    return s;
}

Signals split_gradient(double g) {
    if (!std::isfinite(g)) throw InputError("gradient must be finite");
    if (g < 0.0) return {-g, 0.0};
    if (g > 0.0) return {0.0, g};
    return {};
}

SubstanceState step_m(const SubstanceState& s, double g, double dt, bool* clamped) {
    if (!(dt > 0.0) || !(dt < s.tau_m)) {
        throw StepSizeError("step_m requires 0 < dt < tau_m, got dt=" + std::to_string(dt));
    }
    const auto [xp, xm] = split_gradient(g);
    const double k = dt / s.tau_m;
    SubstanceState out = s;
    out.m_plus = s.m_plus + k * (-(s.m_plus - s.m_rest) + xp - xm);
    out.m_minus = s.m_minus + k * (-(s.m_minus - s.m_rest) + xm - xp);
    bool hit = false;
    if (out.m_plus < 0.0) {
        out.m_plus = 0.0;
        out.m_minus = 2.0 * s.m_rest;
        hit = true;
    } else if (out.m_minus < 0.0) {
        out.m_minus = 0.0;
        out.m_plus = 2.0 * s.m_rest;
        hit = true;
    }
    if (clamped) *clamped = hit;
    return out;
}

double effective_momentum(const SubstanceState& s) { return (s.m_minus - s.m_plus) / 2.0; }

SubstanceState step_rho(const SubstanceState& s, double g, double dt) {
    if (!(dt > 0.0) || !(dt <= s.tau_rho)) {
        throw StepSizeError("step_rho requires 0 < dt <= tau_rho, got dt=" + std::to_string(dt));
    }
    if (!std::isfinite(g)) throw InputError("gradient must be finite");
    const double ratio = s.tau_rho / dt;
    SubstanceState out = s;
    out.rho = (s.rho * (ratio - 1.0) + s.rho_rest) / (ratio + s.rho_rest * std::abs(g));
    return out;
}

double rho_equilibrium(double rho_rest, double g) {
    return rho_rest / (1.0 + rho_rest * std::abs(g));
}

std::pair<RmsPropReference, double> step_rmsprop_reference(const RmsPropReference& ref, double g) {
    RmsPropReference out = ref;
    out.v = ref.beta2 * ref.v + (1.0 - ref.beta2) * g * g;
    return {out, 1.0 / (std::sqrt(out.v) + ref.epsilon)};
}

double GradientProgram::total_duration() const {
    double total = 0.0;
    for (const auto& seg : segments) total += seg.duration;
    return total;
}

void GradientProgram::validate() const {
    if (segments.empty()) throw ConfigError("gradient program has no segments");
    for (const auto& seg : segments) {
        if (!(seg.duration > 0.0)) throw ConfigError("gradient program segment durations must be positive");
        if (!std::isfinite(seg.g)) throw ConfigError("gradient program values must be finite");
    }
}

GradientProgram five_slice_program(double total) {
    const double slice = total / 5.0;
    return GradientProgram{{{slice, 0.0}, {slice, 0.3}, {slice, 0.0}, {slice, -0.7}, {slice, 0.0}}};
}

std::vector<TraceRecord> simulate(const GradientProgram& program, const SubstanceState& state0,
                                  const RmsPropReference& ref0, double dt) {
    program.validate();
    validate(state0);
    if (!(dt > 0.0)) throw StepSizeError("simulate requires dt > 0");

    std::vector<TraceRecord> out;
    SubstanceState state = state0;
    RmsPropReference ref = ref0;
    std::size_t step = 0;
    for (const auto& seg : program.segments) {
        // The tiny slack absorbs representation error in duration/dt.
        const auto n = static_cast<std::size_t>(std::floor(seg.duration / dt + 1e-9));
        const auto [xp, xm] = split_gradient(seg.g);
        for (std::size_t i = 0; i < n; ++i) {
            bool clamped = false;
            state = step_m(state, seg.g, dt, &clamped);
            state = step_rho(state, seg.g, dt);
            double term = 0.0;
            std::tie(ref, term) = step_rmsprop_reference(ref, seg.g);
            ++step;
            out.push_back(TraceRecord{static_cast<double>(step) * dt, seg.g, xp, xm, state.m_plus,
                                      state.m_minus, effective_momentum(state), state.rho, term,
                                      clamped});
        }
    }
    return out;
}

}  // namespace bioadam::dynamics
