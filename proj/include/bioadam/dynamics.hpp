#pragma once

// Continuous-time synaptic substance dynamics. Two complementary
// concentrations m+ / m- integrate the potentiation and depression signals
// (their half-difference is the momentum), and a co-consumed concentration
// rho is depleted in proportion to rho*|g| while being replenished toward
// rho_rest. At equilibrium rho equals 1/(|g| + 1/rho_rest), the same value
// the RMSProp factor 1/(sqrt(v) + eps) settles to.

#include <cstddef>
#include <utility>
#include <vector>

namespace bioadam::dynamics {

struct SubstanceState {
    double m_plus = 1.0;
    double m_minus = 1.0;
    double rho = 1.0;
    double m_rest = 1.0;
    double rho_rest = 1.0;
    double tau_m = 1000.0;
    double tau_rho = 1000.0;
};

// Resting state: m+ = m- = m_rest, rho = rho_rest. Throws ConfigError unless
// tau_m > 1, tau_rho > 1, rho_rest > 0 and m_rest >= 0.
SubstanceState resting_state(double m_rest, double rho_rest, double tau_m, double tau_rho);
void validate(const SubstanceState& s);

struct Signals {
    double x_plus = 0.0;   // potentiation, |g| when g < 0
    double x_minus = 0.0;  // depression, |g| when g > 0
};

Signals split_gradient(double g);

// Forward-Euler step of the complementary m+/m- rule. If an extreme
// gradient would drive a concentration below zero, it is clamped to zero,
// its partner is set so m+ + m- = 2 m_rest still holds, and `clamped` (when
// given) is set.
SubstanceState step_m(const SubstanceState& s, double g, double dt, bool* clamped = nullptr);

// (m- - m+) / 2
double effective_momentum(const SubstanceState& s);

// Semi-implicit step of the rho dynamics with tau replaced by tau/dt:
//   rho' = (rho (tau/dt - 1) + rho_rest) / (tau/dt + rho_rest |g|).
// At dt = 1 this is exactly the discrete Bio-Adam update.
SubstanceState step_rho(const SubstanceState& s, double g, double dt);

// Unique fixed point of step_rho under constant g.
double rho_equilibrium(double rho_rest, double g);

struct RmsPropReference {
    double v = 0.0;
    double beta2 = 0.999;
    double epsilon = 1.0;
};

// v <- beta2 v + (1 - beta2) g^2, returns the updated tracker and 1/(sqrt(v) + eps).
std::pair<RmsPropReference, double> step_rmsprop_reference(const RmsPropReference& ref, double g);

struct Segment {
    double duration = 0.0;
    double g = 0.0;
};

struct GradientProgram {
    std::vector<Segment> segments;

    double total_duration() const;
    // Throws ConfigError on an empty program or a non-positive duration.
    void validate() const;
};

// Five equal slices [0, 0.3, 0, -0.7, 0] spanning `total` time units.
GradientProgram five_slice_program(double total = 100000.0);

struct TraceRecord {
    double t = 0.0;
    double g = 0.0;
    double x_plus = 0.0;
    double x_minus = 0.0;
    double m_plus = 0.0;
    double m_minus = 0.0;
    double m = 0.0;
    double rho = 0.0;
    double rmsprop_term = 0.0;
    bool clamped = false;
};

// One record per integration step, time stamped at the end of the step.
// Each segment runs floor(duration/dt) steps, so a trailing partial step is
// dropped.
std::vector<TraceRecord> simulate(const GradientProgram& program, const SubstanceState& state0,
                                  const RmsPropReference& ref0, double dt);

}  // namespace bioadam::dynamics
