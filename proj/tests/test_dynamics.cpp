#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "bioadam/dynamics.hpp"
#include "bioadam/error.hpp"
#include "bioadam/numkit.hpp"

using namespace bioadam;
using namespace bioadam::dynamics;

namespace {

SubstanceState rest(double tau_m = 10.0, double tau_rho = 1000.0, double rho_rest = 1.0) {
    return resting_state(1.0, rho_rest, tau_m, tau_rho);
}

double relerr(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("split_gradient") {
    auto s = split_gradient(-0.7);
    CHECK(s.x_plus == 0.7);
    CHECK(s.x_minus == 0.0);
    s = split_gradient(0.0);
    CHECK(s.x_plus == 0.0);
    CHECK(s.x_minus == 0.0);
    s = split_gradient(0.3);
    CHECK(s.x_plus == 0.0);
    CHECK(s.x_minus == 0.3);
    CHECK_THROWS_AS(split_gradient(std::numeric_limits<double>::quiet_NaN()), InputError);
    CHECK_THROWS_AS(split_gradient(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("step_m") {
    const auto s0 = rest();
    const auto same = step_m(s0, 0.0, 1.0);
    CHECK(same.m_plus == s0.m_plus);
    CHECK(same.m_minus == s0.m_minus);

    const auto s1 = step_m(s0, 0.3, 1.0);
    CHECK(s1.m_minus == doctest::Approx(1.03).epsilon(1e-14));
    CHECK(s1.m_plus == doctest::Approx(0.97).epsilon(1e-14));

    auto s = s0;
    for (int i = 0; i < 2000; ++i) s = step_m(s, 0.3, 1.0);
    CHECK(effective_momentum(s) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("step_m rejects unstable step sizes") {
    CHECK_THROWS_AS(step_m(rest(), 0.1, 10.0), StepSizeError);
    CHECK_THROWS_AS(step_m(rest(), 0.1, 0.0), StepSizeError);
    CHECK_THROWS_AS(step_m(rest(), 0.1, -1.0), StepSizeError);
}

TEST_CASE("step_m clamps at zero and keeps the sum") {
    bool clamped = false;
    const auto s = step_m(rest(), 50.0, 1.0, &clamped);
    CHECK(clamped);
    CHECK(s.m_plus == 0.0);
    CHECK(s.m_minus == 2.0);
    bool quiet = true;
    step_m(rest(), 0.5, 1.0, &quiet);
    CHECK_FALSE(quiet);
}

TEST_CASE("effective_momentum") {
    CHECK(effective_momentum(rest()) == 0.0);
    SubstanceState s = rest();
    s.m_minus = 1.03;
    s.m_plus = 0.97;
    CHECK(effective_momentum(s) == doctest::Approx(0.03).epsilon(1e-13));
}

TEST_CASE("step_rho") {
    auto s = rest();
    CHECK(step_rho(s, 0.0, 1.0).rho == s.rho_rest);
    for (int i = 0; i < 100000; ++i) s = step_rho(s, 0.3, 1.0);
    CHECK(s.rho == doctest::Approx(1.0 / 1.3).epsilon(1e-12));
    CHECK(s.rho == doctest::Approx(0.76923).epsilon(1e-5));
    for (int i = 0; i < 100000; ++i) s = step_rho(s, -0.7, 1.0);
    CHECK(s.rho == doctest::Approx(1.0 / 1.7).epsilon(1e-12));
    CHECK(s.rho == doctest::Approx(0.58824).epsilon(1e-5));
    CHECK_THROWS_AS(step_rho(rest(10, 100), 0.1, 101.0), StepSizeError);
}

TEST_CASE("resting_state validation") {
    CHECK_THROWS_AS(resting_state(1.0, 1.0, 1.0, 1000.0), ConfigError);
    CHECK_THROWS_AS(resting_state(1.0, 1.0, 10.0, 0.5), ConfigError);
    CHECK_THROWS_AS(resting_state(1.0, 0.0, 10.0, 1000.0), ConfigError);
    CHECK_THROWS_AS(resting_state(-1.0, 1.0, 10.0, 1000.0), ConfigError);
}

TEST_CASE("step_rmsprop_reference") {
    const RmsPropReference zero{0.0, 0.999, 1e-3};
    CHECK(step_rmsprop_reference(zero, 0.0).second == doctest::Approx(1e3));
    const auto [r1, term] = step_rmsprop_reference({0.0, 0.999, 1e-8}, 1.0);
    CHECK(r1.v == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(term == doctest::Approx(1.0 / (std::sqrt(0.001) + 1e-8)).epsilon(1e-12));
    RmsPropReference r{0.0, 0.999, 0.5};
    double t = 0.0;
    for (int i = 0; i < 100000; ++i) std::tie(r, t) = step_rmsprop_reference(r, -0.3);
    CHECK(t == doctest::Approx(1.0 / (0.3 + 0.5)).epsilon(1e-12));
}

TEST_CASE("simulate: five slice program") {
    const auto s0 = resting_state(1.0, 1.0, 1000.0, 1000.0);
    const RmsPropReference ref0{0.0, 0.999, 1.0};
    const auto recs = simulate(five_slice_program(), s0, ref0, 1.0);
    REQUIRE(recs.size() == 100000);
    CHECK(recs.back().t == 100000.0);
    // End of the g = 0.3 slice.
    CHECK(recs[39999].rho == doctest::Approx(1.0 / 1.3).epsilon(1e-6));
    CHECK(recs[79999].rho == doctest::Approx(1.0 / 1.7).epsilon(1e-6));
    CHECK(recs[39999].m == doctest::Approx(0.3).epsilon(1e-6));

    // Last 10 s of each slice. Driven slices settle to the shared fixed
    // point; in the silent slice that follows a drive, RMSProp's v decays
    // as g^2 exp(-t/tau), leaving a gap of about |g| exp(-t / (2 tau)).
    const double prev_g[5] = {0.0, 0.0, 0.3, 0.0, 0.7};
    for (int slice = 0; slice < 5; ++slice) {
        double worst = 0.0;
        for (int i = slice * 20000 + 10000; i < (slice + 1) * 20000; ++i) {
            worst = std::max(worst, std::abs(recs[i].rho - recs[i].rmsprop_term));
        }
        const bool driven = slice == 1 || slice == 3;
        const double bound = driven || prev_g[slice] == 0.0 ? 1e-3 : 1.01 * prev_g[slice] * std::exp(-5.0);
        CAPTURE(slice);
        CHECK(worst < bound);
    }
}

TEST_CASE("simulate: zero program stays at rest") {
    const auto s0 = resting_state(1.0, 2.5, 100.0, 100.0);
    const auto recs = simulate(GradientProgram{{{500.0, 0.0}}}, s0, {0.0, 0.99, 0.4}, 1.0);
    REQUIRE(recs.size() == 500);
    for (const auto& r : recs) {
        REQUIRE(r.m == 0.0);
        REQUIRE(r.rho == 2.5);
        REQUIRE(r.rmsprop_term == 2.5);
    }
}

TEST_CASE("simulate: halving dt barely moves the final rho") {
    const auto s0 = resting_state(1.0, 1.0, 1000.0, 1000.0);
    const auto coarse = simulate(five_slice_program(), s0, {0.0, 0.999, 1.0}, 1.0);
    const auto fine = simulate(five_slice_program(), s0, {0.0, 0.9995, 1.0}, 0.5);
    REQUIRE(fine.size() == 2 * coarse.size());
    CHECK(relerr(fine.back().rho, coarse.back().rho) < 1e-3);
    CHECK(relerr(fine[79999 * 2 + 1].rho, coarse[79999].rho) < 1e-3);
}

TEST_CASE("simulate rejects bad programs") {
    const auto s0 = rest();
    CHECK_THROWS_AS(simulate(GradientProgram{}, s0, {}, 1.0), ConfigError);
    CHECK_THROWS_AS(simulate(GradientProgram{{{-1.0, 0.0}}}, s0, {}, 1.0), ConfigError);
    CHECK_THROWS_AS(simulate(GradientProgram{{{10.0, 0.0}}}, s0, {}, 0.0), StepSizeError);
}

TEST_CASE("property: m+ + m- is conserved") {
    Rng rng(101);
    auto s = resting_state(1.0, 1.0, 50.0, 200.0);
    for (int i = 0; i < 20000; ++i) {
        s = step_m(s, rng.gaussian(0.0, 0.5), 1.0);
        REQUIRE(std::abs(s.m_plus + s.m_minus - 2.0) < 1e-9);
    }
}

TEST_CASE("property: rho converges monotonically to the fixed point from any start") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const double rho_rest = std::exp(rng.uniform(-3.0, 6.0));
        const double g = rng.uniform(-5.0, 5.0);
        const double tau = rng.uniform(2.0, 200.0);
        auto s = resting_state(1.0, rho_rest, 10.0, tau);
        s.rho = rng.uniform(0.0, 1.0) * rho_rest + 1e-12;
        const double star = rho_equilibrium(rho_rest, g);
        REQUIRE(star == doctest::Approx(1.0 / (std::abs(g) + 1.0 / rho_rest)).epsilon(1e-14));
        // star is a fixed point.
        auto at_star = s;
        at_star.rho = star;
        REQUIRE(std::abs(step_rho(at_star, g, 1.0).rho - star) <= 1e-13 * star);
        double gap = std::abs(s.rho - star);
        for (int i = 0; i < 20000; ++i) {
            s = step_rho(s, g, 1.0);
            const double next_gap = std::abs(s.rho - star);
            REQUIRE(next_gap <= gap + 1e-15 * star);
            gap = next_gap;
        }
        CHECK(gap <= 1e-9 * star);
    }
}

TEST_CASE("property: rho equilibrium agrees with RMSProp") {
    for (double g : {0.001, 0.05, 0.3, 1.0, 4.0}) {
        for (double rho_rest : {1.0, 100.0, 1e8}) {
            const double tau = 100.0;
            auto s = resting_state(1.0, rho_rest, 10.0, tau);
            RmsPropReference ref{0.0, 1.0 - 1.0 / tau, 1.0 / rho_rest};
            double term = 0.0;
            for (int i = 0; i < 10000; ++i) {
                s = step_rho(s, g, 1.0);
                std::tie(ref, term) = step_rmsprop_reference(ref, g);
            }
            CAPTURE(g);
            CAPTURE(rho_rest);
            CHECK(std::abs(s.rho - term) / term < 1e-6);
        }
    }
}

TEST_CASE("property: effective momentum follows the discretized leaky integrator") {
    Rng rng(55);
    const double tau = 37.0;
    auto s = resting_state(1.0, 1.0, tau, 100.0);
    double m = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double g = rng.gaussian(0.0, 0.2);
        s = step_m(s, g, 1.0);
        m = m + (1.0 / tau) * (g - m);
        REQUIRE(std::abs(effective_momentum(s) - m) < 1e-12);
    }
}

TEST_CASE("property: rho equilibrium decreases strictly in |g|") {
    double prev = std::numeric_limits<double>::infinity();
    for (double g = 0.0; g < 10.0; g += 0.25) {
        const double r = rho_equilibrium(1e3, -g);
        REQUIRE(r < prev);
        prev = r;
    }
}
