// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Set BIOADAM_MNIST_DIR to a directory holding
// the four standard MNIST IDX files to run the parity check on MNIST.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bioadam/dynamics.hpp"
#include "bioadam/harness/config.hpp"
#include "bioadam/harness/experiments.hpp"
#include "bioadam/metrics.hpp"
#include "bioadam/net.hpp"
#include "bioadam/numkit.hpp"
#include "bioadam/optim.hpp"

using namespace bioadam;
using namespace bioadam::harness;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome rho_equilibrium() {
    const double eps = 1e-8;
    const auto p = optim::to_bioadam({0.9, 0.999, eps});
    auto cfg = optim::bioadam_config(1e-3, p.tau_m, p.tau_rho, p.rho_rest);
    double worst_rho = 0.0;
    double worst_rms = 0.0;
    for (double g : {0.01, 0.3, 0.7, 5.0}) {
        auto st = optim::init_state(cfg, 1);
        dynamics::RmsPropReference ref{0.0, 0.999, eps};
        double term = 0.0;
        const auto steps = static_cast<long>(std::ceil(100.0 * p.tau_rho));
        const std::vector<double> grad{g};
        for (long i = 0; i < steps; ++i) {
            optim::bioadam_update_substances(grad, st, cfg);
            std::tie(ref, term) = dynamics::step_rmsprop_reference(ref, g);
        }
        const double target = 1.0 / (g + eps);
        worst_rho = std::max(worst_rho, std::abs(st.v_or_rho[0] - target) / target);
        worst_rms = std::max(worst_rms, std::abs(term - target) / target);
    }
    return {worst_rho < 1e-9 && worst_rms < 1e-6,
            fmt("max rel err rho %.3g (< 1e-9), rmsprop %.3g (< 1e-6)", worst_rho, worst_rms)};
}

Outcome momentum_identity() {
    const double beta1 = 0.9;
    auto cfg = optim::bioadam_config(1e-3, optim::to_bioadam({beta1, 0.999, 1e-8}).tau_m, 1000.0);
    auto st = optim::init_state(cfg, 1);
    Rng rng(20240601);
    double m = 0.0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double g = rng.gaussian(0.0, 1.0);
        optim::bioadam_update_substances(std::vector<double>{g}, st, cfg);
        m = beta1 * m + (1.0 - beta1) * g;
        worst = std::max(worst, std::abs(st.m[0] - m));
    }
    return {worst <= 1e-12, fmt("max |m_bio - m_beta| = %.3g over 1e4 steps (<= 1e-12)", worst)};
}

Outcome algorithm_oracle() {
    const std::size_t n = 10;
    const double gamma = 1e-3, tau_m = 10.0, tau_rho = 1000.0, rho_rest = 1e8;
    Rng rng(777);
    std::vector<double> theta(n), ref(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = ref[i] = rng.gaussian(0.0, 1.0);
    // Reference: m_0 = 0, rho_0 = 1, then the three updates in order.
    std::vector<double> m(n, 0.0), rho(n, 1.0);
    auto cfg = optim::bioadam_config(gamma, tau_m, tau_rho, rho_rest);
    auto st = optim::init_state(cfg, n);
    double worst = 0.0;
    for (int t = 1; t <= 1000; ++t) {
        std::vector<double> g(n);
        for (auto& x : g) x = rng.gaussian(0.0, 0.05);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = (1.0 - 1.0 / tau_m) * m[i] + g[i] / tau_m;
            rho[i] = (rho[i] * (tau_rho - 1.0) + rho_rest) / (tau_rho + rho_rest * std::abs(g[i]));
            ref[i] = ref[i] - gamma * m[i] * rho[i];
        }
        optim::bioadam_step(theta, g, st, cfg);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(theta[i] - ref[i]));
    }
    return {worst <= 1e-12, fmt("max |theta - reference| = %.3g over 1000 steps (<= 1e-12)", worst)};
}

Outcome gradient_fidelity() {
    Rng rng(4242);
    double worst = 0.0;
    std::size_t checked = 0, skipped = 0;
    for (auto act : {net::Activation::tanh, net::Activation::sigmoid, net::Activation::relu}) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t depth = 1 + rng.below(3);
            std::vector<std::size_t> widths{1 + rng.below(16)};
            for (std::size_t d = 0; d < depth; ++d) widths.push_back(1 + rng.below(16));
            std::vector<net::Activation> acts(depth, act);
            acts.back() = net::Activation::identity;
            const auto n = net::make_network(widths, acts, rng);
            const auto x = random_init(rng, 4, widths.front(), Gaussian{0, 1});
            std::vector<std::size_t> labels(4);
            for (auto& l : labels) l = rng.below(widths.back());
            for (auto loss : {net::LossKind::mse, net::LossKind::softmax_xent}) {
                const auto r = metrics::finite_diff_check(n, x, net::Targets{labels, {}}, loss);
                worst = std::max(worst, r.max_relative_error);
                checked += r.checked;
                skipped += r.skipped;
            }
        }
    }
    return {worst < 1e-5 && checked > 0,
            fmt("max rel err %.3g (< 1e-5), ", worst) + std::to_string(checked) + " coordinates checked, " +
                std::to_string(skipped) + " relu kinks skipped"};
}

Outcome symmetry_maintenance() {
    const auto cfg = resolve_config(Experiment::train, {{"epochs", "5"}, {"b-init", "equal"}, {"predisposition", "off"},
                                                        {"optimizer", "bioadam"}});
    const auto t = run_train(cfg);
    const auto asym = t.column("max_asymmetry");
    const double worst = *std::max_element(asym.begin(), asym.end());
    return {worst < 1e-12 && asym.size() == 6,
            fmt("max |B - W| = %.3g over %.0f epoch rows (< 1e-12)", worst, static_cast<double>(asym.size()))};
}

double max_angle(const CsvTable& t, std::size_t row, std::size_t depth) {
    double m = 0.0;
    for (std::size_t l = 0; l < depth; ++l) {
        m = std::max(m, std::get<double>(t.rows()[row][t.column_index("angle_" + std::to_string(l))]));
    }
    return m;
}

// Step count at the first logged epoch where every layer is below `deg`.
double crossing_step(const CsvTable& t, std::size_t depth, double deg) {
    const auto steps = t.column("step");
    for (std::size_t r = 0; r < t.rows().size(); ++r) {
        if (max_angle(t, r, depth) < deg) return steps[r];
    }
    return INFINITY;
}

Outcome symmetry_establishment() {
    std::string detail;
    bool pass = true;

    // (a) toy pair.
    const auto toy = run_toy_symmetry(resolve_config(Experiment::toy_symmetry, {}));
    const auto gap = toy.column("gap");
    bool decreasing = true;
    for (std::size_t i = 1; i < gap.size(); ++i) decreasing = decreasing && gap[i] < gap[i - 1];
    std::size_t reach = 0;
    while (reach < gap.size() && gap[reach] >= 0.01) ++reach;
    const bool a = decreasing && reach < gap.size();
    pass = pass && a;
    detail += std::string("(a) ") + (a ? "ok" : "FAILED") + ": strictly decreasing=" + (decreasing ? "yes" : "no") +
              ", gap < 0.01 at step " + std::to_string(reach) + " of " + std::to_string(gap.size() - 1);

    // (b) 3-layer MLP at T = 10.
    const auto cfg_b = resolve_config(Experiment::symmetry, {{"temperature", "10"}});
    const auto sym = run_symmetry(cfg_b);
    const std::size_t depth = cfg_b.hidden.size() + 1;
    bool b = true;
    std::string angles, ratios;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto ang = sym.column("angle_" + std::to_string(l));
        const auto rat = sym.column("norm_ratio_" + std::to_string(l));
        const bool near_ortho = ang.front() > 70.0 && ang.front() < 110.0;
        b = b && near_ortho && ang.back() < 10.0 && rat.back() >= 0.9 && rat.back() <= 1.1;
        angles += fmt(" %.1f->%.2f", ang.front(), ang.back());
        ratios += fmt(" %.3f", rat.back());
    }
    pass = pass && b;
    detail += std::string("; (b) ") + (b ? "ok" : "FAILED") + ": angles" + angles + " deg, norm ratios" + ratios;

    // (c) T = 5 against T = 10 in a setting where predisposition dominates.
    const Settings base{{"gamma", "3e-3"}, {"epsilon", "1e-2"}, {"epochs", "100"}, {"log-every", "1"}};
    auto s5 = base;
    s5["temperature"] = "5";
    auto s10 = base;
    s10["temperature"] = "10";
    const auto c5 = crossing_step(run_symmetry(resolve_config(Experiment::symmetry, s5)), depth, 45.0);
    const auto c10 = crossing_step(run_symmetry(resolve_config(Experiment::symmetry, s10)), depth, 45.0);
    const bool c = std::isfinite(c5) && c5 < c10;
    pass = pass && c;
    detail += std::string("; (c) ") + (c ? "ok" : "FAILED") + fmt(": 45 deg crossed at step %.0f (T=5) vs %.0f (T=10)", c5, c10);
    return {pass, detail};
}

Outcome optimizer_parity() {
    Settings s;
    std::string source = "20-d blobs";
    if (const char* dir = std::getenv("BIOADAM_MNIST_DIR")) {
        const std::filesystem::path d(dir);
        s = {{"dataset", "idx"},
             {"idx-images", (d / "train-images-idx3-ubyte").string()},
             {"idx-labels", (d / "train-labels-idx1-ubyte").string()},
             {"idx-test-images", (d / "t10k-images-idx3-ubyte").string()},
             {"idx-test-labels", (d / "t10k-labels-idx1-ubyte").string()},
             {"limit", "5000"},
             {"test-limit", "1000"}};
        source = "MNIST 5k subset";
    }
    s["optimizer"] = "adam";
    auto cfg = resolve_config(Experiment::compare, s);
    cfg.optimizers.push_back(optim::translate(cfg.optimizers.front()));
    validate(cfg);
    const auto t = run_compare(cfg);
    const auto acc = t.column("test_accuracy");
    const auto run = t.column("run_id");
    double final_acc[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < acc.size(); ++i) final_acc[static_cast<int>(run[i])] = acc[i];
    const double gap = std::abs(final_acc[1] - final_acc[0]);
    return {gap <= 0.02, source + fmt(": test accuracy adam %.4f, bioadam %.4f", final_acc[0], final_acc[1]) +
                             fmt(", gap %.2f pp (<= 2 pp)", 100.0 * gap)};
}

Outcome rosenbrock_descent() {
    auto cfg = resolve_config(Experiment::compare, {{"function", "rosenbrock"}, {"optimizer", "adam"}, {"gamma", "1e-3"},
                                                    {"epsilon", "1e-2"}, {"steps", "50000"}, {"log-every", "100"}});
    cfg.optimizers.push_back(optim::translate(cfg.optimizers.front()));
    validate(cfg);
    const auto t = run_compare(cfg);
    const auto loss = t.column("loss");
    const auto run = t.column("run_id");
    const auto x = t.column("theta_0");
    const auto y = t.column("theta_1");
    double final_f[2] = {0, 0}, fx[2] = {0, 0}, fy[2] = {0, 0};
    for (std::size_t i = 0; i < loss.size(); ++i) {
        const int r = static_cast<int>(run[i]);
        final_f[r] = loss[i];
        fx[r] = x[i];
        fy[r] = y[i];
    }
    const double dist = std::hypot(fx[0] - fx[1], fy[0] - fy[1]);
    const bool pass = final_f[0] < 1e-3 && final_f[1] < 1e-3 && dist < 1e-2;
    return {pass, fmt("final f adam %.3g, bioadam %.3g (< 1e-3)", final_f[0], final_f[1]) +
                      fmt(", final-iterate distance %.3g (< 1e-2)", dist)};
}

Outcome determinism() {
    const Settings small{{"blobs-per-class", "40"}, {"blobs-classes", "3"}, {"blobs-dim", "5"}, {"epochs", "3"}};
    std::vector<std::pair<Experiment, Settings>> runs{
        {Experiment::trace, {}},
        {Experiment::compare, {{"function", "rosenbrock"}, {"steps", "5000"}, {"log-every", "10"}}},
        {Experiment::compare, small},
        {Experiment::train, small},
        {Experiment::symmetry, small},
        {Experiment::toy_symmetry, {{"toy-drive", "random"}}},
        {Experiment::sweep, [&] {
             auto s = small;
             s["threads"] = "4";
             return s;
         }()},
    };
    std::size_t identical = 0;
    std::string failed;
    for (const auto& [e, s] : runs) {
        const auto cfg = resolve_config(e, s);
        const auto a = run_experiment(cfg).str();
        const auto b = run_experiment(cfg).str();
        if (a == b && !a.empty()) ++identical;
        else failed += " " + std::string(to_string(e));
    }
    // Thread count must not change the sweep body.
    auto s1 = small;
    s1["threads"] = "1";
    const auto serial = run_sweep(resolve_config(Experiment::sweep, s1));
    auto s8 = small;
    s8["threads"] = "8";
    const auto parallel = run_sweep(resolve_config(Experiment::sweep, s8));
    const bool same_body = serial.rows() == parallel.rows();
    if (!same_body) failed += " sweep-threads";
    const bool pass = identical == runs.size() && same_body;
    return {pass, std::to_string(identical) + "/" + std::to_string(runs.size()) +
                      " experiments byte-identical on repeat, sweep rows equal for 1 vs 8 threads: " +
                      (same_body ? "yes" : "no") + (failed.empty() ? "" : "; mismatched:" + failed)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "rho-RMSProp equilibrium", 1.0, rho_equilibrium},
        {2, "momentum identity", 1.0, momentum_identity},
        {3, "Bio-Adam reference recurrence", 1.0, algorithm_oracle},
        {4, "gradient fidelity", 10.0, gradient_fidelity},
        {5, "symmetry maintenance", 30.0, symmetry_maintenance},
        {6, "symmetry establishment", 300.0, symmetry_establishment},
        {7, "optimizer parity", 300.0, optimizer_parity},
        {8, "rosenbrock descent", 30.0, rosenbrock_descent},
        {9, "determinism", 600.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
