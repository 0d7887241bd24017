#include "bioadam/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "bioadam/error.hpp"

namespace bioadam::harness {

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::trace: return "trace";
        case Experiment::compare: return "compare";
        case Experiment::train: return "train";
        case Experiment::symmetry: return "symmetry";
        case Experiment::toy_symmetry: return "toy-symmetry";
        case Experiment::sweep: return "sweep";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::trace, Experiment::compare, Experiment::train, Experiment::symmetry,
                   Experiment::toy_symmetry, Experiment::sweep}) {
        if (name == to_string(e)) return e;
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

const std::vector<std::pair<std::string, std::string>>& known_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys{
        {"seed", "master seed for every random stream"},
        {"out", "output CSV path ('-' for stdout)"},
        {"optimizer", "sgd|momentum|rmsprop|adam|bioadam (comma list for compare)"},
        {"gamma", "learning rate"},
        {"beta1", "momentum smoothing factor"},
        {"beta2", "squared-gradient smoothing factor"},
        {"epsilon", "RMSProp/Adam epsilon; Bio-Adam derives rho-rest = 1/epsilon"},
        {"tau-m", "time constant of m"},
        {"tau-rho", "time constant of rho"},
        {"rho-rest", "resting rho concentration (= 1/epsilon)"},
        {"rho-init", "initial rho for Bio-Adam (default 1)"},
        {"temperature", "predisposition temperature T"},
        {"predisposition", "on|off"},
        {"b-init", "backward weight init: equal|independent"},
        {"hidden", "hidden layer widths, comma separated"},
        {"activation", "hidden activation: relu|sigmoid|tanh|identity"},
        {"loss", "mse|softmax_xent"},
        {"epochs", "training epochs"},
        {"batch-size", "mini-batch size"},
        {"log-every", "row interval (steps for trace/compare functions, epochs otherwise)"},
        {"dataset", "blobs|idx"},
        {"idx-images", "IDX image file for training"},
        {"idx-labels", "IDX label file for training"},
        {"idx-test-images", "IDX image file for evaluation"},
        {"idx-test-labels", "IDX label file for evaluation"},
        {"limit", "use only the first N training samples"},
        {"test-limit", "use only the first N evaluation samples"},
        {"blobs-per-class", "training samples per blob class"},
        {"blobs-classes", "number of blob classes"},
        {"blobs-dim", "blob feature dimension"},
        {"blobs-spread", "blob gaussian standard deviation"},
        {"blobs-test-per-class", "evaluation samples per blob class"},
        {"model-in", "start from this model snapshot"},
        {"model-out", "write the final model snapshot here"},
        {"dt", "trace integration step"},
        {"m-rest", "resting concentration of m+ and m-"},
        {"program", "trace gradient program, duration:g pairs comma separated"},
        {"function", "compare on an analytic function: rosenbrock|quadratic"},
        {"start", "starting point for the analytic function"},
        {"steps", "step budget for compare functions and toy-symmetry"},
        {"toy-init-a", "toy forward weight init"},
        {"toy-init-b", "toy backward weight init"},
        {"toy-step", "toy base step size"},
        {"toy-drive", "toy shared drive: ltp|ltd|alternating|random"},
        {"sweep-gammas", "sweep learning rates, comma separated"},
        {"sweep-taus", "sweep tau_m:tau_rho pairs, comma separated"},
        {"sweep-optimizers", "sweep optimizers, comma separated"},
        {"threads", "worker threads for sweep (0 = all cores)"},
    };
    return keys;
}

std::string normalize_key(std::string_view key) {
    std::string k(key);
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool is_known(const std::string& key) {
    const auto& keys = known_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == key; });
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return d;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    if (v.empty() || v[0] == '-') throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
    if (*end != '\0' || errno == ERANGE) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return n;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected on|off, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& part : split(v, ',')) out.push_back(to_double(key, part));
    return out;
}

std::string fmt(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

class Reader {
public:
    explicit Reader(const Settings& s) : s_(s) {}

    std::optional<std::string> str(const std::string& key) const {
        const auto it = s_.find(key);
        if (it == s_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<double> num(const std::string& key) const {
        auto v = str(key);
        if (!v) return std::nullopt;
        return to_double(key, *v);
    }
    std::optional<std::size_t> count(const std::string& key) const {
        auto v = str(key);
        if (!v) return std::nullopt;
        return static_cast<std::size_t>(to_u64(key, *v));
    }
    template <class T>
    void set(const std::string& key, T& dst) const {
        if constexpr (std::is_same_v<T, double>) {
            if (auto v = num(key)) dst = *v;
        } else if constexpr (std::is_same_v<T, std::size_t>) {
            if (auto v = count(key)) dst = *v;
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (auto v = str(key)) dst = *v;
        }
    }

private:
    const Settings& s_;
};

double default_gamma(optim::Kind kind) {
    switch (kind) {
        case optim::Kind::sgd:
        case optim::Kind::momentum:
        case optim::Kind::rmsprop: return 0.01;
        case optim::Kind::adam:
        case optim::Kind::bioadam: return 1e-4;
    }
    return 1e-4;
}

// gamma_override replaces the per-kind default learning rate.
optim::OptimizerConfig optimizer_from(optim::Kind kind, const Reader& r,
                                      std::optional<double> gamma_override = std::nullopt) {
    const double gamma = r.num("gamma").value_or(gamma_override.value_or(default_gamma(kind)));
    const double beta1 = r.num("beta1").value_or(0.9);
    const auto eps = r.num("epsilon");
    optim::OptimizerConfig cfg;
    switch (kind) {
        case optim::Kind::sgd: cfg = optim::sgd_config(gamma); break;
        case optim::Kind::momentum: cfg = optim::momentum_config(gamma, beta1); break;
        case optim::Kind::rmsprop:
            cfg = optim::rmsprop_config(gamma, r.num("beta2").value_or(0.99), eps.value_or(1e-8));
            break;
        case optim::Kind::adam:
            cfg = optim::adam_config(gamma, beta1, r.num("beta2").value_or(0.999), eps.value_or(1e-8));
            break;
        case optim::Kind::bioadam: {
            // Unset time constants follow from the betas when those are given.
            double tau_m = 10.0;
            double tau_rho = 1000.0;
            if (auto b1 = r.num("beta1")) tau_m = optim::to_bioadam({*b1, 0.0, 1.0}).tau_m;
            if (auto b2 = r.num("beta2")) tau_rho = optim::to_bioadam({0.0, *b2, 1.0}).tau_rho;
            tau_m = r.num("tau-m").value_or(tau_m);
            tau_rho = r.num("tau-rho").value_or(tau_rho);
            cfg = optim::bioadam_config(gamma, tau_m, tau_rho, r.num("rho-rest"), eps);
            if (auto init = r.num("rho-init")) cfg.rho_init = *init;
            break;
        }
    }
    optim::validate(cfg);
    return cfg;
}

dynamics::GradientProgram parse_program(const std::string& v) {
    dynamics::GradientProgram p;
    for (const auto& part : split(v, ',')) {
        const auto kv = split(part, ':');
        if (kv.size() != 2) throw ConfigError("program: expected duration:g, got '" + part + "'");
        p.segments.push_back({to_double("program", kv[0]), to_double("program", kv[1])});
    }
    p.validate();
    return p;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

void echo_optimizer(std::vector<std::pair<std::string, std::string>>& out, const std::string& prefix,
                    const optim::OptimizerConfig& o) {
    out.emplace_back(prefix + "kind", std::string(optim::to_string(o.kind)));
    out.emplace_back(prefix + "gamma", fmt(o.gamma));
    switch (o.kind) {
        case optim::Kind::sgd: break;
        case optim::Kind::momentum: out.emplace_back(prefix + "beta1", fmt(o.beta1)); break;
        case optim::Kind::rmsprop:
            out.emplace_back(prefix + "beta2", fmt(o.beta2));
            out.emplace_back(prefix + "epsilon", fmt(o.epsilon));
            break;
        case optim::Kind::adam:
            out.emplace_back(prefix + "beta1", fmt(o.beta1));
            out.emplace_back(prefix + "beta2", fmt(o.beta2));
            out.emplace_back(prefix + "epsilon", fmt(o.epsilon));
            break;
        case optim::Kind::bioadam:
            out.emplace_back(prefix + "tau-m", fmt(o.tau_m));
            out.emplace_back(prefix + "tau-rho", fmt(o.tau_rho));
            out.emplace_back(prefix + "rho-rest", fmt(o.rho_rest));
            out.emplace_back(prefix + "rho-init", fmt(o.rho_init));
            break;
    }
}

}  // namespace

Settings parse_settings(std::string_view text) {
    Settings s;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = normalize_key(trim(body.substr(0, eq)));
        if (!is_known(key)) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        s[key] = trim(body.substr(eq + 1));
    }
    return s;
}

Settings load_settings_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_settings(ss.str());
}

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::trace:
            c.log_every = 100;
            break;
        case Experiment::compare:
            // Desk-scale optimizer comparison: 20-d, 10-class blobs and a
            // single 128-unit relu hidden layer.
            c.dataset.blobs_per_class = 500;
            c.dataset.blobs_classes = 10;
            c.dataset.blobs_dim = 20;
            c.dataset.blobs_spread = 0.3;
            c.dataset.blobs_test_per_class = 100;
            c.hidden = {128};
            c.hidden_activation = net::Activation::relu;
            c.batch_size = 32;
            c.epochs = 10;
            c.log_every = 100;
            for (auto k : {optim::Kind::sgd, optim::Kind::momentum, optim::Kind::rmsprop, optim::Kind::adam,
                           optim::Kind::bioadam}) {
                c.optimizers.push_back(optimizer_from(k, Reader(Settings{})));
            }
            break;
        case Experiment::train:
            c.optimizer = optimizer_from(optim::Kind::bioadam, Reader(Settings{}));
            break;
        case Experiment::symmetry:
            // Overlapping blobs keep the gradient noisy for the whole run,
            // which is what drives the forward/backward pairs together.
            c.dataset.blobs_per_class = 500;
            c.dataset.blobs_classes = 4;
            c.dataset.blobs_dim = 8;
            c.dataset.blobs_spread = 1.0;
            c.dataset.blobs_test_per_class = 100;
            c.hidden = {32, 32};
            c.batch_size = 16;
            c.epochs = 500;
            c.log_every = 5;
            c.backward_equals_forward = false;
            c.predisposition = {true, 10.0};
            c.optimizer = optimizer_from(optim::Kind::bioadam, Reader(Settings{}), 3e-4);
            break;
        case Experiment::toy_symmetry:
            c.predisposition = {true, 1.0};
            break;
        case Experiment::sweep:
            c.dataset.blobs_per_class = 100;
            c.dataset.blobs_classes = 4;
            c.dataset.blobs_dim = 8;
            c.dataset.blobs_spread = 0.5;
            c.hidden = {32};
            c.epochs = 3;
            break;
    }
    return c;
}

ExperimentConfig resolve_config(Experiment e, const Settings& settings) {
    Settings s;
    for (const auto& [k, v] : settings) {
        const auto key = normalize_key(k);
        if (!is_known(key)) throw ConfigError("unknown setting '" + key + "'");
        s[key] = v;
    }
    const Reader r(s);
    ExperimentConfig c = default_config(e);

    if (auto v = r.str("seed")) c.seed = to_u64("seed", *v);
    r.set("out", c.out);

    if (auto v = r.str("hidden")) {
        c.hidden.clear();
        if (!v->empty()) {
            for (const auto& part : split(*v, ',')) c.hidden.push_back(static_cast<std::size_t>(to_u64("hidden", part)));
        }
    }
    if (auto v = r.str("activation")) c.hidden_activation = net::parse_activation(*v);
    if (auto v = r.str("loss")) c.loss = net::parse_loss(*v);
    if (auto v = r.str("b-init")) {
        if (*v == "equal") c.backward_equals_forward = true;
        else if (*v == "independent") c.backward_equals_forward = false;
        else throw ConfigError("b-init: expected equal|independent, got '" + *v + "'");
    }
    if (auto v = r.str("predisposition")) c.predisposition.enabled = to_bool("predisposition", *v);
    r.set("temperature", c.predisposition.temperature);
    if (e == Experiment::toy_symmetry && r.str("temperature")) c.predisposition.enabled = true;

    r.set("epochs", c.epochs);
    r.set("batch-size", c.batch_size);
    r.set("log-every", c.log_every);
    r.set("model-in", c.model_in);
    r.set("model-out", c.model_out);

    auto& d = c.dataset;
    if (auto v = r.str("dataset")) {
        if (*v == "blobs") d.kind = DatasetSpec::Kind::blobs;
        else if (*v == "idx") d.kind = DatasetSpec::Kind::idx;
        else throw ConfigError("dataset: expected blobs|idx, got '" + *v + "'");
    }
    r.set("idx-images", d.idx_images);
    r.set("idx-labels", d.idx_labels);
    r.set("idx-test-images", d.idx_test_images);
    r.set("idx-test-labels", d.idx_test_labels);
    if (!r.str("dataset") && !d.idx_images.empty()) d.kind = DatasetSpec::Kind::idx;
    r.set("limit", d.limit);
    r.set("test-limit", d.test_limit);
    r.set("blobs-per-class", d.blobs_per_class);
    r.set("blobs-classes", d.blobs_classes);
    r.set("blobs-dim", d.blobs_dim);
    r.set("blobs-spread", d.blobs_spread);
    r.set("blobs-test-per-class", d.blobs_test_per_class);

    // Optimizers.
    if (e == Experiment::compare) {
        if (auto v = r.str("optimizer")) {
            c.optimizers.clear();
            for (const auto& name : split(*v, ',')) c.optimizers.push_back(optimizer_from(optim::parse_kind(name), r));
        } else {
            for (auto& o : c.optimizers) o = optimizer_from(o.kind, r);
        }
    } else if (e == Experiment::train || e == Experiment::symmetry) {
        const auto kind = r.str("optimizer") ? optim::parse_kind(*r.str("optimizer")) : c.optimizer.kind;
        const std::optional<double> gamma_default =
            e == Experiment::symmetry ? std::optional<double>(3e-4) : std::nullopt;
        c.optimizer = optimizer_from(kind, r, gamma_default);
    }

    // Trace.
    auto& t = c.trace;
    if (e == Experiment::trace) {
        r.set("tau-m", t.tau_m);
        r.set("tau-rho", t.tau_rho);
        r.set("rho-rest", t.rho_rest);
        if (auto eps = r.num("epsilon")) {
            if (r.str("rho-rest") && std::abs(t.rho_rest * *eps - 1.0) > 1e-12) {
                throw ConfigError("rho-rest must equal 1/epsilon");
            }
            t.rho_rest = 1.0 / *eps;
        }
    }
    r.set("dt", t.dt);
    r.set("m-rest", t.m_rest);
    if (auto v = r.str("program")) t.program = parse_program(*v);

    // Analytic functions.
    r.set("function", c.function.name);
    if (auto v = r.str("start")) c.function.start = to_doubles("start", *v);
    if (e == Experiment::compare) r.set("steps", c.function.steps);

    // Toy.
    r.set("toy-init-a", c.toy.init_a);
    r.set("toy-init-b", c.toy.init_b);
    r.set("toy-step", c.toy.step_size);
    r.set("toy-drive", c.toy.drive);
    if (e == Experiment::toy_symmetry) r.set("steps", c.toy.steps);

    // Sweep.
    if (auto v = r.str("sweep-gammas")) c.sweep.gammas = to_doubles("sweep-gammas", *v);
    if (auto v = r.str("sweep-taus")) {
        c.sweep.taus.clear();
        if (!v->empty()) {
            for (const auto& part : split(*v, ',')) {
                const auto kv = split(part, ':');
                if (kv.size() != 2) throw ConfigError("sweep-taus: expected tau_m:tau_rho, got '" + part + "'");
                c.sweep.taus.emplace_back(to_double("sweep-taus", kv[0]), to_double("sweep-taus", kv[1]));
            }
        }
    }
    if (auto v = r.str("sweep-optimizers")) {
        c.sweep.optimizers.clear();
        for (const auto& name : split(*v, ',')) c.sweep.optimizers.push_back(optim::parse_kind(name));
    }
    if (e == Experiment::sweep) {
        if (auto eps = r.num("epsilon")) c.sweep.rho_rest = 1.0 / *eps;
        r.set("rho-rest", c.sweep.rho_rest);
    }
    r.set("threads", c.sweep.threads);

    validate(c);
    return c;
}

void validate(const ExperimentConfig& c) {
    if (c.batch_size == 0) throw ConfigError("batch-size must be at least 1");
    if (c.log_every == 0) throw ConfigError("log-every must be at least 1");
    if (c.predisposition.enabled && !(c.predisposition.temperature > 0.0)) {
        throw ConfigError("temperature must be positive");
    }
    const auto& d = c.dataset;
    if (d.kind == DatasetSpec::Kind::idx && (d.idx_images.empty() || d.idx_labels.empty())) {
        throw ConfigError("dataset idx needs idx-images and idx-labels");
    }
    if (d.kind == DatasetSpec::Kind::blobs &&
        (d.blobs_per_class == 0 || d.blobs_classes == 0 || d.blobs_dim == 0 || !(d.blobs_spread >= 0.0))) {
        throw ConfigError("blobs parameters must be positive");
    }
    for (std::size_t h : c.hidden) {
        if (h == 0) throw ConfigError("hidden widths must be positive");
    }
    switch (c.experiment) {
        case Experiment::trace: {
            c.trace.program.validate();
            dynamics::validate(dynamics::resting_state(c.trace.m_rest, c.trace.rho_rest, c.trace.tau_m,
                                                       c.trace.tau_rho));
            if (!(c.trace.dt > 0.0) || !(c.trace.dt < c.trace.tau_m) || !(c.trace.dt <= c.trace.tau_rho)) {
                throw ConfigError("dt must satisfy 0 < dt < tau-m and dt <= tau-rho");
            }
            break;
        }
        case Experiment::compare:
            if (c.optimizers.empty()) throw ConfigError("compare needs at least one optimizer");
            for (const auto& o : c.optimizers) optim::validate(o);
            if (!c.function.name.empty()) {
                if (c.function.name != "rosenbrock" && c.function.name != "quadratic") {
                    throw ConfigError("unknown test function '" + c.function.name + "'");
                }
                if (c.function.name == "rosenbrock" && c.function.start.size() != 2) {
                    throw ConfigError("rosenbrock needs a 2-d start point");
                }
                if (c.function.start.empty()) throw ConfigError("start point must not be empty");
            }
            break;
        case Experiment::train: optim::validate(c.optimizer); break;
        case Experiment::symmetry:
            optim::validate(c.optimizer);
            if (!c.predisposition.enabled) throw ConfigError("symmetry requires predisposition on");
            if (c.backward_equals_forward) throw ConfigError("symmetry requires b-init independent");
            break;
        case Experiment::toy_symmetry:
            if (!(c.predisposition.temperature > 0.0)) throw ConfigError("temperature must be positive");
            if (c.toy.drive != "ltp" && c.toy.drive != "ltd" && c.toy.drive != "alternating" &&
                c.toy.drive != "random") {
                throw ConfigError("toy-drive: expected ltp|ltd|alternating|random");
            }
            if (!(c.toy.step_size > 0.0)) throw ConfigError("toy-step must be positive");
            break;
        case Experiment::sweep:
            if (c.sweep.gammas.empty() || c.sweep.taus.empty() || c.sweep.optimizers.empty()) {
                throw ConfigError("sweep grid is empty");
            }
            for (const auto& [tm, tr] : c.sweep.taus) {
                if (!(tm > 1.0) || !(tr > 1.0)) throw ConfigError("sweep time constants must exceed 1");
            }
            for (double g : c.sweep.gammas) {
                if (!(g >= 0.0)) throw ConfigError("sweep learning rates must be >= 0");
            }
            for (auto k : c.sweep.optimizers) {
                if (k != optim::Kind::adam && k != optim::Kind::bioadam) {
                    throw ConfigError("sweep supports adam and bioadam only");
                }
            }
            break;
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("experiment", std::string(to_string(experiment)));
    out.emplace_back("seed", std::to_string(seed));
    const auto dataset_echo = [&] {
        if (dataset.kind == DatasetSpec::Kind::idx) {
            out.emplace_back("dataset", "idx");
            out.emplace_back("idx-images", dataset.idx_images);
            out.emplace_back("idx-labels", dataset.idx_labels);
            out.emplace_back("idx-test-images", dataset.idx_test_images);
            out.emplace_back("idx-test-labels", dataset.idx_test_labels);
            out.emplace_back("limit", std::to_string(dataset.limit));
            out.emplace_back("test-limit", std::to_string(dataset.test_limit));
        } else {
            out.emplace_back("dataset", "blobs");
            out.emplace_back("blobs-per-class", std::to_string(dataset.blobs_per_class));
            out.emplace_back("blobs-classes", std::to_string(dataset.blobs_classes));
            out.emplace_back("blobs-dim", std::to_string(dataset.blobs_dim));
            out.emplace_back("blobs-spread", fmt(dataset.blobs_spread));
            out.emplace_back("blobs-test-per-class", std::to_string(dataset.blobs_test_per_class));
        }
        out.emplace_back("hidden", join_sizes(hidden));
        out.emplace_back("activation", std::string(net::to_string(hidden_activation)));
        out.emplace_back("loss", std::string(net::to_string(loss)));
        out.emplace_back("epochs", std::to_string(epochs));
        out.emplace_back("batch-size", std::to_string(batch_size));
    };
    switch (experiment) {
        case Experiment::trace: {
            std::string prog;
            for (const auto& seg : trace.program.segments) {
                prog += (prog.empty() ? "" : ",") + fmt(seg.duration) + ":" + fmt(seg.g);
            }
            out.emplace_back("program", prog);
            out.emplace_back("dt", fmt(trace.dt));
            out.emplace_back("tau-m", fmt(trace.tau_m));
            out.emplace_back("tau-rho", fmt(trace.tau_rho));
            out.emplace_back("rho-rest", fmt(trace.rho_rest));
            out.emplace_back("m-rest", fmt(trace.m_rest));
            out.emplace_back("rmsprop-beta2", fmt(1.0 - trace.dt / trace.tau_rho));
            out.emplace_back("rmsprop-epsilon", fmt(1.0 / trace.rho_rest));
            break;
        }
        case Experiment::compare:
            for (std::size_t i = 0; i < optimizers.size(); ++i) {
                echo_optimizer(out, "optimizer." + std::to_string(i) + ".", optimizers[i]);
            }
            if (!function.name.empty()) {
                out.emplace_back("function", function.name);
                out.emplace_back("start", join_doubles(function.start));
                out.emplace_back("steps", std::to_string(function.steps));
            } else {
                dataset_echo();
            }
            break;
        case Experiment::train:
        case Experiment::symmetry:
            echo_optimizer(out, "optimizer.", optimizer);
            dataset_echo();
            out.emplace_back("b-init", backward_equals_forward ? "equal" : "independent");
            out.emplace_back("predisposition", predisposition.enabled ? "on" : "off");
            out.emplace_back("temperature", fmt(predisposition.temperature));
            if (!model_in.empty()) out.emplace_back("model-in", model_in);
            break;
        case Experiment::toy_symmetry:
            out.emplace_back("toy-init-a", fmt(toy.init_a));
            out.emplace_back("toy-init-b", fmt(toy.init_b));
            out.emplace_back("toy-step", fmt(toy.step_size));
            out.emplace_back("toy-drive", toy.drive);
            out.emplace_back("temperature", fmt(predisposition.temperature));
            out.emplace_back("steps", std::to_string(toy.steps));
            break;
        case Experiment::sweep: {
            dataset_echo();
            out.emplace_back("sweep-gammas", join_doubles(sweep.gammas));
            std::string taus;
            for (const auto& [tm, tr] : sweep.taus) taus += (taus.empty() ? "" : ",") + fmt(tm) + ":" + fmt(tr);
            out.emplace_back("sweep-taus", taus);
            std::string opts;
            for (auto k : sweep.optimizers) opts += (opts.empty() ? "" : ",") + std::string(optim::to_string(k));
            out.emplace_back("sweep-optimizers", opts);
            out.emplace_back("rho-rest", fmt(sweep.rho_rest));
            break;
        }
    }
    out.emplace_back("log-every", std::to_string(log_every));
    return out;
}

}  // namespace bioadam::harness
