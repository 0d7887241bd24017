#include "bioadam/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "bioadam/dynamics.hpp"
#include "bioadam/error.hpp"
#include "bioadam/metrics.hpp"
#include "bioadam/optim.hpp"

namespace bioadam::harness {

namespace {

using Row = std::vector<Cell>;

Cell num(double v) { return v; }
Cell num(std::size_t v) { return static_cast<std::int64_t>(v); }

// Independent streams for data, weights, shuffling and the toy drive.
struct Streams {
    Rng data;
    Rng init;
    std::uint64_t shuffle_seed;
    Rng drive;

    explicit Streams(std::uint64_t seed) : Streams(Rng(seed)) {}

private:
    explicit Streams(Rng master)
        : data(master.split()), init(master.split()), shuffle_seed(master.next_u64()), drive(master.split()) {}
};

CsvTable with_echo(const ExperimentConfig& cfg, std::vector<std::string> columns) {
    CsvTable t(std::move(columns));
    t.add_comments(cfg.echo());
    return t;
}

struct Evaluation {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
};

Evaluation evaluate(const net::Network& net, const data::Dataset& train, const data::Dataset& test,
                    net::LossKind loss) {
    Evaluation e;
    const auto eval_one = [&](const data::Dataset& ds, double& l, double& acc) {
        if (ds.size() == 0) {
            l = std::nan("");
            acc = std::nan("");
            return;
        }
        const Matrix out = net::predict(net, ds.inputs);
        l = net::batch_loss(loss, out, ds.targets()).loss;
        acc = metrics::accuracy(out, ds.labels);
    };
    eval_one(train, e.train_loss, e.train_accuracy);
    eval_one(test, e.test_loss, e.test_accuracy);
    return e;
}

// Mini-batch training loop; `on_epoch` fires after epoch 0 (before any
// update) and after every epoch that is a multiple of `every` or the last.
template <class OnEpoch>
void fit(net::Network& net, const data::Dataset& train, const optim::OptimizerConfig& ocfg,
         const ExperimentConfig& cfg, std::uint64_t shuffle_seed, std::size_t every, OnEpoch&& on_epoch) {
    optim::validate(ocfg);
    auto state = net::init_train_state(net, ocfg);
    Rng shuffle(shuffle_seed);
    std::size_t steps = 0;
    on_epoch(std::size_t{0}, steps);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto it = data::batches(train, cfg.batch_size, shuffle, true);
        while (auto b = it.next()) {
            net::train_step(net, b->inputs, net::Targets{b->labels, {}}, state, ocfg, cfg.predisposition, cfg.loss);
            ++steps;
        }
        if (epoch % every == 0 || epoch == cfg.epochs) on_epoch(epoch, steps);
    }
}

net::Network initial_network(const ExperimentConfig& cfg, const data::Dataset& train, Rng& init_rng) {
    if (cfg.model_in.empty()) return build_network(cfg, train.features(), train.n_classes, init_rng);
    net::Network n = net::load_model(cfg.model_in);
    n.validate();
    if (n.input_dim() != train.features()) {
        throw ConfigError("model-in expects " + std::to_string(n.input_dim()) + " inputs, dataset has " +
                          std::to_string(train.features()));
    }
    if (n.output_dim() < train.n_classes) throw ConfigError("model-in has fewer outputs than dataset classes");
    return n;
}

std::vector<std::string> network_columns(std::size_t depth) {
    std::vector<std::string> cols{"run_id",    "epoch",     "step",          "train_loss",
                                  "train_accuracy", "test_loss", "test_accuracy", "max_asymmetry"};
    for (std::size_t l = 0; l < depth; ++l) cols.push_back("angle_" + std::to_string(l));
    for (std::size_t l = 0; l < depth; ++l) cols.push_back("norm_ratio_" + std::to_string(l));
    return cols;
}

CsvTable run_network_training(const ExperimentConfig& cfg) {
    Streams streams(cfg.seed);
    const auto [train, test] = load_datasets(cfg.dataset, streams.data);
    net::Network net = initial_network(cfg, train, streams.init);
    CsvTable table = with_echo(cfg, network_columns(net.depth()));
    fit(net, train, cfg.optimizer, cfg, streams.shuffle_seed, cfg.log_every, [&](std::size_t epoch, std::size_t steps) {
        const auto e = evaluate(net, train, test, cfg.loss);
        Row row{num(std::size_t{0}), num(epoch), num(steps), num(e.train_loss), num(e.train_accuracy),
                num(e.test_loss), num(e.test_accuracy), num(metrics::max_asymmetry(net))};
        const auto report = metrics::alignment(net);
        for (const auto& la : report.layers) row.push_back(num(la.angle_degrees));
        for (const auto& la : report.layers) row.push_back(num(la.norm_ratio));
        table.add_row(std::move(row));
    });
    if (!cfg.model_out.empty()) net::save_model(net, cfg.model_out);
    return table;
}

CsvTable run_compare_function(const ExperimentConfig& cfg) {
    const auto& f = cfg.function;
    const bool rosen = f.name == "rosenbrock";
    std::vector<std::string> cols{"run_id", "optimizer", "step", "loss"};
    for (std::size_t i = 0; i < f.start.size(); ++i) cols.push_back("theta_" + std::to_string(i));
    CsvTable table = with_echo(cfg, cols);
    for (std::size_t run = 0; run < cfg.optimizers.size(); ++run) {
        const auto& ocfg = cfg.optimizers[run];
        std::vector<double> theta = f.start;
        auto state = optim::init_state(ocfg, theta.size());
        const auto emit = [&](std::size_t step) {
            Row row{num(run), std::string(optim::to_string(ocfg.kind)), num(step),
                    num(rosen ? rosenbrock(theta) : quadratic(theta))};
            for (double v : theta) row.push_back(num(v));
            table.add_row(std::move(row));
        };
        emit(0);
        for (std::size_t s = 1; s <= f.steps; ++s) {
            const auto g = rosen ? rosenbrock_grad(theta) : quadratic_grad(theta);
            optim::step(theta, g, state, ocfg);
            if (s % cfg.log_every == 0 || s == f.steps) emit(s);
        }
    }
    return table;
}

CsvTable run_compare_dataset(const ExperimentConfig& cfg) {
    Streams streams(cfg.seed);
    const auto [train, test] = load_datasets(cfg.dataset, streams.data);
    const net::Network net0 = initial_network(cfg, train, streams.init);
    CsvTable table = with_echo(cfg, {"run_id", "optimizer", "epoch", "step", "train_loss", "train_accuracy",
                                     "test_loss", "test_accuracy"});
    for (std::size_t run = 0; run < cfg.optimizers.size(); ++run) {
        const auto& ocfg = cfg.optimizers[run];
        net::Network net = net0;
        fit(net, train, ocfg, cfg, streams.shuffle_seed, 1, [&](std::size_t epoch, std::size_t steps) {
            const auto e = evaluate(net, train, test, cfg.loss);
            table.add_row({num(run), std::string(optim::to_string(ocfg.kind)), num(epoch), num(steps),
                           num(e.train_loss), num(e.train_accuracy), num(e.test_loss), num(e.test_accuracy)});
        });
    }
    return table;
}

std::string drive_name(net::Direction d) { return d == net::Direction::ltp ? "ltp" : "ltd"; }

}  // namespace

double rosenbrock(std::span<const double> x) {
    if (x.size() != 2) throw ShapeError("rosenbrock is two-dimensional");
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

std::vector<double> rosenbrock_grad(std::span<const double> x) {
    if (x.size() != 2) throw ShapeError("rosenbrock is two-dimensional");
    const double b = x[1] - x[0] * x[0];
    return {-2.0 * (1.0 - x[0]) - 400.0 * x[0] * b, 200.0 * b};
}

double quadratic(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s;
}

std::vector<double> quadratic_grad(std::span<const double> x) { return {x.begin(), x.end()}; }

ToyWeights toy_step(ToyWeights w, net::Direction drive, double step_size, double temperature) {
    const double sign = drive == net::Direction::ltp ? 1.0 : -1.0;
    w.a += sign * step_size * net::predisposition(w.a, drive, temperature);
    w.b += sign * step_size * net::predisposition(w.b, drive, temperature);
    return w;
}

std::pair<data::Dataset, data::Dataset> load_datasets(const DatasetSpec& spec, Rng& rng) {
    if (spec.kind == DatasetSpec::Kind::blobs) {
        auto train = data::make_blobs(rng, spec.blobs_per_class, spec.blobs_classes, spec.blobs_dim, spec.blobs_spread);
        data::Dataset test;
        if (spec.blobs_test_per_class > 0) {
            test = data::make_blobs(rng, spec.blobs_test_per_class, spec.blobs_classes, spec.blobs_dim,
                                    spec.blobs_spread);
        } else {
            test = train.slice(0, 0);
        }
        return {std::move(train), std::move(test)};
    }
    auto full = data::load_idx(spec.idx_images, spec.idx_labels);
    if (spec.limit > 0 && spec.limit < full.size()) full = full.slice(0, spec.limit);
    data::Dataset train;
    data::Dataset test;
    if (!spec.idx_test_images.empty() || !spec.idx_test_labels.empty()) {
        if (spec.idx_test_images.empty() || spec.idx_test_labels.empty()) {
            throw ConfigError("idx-test-images and idx-test-labels must be given together");
        }
        train = std::move(full);
        test = data::load_idx(spec.idx_test_images, spec.idx_test_labels);
        if (spec.test_limit > 0 && spec.test_limit < test.size()) test = test.slice(0, spec.test_limit);
        if (test.features() != train.features()) throw ConsistencyError("train and test images differ in size");
    } else {
        const std::size_t held = full.size() / 6;
        train = full.slice(0, full.size() - held);
        test = full.slice(full.size() - held, held);
    }
    const std::size_t classes = std::max(train.n_classes, test.n_classes);
    train.n_classes = classes;
    test.n_classes = classes;
    if (train.size() == 0) throw InputError("training set is empty");
    return {std::move(train), std::move(test)};
}

net::Network build_network(const ExperimentConfig& cfg, std::size_t inputs, std::size_t classes, Rng& rng) {
    std::vector<std::size_t> widths{inputs};
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(classes);
    std::vector<net::Activation> acts(cfg.hidden.size(), cfg.hidden_activation);
    acts.push_back(net::Activation::identity);
    net::InitOptions opts;
    opts.backward_equals_forward = cfg.backward_equals_forward;
    return net::make_network(widths, acts, rng, opts);
}

CsvTable run_trace(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto& t = cfg.trace;
    const auto state0 = dynamics::resting_state(t.m_rest, t.rho_rest, t.tau_m, t.tau_rho);
    const dynamics::RmsPropReference ref0{0.0, 1.0 - t.dt / t.tau_rho, 1.0 / t.rho_rest};
    const auto records = dynamics::simulate(t.program, state0, ref0, t.dt);

    CsvTable table = with_echo(cfg, {"run_id", "t", "g", "x_plus", "x_minus", "m_plus", "m_minus", "m", "rho",
                                     "rmsprop_term", "clamped"});
    const auto emit = [&](const dynamics::TraceRecord& r) {
        table.add_row({num(std::size_t{0}), num(r.t), num(r.g), num(r.x_plus), num(r.x_minus), num(r.m_plus),
                       num(r.m_minus), num(r.m), num(r.rho), num(r.rmsprop_term),
                       num(static_cast<std::size_t>(r.clamped))});
    };
    const double g0 = t.program.segments.front().g;
    const auto [xp, xm] = dynamics::split_gradient(g0);
    emit({0.0, g0, xp, xm, state0.m_plus, state0.m_minus, dynamics::effective_momentum(state0), state0.rho,
          1.0 / ref0.epsilon, false});
    for (std::size_t i = 0; i < records.size(); ++i) {
        if ((i + 1) % cfg.log_every == 0 || i + 1 == records.size()) emit(records[i]);
    }
    return table;
}

CsvTable run_compare(const ExperimentConfig& cfg) {
    validate(cfg);
    return cfg.function.name.empty() ? run_compare_dataset(cfg) : run_compare_function(cfg);
}

CsvTable run_train(const ExperimentConfig& cfg) {
    validate(cfg);
    return run_network_training(cfg);
}

CsvTable run_symmetry(const ExperimentConfig& cfg) {
    validate(cfg);
    return run_network_training(cfg);
}

CsvTable run_toy_symmetry(const ExperimentConfig& cfg) {
    validate(cfg);
    Streams streams(cfg.seed);
    const auto& toy = cfg.toy;
    const double temp = cfg.predisposition.temperature;
    CsvTable table = with_echo(cfg, {"run_id", "step", "drive", "w_a", "w_b", "gap"});
    ToyWeights w{toy.init_a, toy.init_b};
    table.add_row({num(std::size_t{0}), num(std::size_t{0}), std::string("none"), num(w.a), num(w.b),
                   num(std::abs(w.a - w.b))});
    for (std::size_t s = 1; s <= toy.steps; ++s) {
        net::Direction d = net::Direction::ltp;
        if (toy.drive == "ltd") d = net::Direction::ltd;
        else if (toy.drive == "alternating") d = s % 2 == 1 ? net::Direction::ltp : net::Direction::ltd;
        else if (toy.drive == "random") d = streams.drive.uniform() < 0.5 ? net::Direction::ltp : net::Direction::ltd;
        w = toy_step(w, d, toy.step_size, temp);
        table.add_row({num(std::size_t{0}), num(s), drive_name(d), num(w.a), num(w.b), num(std::abs(w.a - w.b))});
    }
    return table;
}

CsvTable run_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    struct GridPoint {
        optim::OptimizerConfig ocfg;
        double tau_m;
        double tau_rho;
    };
    std::vector<GridPoint> grid;
    for (double gamma : cfg.sweep.gammas) {
        for (const auto& [tm, tr] : cfg.sweep.taus) {
            for (auto kind : cfg.sweep.optimizers) {
                optim::OptimizerConfig o = kind == optim::Kind::bioadam
                                               ? optim::bioadam_config(gamma, tm, tr, cfg.sweep.rho_rest)
                                               : optim::adam_config(gamma, 1.0 - 1.0 / tm, 1.0 - 1.0 / tr,
                                                                    1.0 / cfg.sweep.rho_rest);
                optim::validate(o);
                grid.push_back({o, tm, tr});
            }
        }
    }

    Streams streams(cfg.seed);
    const auto [train, test] = load_datasets(cfg.dataset, streams.data);
    const net::Network net0 = initial_network(cfg, train, streams.init);

    struct Outcome {
        double initial_loss = 0.0;
        double train_loss = 0.0;
        double test_accuracy = 0.0;
    };
    std::vector<Outcome> outcomes(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                net::Network net = net0;
                fit(net, train, grid[i].ocfg, cfg, streams.shuffle_seed, cfg.epochs == 0 ? 1 : cfg.epochs,
                    [&](std::size_t epoch, std::size_t) {
                        const auto e = evaluate(net, train, test, cfg.loss);
                        if (epoch == 0) outcomes[i].initial_loss = e.train_loss;
                        outcomes[i].train_loss = e.train_loss;
                        outcomes[i].test_accuracy = e.test_accuracy;
                    });
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t threads = cfg.sweep.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, grid.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    CsvTable table = with_echo(cfg, {"run_id", "optimizer", "gamma", "tau_m", "tau_rho", "beta1", "beta2",
                                     "epsilon", "initial_loss", "train_loss", "test_accuracy"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid[i];
        table.add_row({num(i), std::string(optim::to_string(c.ocfg.kind)), num(c.ocfg.gamma), num(c.tau_m),
                       num(c.tau_rho), num(1.0 - 1.0 / c.tau_m), num(1.0 - 1.0 / c.tau_rho),
                       num(1.0 / cfg.sweep.rho_rest), num(outcomes[i].initial_loss), num(outcomes[i].train_loss),
                       num(outcomes[i].test_accuracy)});
    }
    return table;
}

CsvTable run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::trace: return run_trace(cfg);
        case Experiment::compare: return run_compare(cfg);
        case Experiment::train: return run_train(cfg);
        case Experiment::symmetry: return run_symmetry(cfg);
        case Experiment::toy_symmetry: return run_toy_symmetry(cfg);
        case Experiment::sweep: return run_sweep(cfg);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace bioadam::harness
