#include "bioadam/net.hpp"

#include <algorithm>
#include <cmath>

#include "bioadam/error.hpp"

namespace bioadam::net {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::tanh: return std::tanh(x);
        case Activation::identity: return x;
    }
    return x;
}

double activate_derivative(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

std::size_t Network::input_dim() const { return layers.empty() ? 0 : layers.front().in(); }
std::size_t Network::output_dim() const { return layers.empty() ? 0 : layers.back().out(); }

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.W.size() + l.bias.size();
    return n;
}

void Network::validate() const {
    if (layers.empty()) throw ShapeError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        require_same_shape(l.W, l.B, "layer W/B");
        if (l.bias.size() != l.out()) {
            throw ShapeError("layer " + std::to_string(i) + " bias length " +
                             std::to_string(l.bias.size()) + " != out " + std::to_string(l.out()));
        }
        if (i > 0 && layers[i - 1].out() != l.in()) {
            throw ShapeError("layer " + std::to_string(i) + " expects " + std::to_string(l.in()) +
                             " inputs but previous layer emits " + std::to_string(layers[i - 1].out()));
        }
    }
}

Network make_network(std::span<const std::size_t> widths, std::span<const Activation> activations,
                     Rng& rng, const InitOptions& options) {
    if (widths.size() < 2) throw ConfigError("network needs at least an input and an output width");
    if (activations.size() != widths.size() - 1) {
        throw ConfigError("need one activation per layer");
    }
    Network net;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const std::size_t in = widths[i];
        const std::size_t out = widths[i + 1];
        if (in == 0 || out == 0) throw ConfigError("layer widths must be positive");
        const InitScheme scheme =
            options.scheme.value_or(Gaussian{0.0, 1.0 / std::sqrt(static_cast<double>(in))});
        LayerPair layer;
        layer.W = random_init(rng, out, in, scheme);
        layer.B = options.backward_equals_forward ? layer.W : random_init(rng, out, in, scheme);
        layer.bias.assign(out, 0.0);
        layer.activation = activations[i];
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Matrix forward(const Network& net, const Matrix& inputs, ForwardCache& cache) {
    net.validate();
    if (inputs.cols() != net.input_dim()) {
        throw ShapeError("forward: input has " + std::to_string(inputs.cols()) +
                         " features, network expects " + std::to_string(net.input_dim()));
    }
    cache.input = inputs;
    cache.layers.resize(net.depth());
    const Matrix* prev = &cache.input;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const auto& layer = net.layers[l];
        auto& lc = cache.layers[l];
        lc.x = matmul_bt(*prev, layer.W);
        for (std::size_t r = 0; r < lc.x.rows(); ++r) {
            auto row = lc.x.row_span(r);
            for (std::size_t j = 0; j < row.size(); ++j) row[j] += layer.bias[j];
        }
        lc.y = map(lc.x, [a = layer.activation](double v) { return activate(a, v); });
        prev = &lc.y;
    }
    cache.owner = &net;
    cache.version = net.version;
    return cache.layers.back().y;
}

std::vector<double> forward(const Network& net, std::span<const double> input, ForwardCache& cache) {
    const Matrix out = forward(net, Matrix::row(input), cache);
    return {out.data().begin(), out.data().end()};
}

Matrix predict(const Network& net, const Matrix& inputs) {
    ForwardCache cache;
    return forward(net, inputs, cache);
}

BackwardResult backward(const Network& net, const ForwardCache& cache, const Matrix& loss_grad) {
    if (cache.owner != &net || cache.version != net.version || cache.layers.size() != net.depth()) {
        throw StateError("backward: cache does not belong to the current network state");
    }
    const std::size_t batch = cache.input.rows();
    if (loss_grad.rows() != batch || loss_grad.cols() != net.output_dim()) {
        throw ShapeError("backward: loss gradient is " + loss_grad.dims() + ", expected " +
                         std::to_string(batch) + "x" + std::to_string(net.output_dim()));
    }
    const std::size_t depth = net.depth();
    BackwardResult res;
    res.signals.e.resize(depth);
    res.signals.delta.resize(depth);
    res.grads.weight.resize(depth);
    res.grads.bias.resize(depth);

    Matrix e = loss_grad;
    for (std::size_t l = depth; l-- > 0;) {
        const auto& layer = net.layers[l];
        const auto& lc = cache.layers[l];
        Matrix delta = elementwise(e, lc.x, [a = layer.activation](double err, double x) {
            return err * activate_derivative(a, x);
        });
        const Matrix& y_prev = l == 0 ? cache.input : cache.layers[l - 1].y;
        res.grads.weight[l] = matmul_at(delta, y_prev);
        auto& gb = res.grads.bias[l];
        gb.assign(layer.out(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto row = delta.row_span(r);
            for (std::size_t j = 0; j < row.size(); ++j) gb[j] += row[j];
        }
        Matrix e_prev = l > 0 ? matmul(delta, layer.B) : Matrix{};
        res.signals.e[l] = std::move(e);
        res.signals.delta[l] = std::move(delta);
        e = std::move(e_prev);
    }
    return res;
}

std::string_view to_string(LossKind k) { return k == LossKind::mse ? "mse" : "softmax_xent"; }

LossKind parse_loss(std::string_view name) {
    if (name == "mse") return LossKind::mse;
    if (name == "softmax_xent" || name == "xent") return LossKind::softmax_xent;
    throw ConfigError("unknown loss '" + std::string(name) + "'");
}

LossResult mse_loss(std::span<const double> output, std::span<const double> target) {
    if (output.size() != target.size()) throw ShapeError("mse: output and target lengths differ");
    LossResult r;
    r.grad.resize(output.size());
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = output[i] - target[i];
        r.loss += 0.5 * d * d;
        r.grad[i] = d;
    }
    return r;
}

LossResult softmax_xent_loss(std::span<const double> logits, std::size_t label) {
    if (label >= logits.size()) {
        throw InputError("class index " + std::to_string(label) + " out of range for " +
                         std::to_string(logits.size()) + " outputs");
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - peak);
    LossResult r;
    r.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) r.grad[i] = std::exp(logits[i] - peak) / z;
    r.loss = std::log(z) - (logits[label] - peak);
    r.grad[label] -= 1.0;
    return r;
}

BatchLoss batch_loss(LossKind kind, const Matrix& outputs, const Targets& targets) {
    const std::size_t n = outputs.rows();
    if (n == 0) throw ShapeError("batch_loss: empty batch");
    const bool use_values = kind == LossKind::mse && !targets.values.empty();
    if (use_values) {
        require_same_shape(outputs, targets.values, "batch_loss");
    } else if (targets.labels.size() != n) {
        throw ShapeError("batch_loss: " + std::to_string(targets.labels.size()) + " labels for " +
                         std::to_string(n) + " outputs");
    }
    BatchLoss out;
    out.grad = Matrix(n, outputs.cols());
    std::vector<double> onehot(outputs.cols());
    for (std::size_t r = 0; r < n; ++r) {
        LossResult lr;
        if (kind == LossKind::softmax_xent) {
            lr = softmax_xent_loss(outputs.row_span(r), targets.labels[r]);
        } else if (use_values) {
            lr = mse_loss(outputs.row_span(r), targets.values.row_span(r));
        } else {
            if (targets.labels[r] >= onehot.size()) throw InputError("class index out of range");
            std::fill(onehot.begin(), onehot.end(), 0.0);
            onehot[targets.labels[r]] = 1.0;
            lr = mse_loss(outputs.row_span(r), onehot);
        }
        out.loss += lr.loss;
        auto dst = out.grad.row_span(r);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = lr.grad[j] / static_cast<double>(n);
    }
    out.loss /= static_cast<double>(n);
    return out;
}

double evaluate_loss(const Network& net, const Matrix& inputs, const Targets& targets, LossKind kind) {
    return batch_loss(kind, predict(net, inputs), targets).loss;
}

double predisposition(double w, Direction direction, double temperature) {
    if (!(temperature > 0.0)) throw ConfigError("predisposition temperature must be positive");
    const double z = direction == Direction::ltp ? w / temperature : -w / temperature;
    return 2.0 / (1.0 + std::exp(z));
}

namespace {

void require_flat(std::span<const double> buf, const Matrix& like, const char* what) {
    if (buf.size() != like.size()) {
        throw ShapeError(std::string(what) + ": buffer of length " + std::to_string(buf.size()) +
                         " does not match " + like.dims());
    }
}

// Adds factor(w, direction of delta) * delta to w.
void add_modulated(double& w, double delta, const PredispositionConfig& pcfg) {
    if (delta == 0.0) return;
    if (!pcfg.enabled) {
        w += delta;
        return;
    }
    const Direction dir = delta > 0.0 ? Direction::ltp : Direction::ltd;
    w += predisposition(w, dir, pcfg.temperature) * delta;
}

}  // namespace

void apply_update(LayerPair& layer, std::span<const double> m, std::span<const double> rho,
                  double gamma, const PredispositionConfig& pcfg) {
    require_flat(m, layer.W, "apply_update m");
    require_flat(rho, layer.W, "apply_update rho");
    require_same_shape(layer.W, layer.B, "apply_update W/B");
    if (pcfg.enabled && !(pcfg.temperature > 0.0)) {
        throw ConfigError("predisposition temperature must be positive");
    }
    auto w = layer.W.data();
    auto b = layer.B.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double step = gamma * m[i] * rho[i];
        if (step == 0.0) continue;
        if (!pcfg.enabled) {
            w[i] -= step;
            b[i] -= step;
            continue;
        }
        // -m > 0 is potentiation.
        const Direction dir = m[i] < 0.0 ? Direction::ltp : Direction::ltd;
        w[i] -= predisposition(w[i], dir, pcfg.temperature) * step;
        b[i] -= predisposition(b[i], dir, pcfg.temperature) * step;
    }
}

TrainState init_train_state(const Network& net, const optim::OptimizerConfig& cfg) {
    TrainState s;
    for (const auto& l : net.layers) {
        s.layers.push_back({optim::init_state(cfg, l.W.size()), optim::init_state(cfg, l.bias.size())});
    }
    return s;
}

double train_step(Network& net, const Matrix& inputs, const Targets& targets, TrainState& state,
                  const optim::OptimizerConfig& cfg, const PredispositionConfig& pcfg, LossKind loss) {
    if (state.layers.size() != net.depth()) throw StateError("train state depth does not match network");
    ForwardCache cache;
    const Matrix outputs = forward(net, inputs, cache);
    const BatchLoss bl = batch_loss(loss, outputs, targets);
    const BackwardResult br = backward(net, cache, bl.grad);

    for (std::size_t l = 0; l < net.depth(); ++l) {
        auto& layer = net.layers[l];
        auto& ls = state.layers[l];
        const auto& grad = br.grads.weight[l];
        if (cfg.kind == optim::Kind::bioadam) {
            optim::bioadam_update_substances(grad.data(), ls.weight, cfg);
            apply_update(layer, ls.weight.m, ls.weight.v_or_rho, cfg.gamma, pcfg);
        } else {
            Matrix stepped = layer.W;
            optim::step(stepped.data(), grad.data(), ls.weight, cfg);
            auto w = layer.W.data();
            auto b = layer.B.data();
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double delta = stepped.data()[i] - w[i];
                add_modulated(w[i], delta, pcfg);
                add_modulated(b[i], delta, pcfg);
            }
        }
        optim::step(layer.bias, br.grads.bias[l], ls.bias, cfg);
    }
    ++net.version;
    return bl.loss;
}

}  // namespace bioadam::net
