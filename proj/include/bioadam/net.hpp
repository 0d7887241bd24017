#pragma once

// Fully connected network whose error signal travels through a separate
// backward matrix B instead of W^T. W and B share one m/rho pair per
// synapse ("gradient transport"), so a symmetric pair stays symmetric; the
// predisposition factors p(w, +/-) pull an asymmetric pair together.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bioadam/numkit.hpp"
#include "bioadam/optim.hpp"

namespace bioadam::net {

enum class Activation { relu, sigmoid, tanh, identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);
double activate(Activation a, double x);
// Derivative with respect to the pre-activation x. relu'(0) is taken as 0.
double activate_derivative(Activation a, double x);

struct LayerPair {
    Matrix W;  // out x in
    Matrix B;  // out x in, applied transposed in the backward pass
    std::vector<double> bias;
    Activation activation = Activation::identity;

    std::size_t in() const { return W.cols(); }
    std::size_t out() const { return W.rows(); }
};

struct Network {
    std::vector<LayerPair> layers;
    // Bumped by every parameter update, so caches from an older forward pass
    // are rejected by backward().
    std::uint64_t version = 0;

    std::size_t depth() const { return layers.size(); }
    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t parameter_count() const;
    // Throws ShapeError if adjacent layers do not chain or W/B/bias disagree.
    void validate() const;
};

struct InitOptions {
    // Defaults to gaussian(0, 1/sqrt(fan_in)) per layer.
    std::optional<InitScheme> scheme;
    // Start with B == W instead of an independent draw.
    bool backward_equals_forward = false;
};

// widths has depth+1 entries (input first); activations has depth entries.
Network make_network(std::span<const std::size_t> widths, std::span<const Activation> activations,
                     Rng& rng, const InitOptions& options = {});

struct LayerCache {
    Matrix x;  // pre-activation, batch x out
    Matrix y;  // sigma(x)
};

struct ForwardCache {
    Matrix input;  // batch x in
    std::vector<LayerCache> layers;
    const Network* owner = nullptr;
    std::uint64_t version = 0;
};

// inputs is batch x input_dim; returns batch x output_dim.
Matrix forward(const Network& net, const Matrix& inputs, ForwardCache& cache);
std::vector<double> forward(const Network& net, std::span<const double> input, ForwardCache& cache);
Matrix predict(const Network& net, const Matrix& inputs);

struct BackwardSignals {
    std::vector<Matrix> e;      // dL/dy estimate per layer, batch x out
    std::vector<Matrix> delta;  // e * sigma'(x)
};

struct Gradients {
    std::vector<Matrix> weight;              // out x in
    std::vector<std::vector<double>> bias;   // out
};

struct BackwardResult {
    BackwardSignals signals;
    Gradients grads;
};

// loss_grad is batch x output_dim holding dL/dy of the top layer. Gradients
// are summed over the batch rows, so a loss_grad already divided by the
// batch size yields batch-averaged gradients.
BackwardResult backward(const Network& net, const ForwardCache& cache, const Matrix& loss_grad);

enum class LossKind { mse, softmax_xent };

std::string_view to_string(LossKind k);
LossKind parse_loss(std::string_view name);

struct LossResult {
    double loss = 0.0;
    std::vector<double> grad;
};

// 0.5 * sum (y - t)^2, gradient y - t.
LossResult mse_loss(std::span<const double> output, std::span<const double> target);
// Cross entropy of softmax(logits) against a class index.
LossResult softmax_xent_loss(std::span<const double> logits, std::size_t label);

struct Targets {
    std::vector<std::size_t> labels;
    // Regression targets for mse; when empty, mse uses one-hot labels.
    Matrix values;
};

struct BatchLoss {
    double loss = 0.0;  // mean over the batch
    Matrix grad;        // per-row gradient divided by the batch size
};

BatchLoss batch_loss(LossKind kind, const Matrix& outputs, const Targets& targets);
double evaluate_loss(const Network& net, const Matrix& inputs, const Targets& targets, LossKind kind);

enum class Direction { ltp, ltd };

struct PredispositionConfig {
    bool enabled = false;
    double temperature = 10.0;
};

// LTP: 2 / (1 + exp(w/T)), LTD: 2 / (1 + exp(-w/T)). Throws ConfigError for T <= 0.
double predisposition(double w, Direction direction, double temperature);

// W -= p(W, sign(-m)) * gamma * m * rho and likewise for B with its own
// factor, element by element. m and rho are flat row-major views with
// W's shape. With predisposition disabled both receive the same delta.
void apply_update(LayerPair& layer, std::span<const double> m, std::span<const double> rho,
                  double gamma, const PredispositionConfig& pcfg);

struct LayerOptState {
    optim::OptimizerState weight;
    optim::OptimizerState bias;
};

struct TrainState {
    std::vector<LayerOptState> layers;
};

TrainState init_train_state(const Network& net, const optim::OptimizerConfig& cfg);

// One optimization step on a batch: forward, loss, backward through B, then
// the weight update. For bioadam the layer's m/rho are updated from the
// forward-weight gradient and shared by W and B via apply_update; other
// optimizers compute W's delta and apply it to B too (scaled by the
// predisposition factors when enabled). Biases never see predisposition.
// Returns the mean batch loss measured before the update.
double train_step(Network& net, const Matrix& inputs, const Targets& targets, TrainState& state,
                  const optim::OptimizerConfig& cfg, const PredispositionConfig& pcfg, LossKind loss);

// Binary snapshot, little-endian throughout:
//   "BADM" | u32 format version (1) | u32 depth
//   depth x { u32 in | u32 out | u32 activation (0 relu, 1 sigmoid, 2 tanh, 3 identity) }
//   depth x { f64[out*in] W | f64[out*in] B | f64[out] bias }   (row-major)
void save_model(const Network& net, std::ostream& os);
Network load_model(std::istream& is);
void save_model(const Network& net, const std::string& path);
Network load_model(const std::string& path);

}  // namespace bioadam::net
