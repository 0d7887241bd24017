#include "bioadam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bioadam/error.hpp"

namespace bioadam::metrics {

double alignment_angle(const Matrix& B, const Matrix& W) {
    require_same_shape(B, W, "alignment_angle");
    const double nb = frobenius_norm(B);
    const double nw = frobenius_norm(W);
    if (nb == 0.0 || nw == 0.0) throw DegenerateInputError("alignment angle undefined for a zero matrix");
    // 2 atan2(|u - v|, |u + v|) on the unit-norm matrices; unlike acos of the
    // cosine it stays accurate near 0 and 180 degrees.
    double diff = 0.0;
    double sum = 0.0;
    const auto b = B.data();
    const auto w = W.data();
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double u = b[i] / nb;
        const double v = w[i] / nw;
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    return 180.0 / std::numbers::pi * 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

double norm_ratio(const Matrix& B, const Matrix& W) {
    require_same_shape(B, W, "norm_ratio");
    const double nw = frobenius_norm(W);
    if (nw == 0.0) throw DegenerateInputError("norm ratio undefined for a zero forward matrix");
    return frobenius_norm(B) / nw;
}

AlignmentReport alignment(const net::Network& net) {
    AlignmentReport report;
    for (const auto& l : net.layers) {
        LayerAlignment la;
        try {
            la.angle_degrees = alignment_angle(l.B, l.W);
            la.norm_ratio = norm_ratio(l.B, l.W);
        } catch (const DegenerateInputError&) {
            la.degenerate = true;
            la.angle_degrees = std::numeric_limits<double>::quiet_NaN();
            la.norm_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        report.layers.push_back(la);
    }
    return report;
}

double max_asymmetry(const net::Network& net) {
    double worst = 0.0;
    for (const auto& l : net.layers) worst = std::max(worst, max_abs_diff(l.B, l.W));
    return worst;
}

namespace {

// Sign pattern of every relu pre-activation, used to detect kinks.
std::vector<bool> relu_mask(const net::Network& net, const Matrix& inputs) {
    net::ForwardCache cache;
    net::forward(net, inputs, cache);
    std::vector<bool> mask;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        if (net.layers[l].activation != net::Activation::relu) continue;
        for (double x : cache.layers[l].x.data()) mask.push_back(x > 0.0);
    }
    return mask;
}

}  // namespace

GradCheckResult finite_diff_check(const net::Network& net_in, const Matrix& inputs,
                                  const net::Targets& targets, net::LossKind loss,
                                  const GradCheckOptions& options) {
    if (!(options.h > 0.0)) throw ConfigError("finite difference step must be positive");
    net::Network net = net_in;
    for (auto& l : net.layers) l.B = l.W;
    const bool has_relu = std::any_of(net.layers.begin(), net.layers.end(), [](const auto& l) {
        return l.activation == net::Activation::relu;
    });

    net::ForwardCache cache;
    const Matrix out = net::forward(net, inputs, cache);
    const auto bl = net::batch_loss(loss, out, targets);
    const auto analytic = net::backward(net, cache, bl.grad).grads;
    const std::vector<bool> base_mask = has_relu ? relu_mask(net, inputs) : std::vector<bool>{};

    // Coordinate = (layer, is_bias, flat index).
    struct Coord {
        std::size_t layer;
        bool bias;
        std::size_t index;
    };
    std::vector<Coord> coords;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].W.size(); ++i) coords.push_back({l, false, i});
        for (std::size_t i = 0; i < net.layers[l].bias.size(); ++i) coords.push_back({l, true, i});
    }
    if (options.max_coordinates != 0 && coords.size() > options.max_coordinates) {
        Rng rng(options.seed);
        const auto perm = permutation(rng, coords.size());
        std::vector<Coord> picked;
        for (std::size_t i = 0; i < options.max_coordinates; ++i) picked.push_back(coords[perm[i]]);
        coords = std::move(picked);
    }

    GradCheckResult res;
    for (const auto& c : coords) {
        auto& layer = net.layers[c.layer];
        double& param = c.bias ? layer.bias[c.index] : layer.W.data()[c.index];
        const double a = c.bias ? analytic.bias[c.layer][c.index] : analytic.weight[c.layer].data()[c.index];
        // B follows W so the perturbed network stays symmetric.
        double* partner = c.bias ? nullptr : &layer.B.data()[c.index];
        const double saved = param;

        const auto eval = [&](double value, bool& kink) {
            param = value;
            if (partner) *partner = value;
            if (has_relu && relu_mask(net, inputs) != base_mask) kink = true;
            return net::evaluate_loss(net, inputs, targets, loss);
        };
        bool kink = false;
        const double lp = eval(saved + options.h, kink);
        const double lm = eval(saved - options.h, kink);
        param = saved;
        if (partner) *partner = saved;
        if (kink) {
            ++res.skipped;
            continue;
        }
        const double numeric = (lp - lm) / (2.0 * options.h);
        const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
        res.max_relative_error = std::max(res.max_relative_error, std::abs(a - numeric) / denom);
        ++res.checked;
    }
    return res;
}

double accuracy(const Matrix& outputs, const std::vector<std::size_t>& labels) {
    if (outputs.rows() != labels.size()) {
        throw ShapeError("accuracy: " + std::to_string(outputs.rows()) + " outputs for " +
                         std::to_string(labels.size()) + " labels");
    }
    if (labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < outputs.rows(); ++r) {
        const auto row = outputs.row_span(r);
        const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        if (best == labels[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace bioadam::metrics
