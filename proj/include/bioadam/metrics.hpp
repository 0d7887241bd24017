#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bioadam/net.hpp"
#include "bioadam/numkit.hpp"

namespace bioadam::metrics {

// Angle in degrees between the flattened matrices, i.e.
// (180/pi) acos(<B,W> / (|B| |W|)), evaluated in a form that cannot leave
// the domain of acos. Throws DegenerateInputError if either is all zero.
double alignment_angle(const Matrix& B, const Matrix& W);

// |B|_F / |W|_F. Throws DegenerateInputError if W is all zero.
double norm_ratio(const Matrix& B, const Matrix& W);

struct LayerAlignment {
    double angle_degrees = 0.0;
    double norm_ratio = 0.0;
    // Set instead of throwing when B or W is all zero; the numbers are then NaN.
    bool degenerate = false;
};

struct AlignmentReport {
    std::vector<LayerAlignment> layers;
};

AlignmentReport alignment(const net::Network& net);

// Largest |B - W| over every layer.
double max_asymmetry(const net::Network& net);

struct GradCheckOptions {
    double h = 1e-5;
    // At most this many coordinates are probed; 0 means all of them.
    std::size_t max_coordinates = 0;
    std::uint64_t seed = 0;
    // Relative error uses max(|analytic|, |numeric|, floor) as denominator.
    double floor = 1e-6;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    // Coordinates whose +/-h probes flip some relu unit across its kink.
    std::size_t skipped = 0;
};

// Central-difference check of backward() on a copy of `net` with B forced
// equal to W. Covers weights and biases of every layer.
GradCheckResult finite_diff_check(const net::Network& net, const Matrix& inputs,
                                  const net::Targets& targets, net::LossKind loss,
                                  const GradCheckOptions& options = {});

// Row-wise argmax (lowest index on ties) compared with labels.
double accuracy(const Matrix& outputs, const std::vector<std::size_t>& labels);

}  // namespace bioadam::metrics
