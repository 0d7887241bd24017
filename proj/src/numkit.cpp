#include "bioadam/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bioadam/error.hpp"

namespace bioadam {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + dims());
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("ragged initializer for matrix");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::span<const double> values) {
    return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::row(std::span<const double> values) {
    return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

std::string Matrix::dims() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": shape mismatch " + a.dims() + " vs " + b.dims());
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + a.dims() + " x " + b.dims());
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row_span(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto src = b.row_span(k);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_bt: inner dimensions differ, " + a.dims() + " x " + b.dims() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ai = a.row_span(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto bj = b.row_span(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < ai.size(); ++k) acc += ai[k] * bj[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_at: inner dimensions differ, " + a.dims() + "^T x " + b.dims());
    }
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row_span(k);
        auto bk = b.row_span(k);
        for (std::size_t i = 0; i < ak.size(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            auto dst = out.row_span(i);
            for (std::size_t j = 0; j < bk.size(); ++j) dst[j] += aki * bk[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_dot");
    auto x = a.data();
    auto y = b.data();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double frobenius_norm(const Matrix& a) { return std::sqrt(frobenius_dot(a, a)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

Matrix elementwise(const Matrix& a, const Matrix& b, const BinaryOp& f) {
    require_same_shape(a, b, "elementwise");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i], b.data()[i]);
    return out;
}

Matrix elementwise(const Matrix& a, double b, const BinaryOp& f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i], b);
    return out;
}

Matrix map(const Matrix& a, const UnaryOp& f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = f(a.data()[i]);
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::plus<>{}); }
Matrix operator-(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::minus<>{}); }
Matrix operator*(double s, const Matrix& a) { return elementwise(a, s, std::multiplies<>{}); }
Matrix abs(const Matrix& a) {
    return map(a, [](double x) { return std::abs(x); });
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) word = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian(double mean, double stddev) {
    // Marsaglia polar method; caches the second variate.
    if (have_spare_) {
        have_spare_ = false;
        return mean + stddev * spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    have_spare_ = true;
    return mean + stddev * u * factor;
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t limit = -n % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= limit) return r % n;
    }
}

Rng Rng::split() { return Rng(next_u64()); }

Matrix random_init(Rng& rng, std::size_t rows, std::size_t cols, const InitScheme& scheme) {
    Matrix out(rows, cols);
    if (const auto* u = std::get_if<Uniform>(&scheme)) {
        if (!(u->lo <= u->hi)) throw ConfigError("uniform init requires lo <= hi");
        for (auto& x : out.data()) x = rng.uniform(u->lo, u->hi);
    } else {
        const auto& g = std::get<Gaussian>(scheme);
        if (!(g.stddev >= 0.0) || !std::isfinite(g.mean)) {
            throw ConfigError("gaussian init requires a finite mean and stddev >= 0");
        }
        for (auto& x : out.data()) x = rng.gaussian(g.mean, g.stddev);
    }
    return out;
}

std::vector<std::size_t> permutation(Rng& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(idx[i - 1], idx[rng.below(i)]);
    }
    return idx;
}

}  // namespace bioadam
