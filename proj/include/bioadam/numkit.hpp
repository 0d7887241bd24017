#pragma once

// Dense row-major matrices of doubles and a seeded, platform-independent
// PRNG. Small on purpose: every other module builds on these few pieces.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bioadam {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    // Takes ownership of row-major `data`; throws ShapeError if the length is wrong.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    static Matrix column(std::span<const double> values);
    static Matrix row(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    // "RxC", used in error messages.
    std::string dims() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T without materializing the transpose.
Matrix matmul_bt(const Matrix& a, const Matrix& b);
// a^T * b without materializing the transpose.
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double frobenius_dot(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

using BinaryOp = std::function<double(double, double)>;
using UnaryOp = std::function<double(double)>;

Matrix elementwise(const Matrix& a, const Matrix& b, const BinaryOp& f);
Matrix elementwise(const Matrix& a, double b, const BinaryOp& f);
Matrix map(const Matrix& a, const UnaryOp& f);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix abs(const Matrix& a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

// xoshiro256** seeded through splitmix64. Only integer arithmetic and IEEE
// sqrt/log are involved, so a given seed yields the same stream everywhere
// the C library's log is correctly rounded.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    double gaussian(double mean, double stddev);
    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n);
    // Independent child stream; advances this generator by one draw.
    Rng split();

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct Uniform {
    double lo = -1.0;
    double hi = 1.0;
};

struct Gaussian {
    double mean = 0.0;
    double stddev = 1.0;
};

using InitScheme = std::variant<Uniform, Gaussian>;

// Entries drawn i.i.d. in row-major order. Throws ConfigError for lo > hi or
// a negative standard deviation.
Matrix random_init(Rng& rng, std::size_t rows, std::size_t cols, const InitScheme& scheme);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(Rng& rng, std::size_t n);

}  // namespace bioadam
