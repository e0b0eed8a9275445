#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace savings {

// Dense row-major matrix. Everything in this library is small (a handful of
// exogenous states), so no sparse storage or BLAS is warranted.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    std::vector<double> apply(const std::vector<double>& v) const;
    Matrix multiply(const Matrix& other) const;
    double row_sum(std::size_t i) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Kronecker product; composite chains are enumerated so that the pair (i, j)
// maps to flat index i*M + j, matching kron(bar_P, tilde_P).
Matrix kron(const Matrix& a, const Matrix& b);

// Perron root of a nonnegative square matrix. Power iteration on A + delta*I
// (delta = 1e-12, tol 1e-10, at most 100000 sweeps); when the shifted
// iteration stalls (periodic positivity pattern), falls back to a normalized
// repeated-squaring estimate of lim ||A^n||^(1/n).
double spectral_radius(const Matrix& a);

// True iff the positivity digraph of A is strongly connected. A 1x1 matrix is
// irreducible iff its entry is positive.
bool is_irreducible(const Matrix& a);

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace savings
