#include "savings/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace savings {

std::vector<double> Matrix::apply(const std::vector<double>& v) const {
    if (v.size() != cols_) throw NumericError("matrix-vector size mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        const double* row = data_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

Matrix Matrix::multiply(const Matrix& other) const {
    if (cols_ != other.rows_) throw NumericError("matrix-matrix size mismatch");
    Matrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j)
                out(i, j) += aik * other(k, j);
        }
    return out;
}

double Matrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j);
    return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

namespace {

void require_nonnegative_square(const Matrix& a) {
    if (!a.square()) throw NumericError("spectral routines require a square matrix");
    for (double x : a.data()) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw NumericError("spectral routines require finite nonnegative entries");
    }
}

// Gelfand estimate r = lim ||A^n||_inf^(1/n) via repeated squaring with
// per-step normalization. Handles periodic matrices the shifted power
// iteration cannot settle on.
double gelfand_radius(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix p = a;
    double log_scale = 0.0;   // log of the accumulated normalization, per A^(2^k)
    double power = 1.0;       // current exponent 2^k
    for (int step = 0; step < 64; ++step) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, p.row_sum(i));
        if (norm == 0.0) return 0.0; // nilpotent
        for (double& x : p.data()) x /= norm;
        log_scale += std::log(norm) / power;
        p = p.multiply(p);
        power *= 2.0;
    }
    return std::exp(log_scale);
}

} // namespace

double spectral_radius(const Matrix& a) {
    require_nonnegative_square(a);
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    if (n == 1) return a(0, 0);

    const double shift = 1e-12;
    const double tol = 1e-10;
    const int max_iter = 100000;

    std::vector<double> v(n, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> w = a.apply(v);
        for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
        double norm = *std::max_element(w.begin(), w.end());
        if (norm <= 0.0) return 0.0; // reached the zero vector: only eigenvalue left is 0
        double next = norm; // v is normalized to max 1, so ||w||_inf estimates the root
        for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
        v = std::move(w);
        if (it > 0 && std::fabs(next - lambda) <= tol * std::max(1.0, next)) {
            return std::max(0.0, next - shift);
        }
        lambda = next;
    }
    // Shifted iteration stalled (oscillating estimates on a periodic pattern).
    return gelfand_radius(a);
}

bool is_irreducible(const Matrix& a) {
    require_nonnegative_square(a);
    const std::size_t n = a.rows();
    if (n == 0) return false;
    if (n == 1) return a(0, 0) > 0.0;

    // Strongly connected iff node 0 reaches everything in A and in A^T.
    auto reaches_all = [n](auto edge) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t w = 0; w < n; ++w) {
                if (!seen[w] && edge(u, w)) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n;
    };
    bool fwd = reaches_all([&a](std::size_t u, std::size_t w) { return a(u, w) > 0.0; });
    if (!fwd) return false;
    return reaches_all([&a](std::size_t u, std::size_t w) { return a(w, u) > 0.0; });
}

} // namespace savings
