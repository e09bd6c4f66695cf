#pragma once

// Small dense linear algebra. Everything here is sized for the protocol's
// phase-space dimensions (at most 8x8), so storage is a flat std::vector and
// algorithms are the textbook ones.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvswap/errors.hpp"

namespace cvswap::numerics {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values)
        : Matrix(rows, cols) {
        if (values.size() != rows * cols) {
            throw ContractViolation("Matrix: initializer size does not match shape");
        }
        std::copy(values.begin(), values.end(), data_.begin());
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() != cols_) throw ContractViolation("Matrix::apply: dimension mismatch");
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ContractViolation("Matrix product: dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator*(double s, Matrix m) {
        for (double& x : m.data_) x *= s;
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Real symmetric matrix stored as its packed lower triangle. Symmetry holds by
// construction; from_dense() is the only place asymmetric input is rejected.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

    static SymmetricMatrix identity(std::size_t n, double scale = 1.0) {
        SymmetricMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) s.set(i, i, scale);
        return s;
    }

    static SymmetricMatrix diagonal(std::span<const double> d) {
        SymmetricMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
        return s;
    }

    // Rejects matrices whose entries differ from their transpose by more than tol.
    static SymmetricMatrix from_dense(const Matrix& m, double tol = 1e-12) {
        if (m.rows() != m.cols()) throw ContractViolation("SymmetricMatrix: matrix is not square");
        SymmetricMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                if (std::abs(m(i, j) - m(j, i)) > tol) {
                    std::ostringstream os;
                    os << "SymmetricMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
                       << ") differ by " << std::abs(m(i, j) - m(j, i));
                    throw ContractViolation(os.str());
                }
                s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
            }
        return s;
    }

    // Outer product u u^T scaled by s.
    static SymmetricMatrix rank_one(std::span<const double> u, double s = 1.0) {
        SymmetricMatrix r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) r.set(i, j, s * u[i] * u[j]);
        return r;
    }

    std::size_t dim() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) { packed_[index(i, j)] = v; }
    void add(std::size_t i, std::size_t j, double v) { packed_[index(i, j)] += v; }

    Matrix to_dense() const {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    // M^T S M for an n x m matrix M.
    SymmetricMatrix congruence(const Matrix& map) const {
        if (map.rows() != n_) throw ContractViolation("SymmetricMatrix::congruence: dimension mismatch");
        const std::size_t m = map.cols();
        // T = S M  (n x m)
        Matrix t(n_, m);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                const double s = (*this)(i, k);
                if (s == 0.0) continue;
                for (std::size_t j = 0; j < m; ++j) t(i, j) += s * map(k, j);
            }
        SymmetricMatrix out(m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b <= a; ++b) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n_; ++i) acc += map(i, a) * t(i, b);
                out.set(a, b, acc);
            }
        return out;
    }

    double quadratic_form(std::span<const double> z) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            acc += (*this)(i, i) * z[i] * z[i];
            for (std::size_t j = 0; j < i; ++j) acc += 2.0 * (*this)(i, j) * z[i] * z[j];
        }
        return acc;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : packed_) m = std::max(m, std::abs(x));
        return m;
    }

    friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) {
        if (a.n_ != b.n_) throw ContractViolation("SymmetricMatrix sum: dimension mismatch");
        for (std::size_t k = 0; k < a.packed_.size(); ++k) a.packed_[k] += b.packed_[k];
        return a;
    }

    friend SymmetricMatrix operator*(double s, SymmetricMatrix a) {
        for (double& x : a.packed_) x *= s;
        return a;
    }

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
    static std::size_t index(std::size_t i, std::size_t j) {
        if (i < j) std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

    std::size_t n_ = 0;
    std::vector<double> packed_;
};

class NotPositiveDefinite : public std::domain_error {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : std::domain_error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// Cholesky factor L with S = L L^T.
class SpdFactor {
public:
    explicit SpdFactor(Matrix lower) : lower_(std::move(lower)) {}

    std::size_t dim() const noexcept { return lower_.rows(); }
    const Matrix& lower() const noexcept { return lower_; }

    double log_determinant() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) acc += std::log(lower_(i, i));
        return 2.0 * acc;
    }

    double determinant() const { return std::exp(log_determinant()); }

    // Solves S x = b.
    template <typename T>
    std::vector<T> solve(std::span<const T> b) const {
        const std::size_t n = dim();
        if (b.size() != n) throw ContractViolation("SpdFactor::solve: dimension mismatch");
        std::vector<T> y(b.begin(), b.end());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) y[i] -= lower_(i, k) * y[k];
            y[i] /= lower_(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) y[i] -= lower_(k, i) * y[k];
            y[i] /= lower_(i, i);
        }
        return y;
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        return solve(std::span<const double>(b));
    }

    SymmetricMatrix inverse() const {
        const std::size_t n = dim();
        SymmetricMatrix inv(n);
        std::vector<double> e(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            const auto col = solve(e);
            for (std::size_t i = j; i < n; ++i) inv.set(i, j, col[i]);
        }
        return inv;
    }

private:
    Matrix lower_;
};

// Cholesky with a relative pivot tolerance; throws NotPositiveDefinite naming
// the first pivot that falls below pivot_tol * (largest diagonal magnitude).
inline SpdFactor factor_spd(const SymmetricMatrix& s, double pivot_tol = 1e-12) {
    const std::size_t n = s.dim();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(s(i, i)));
    if (scale == 0.0) scale = 1.0;
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > pivot_tol * scale)) throw NotPositiveDefinite(j);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return SpdFactor(std::move(l));
}

}  // namespace cvswap::numerics
