#pragma once

// Characteristic functions of the form
//
//     chi(z) = P(z) * exp(-1/2 z^T A z + i c^T z)
//
// over 2n real phase-space variables ordered (x1, p1, x2, p2, ...). Every
// state and every protocol output in this library is of this form, and the
// operations below (linear substitution, product, extra Gaussian damping,
// full Gaussian integral) keep it closed.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/numerics/dense.hpp"
#include "cvswap/polynomial.hpp"

namespace cvswap {

using numerics::Matrix;
using numerics::SymmetricMatrix;

class GaussPolyCF {
public:
    GaussPolyCF(SymmetricMatrix quad, std::vector<double> phase, MultiIndexPolynomial poly)
        : quad_(std::move(quad)), phase_(std::move(phase)), poly_(std::move(poly)) {
        const std::size_t n = poly_.num_vars();
        if (quad_.dim() != n || phase_.size() != n)
            throw ContractViolation("GaussPolyCF: quad, phase and poly must share num_vars");
    }

    // P = 1, A = 0, c = 0: the neutral element of product().
    static GaussPolyCF constant_one(std::size_t n) {
        return GaussPolyCF(SymmetricMatrix(n), std::vector<double>(n, 0.0), MultiIndexPolynomial::constant(n, 1.0));
    }

    // P = 1, c = 0, A as given.
    static GaussPolyCF gaussian(SymmetricMatrix quad) {
        const std::size_t n = quad.dim();
        return GaussPolyCF(std::move(quad), std::vector<double>(n, 0.0), MultiIndexPolynomial::constant(n, 1.0));
    }

    std::size_t num_vars() const noexcept { return poly_.num_vars(); }
    const SymmetricMatrix& quad() const noexcept { return quad_; }
    const std::vector<double>& phase() const noexcept { return phase_; }
    const MultiIndexPolynomial& poly() const noexcept { return poly_; }

    // chi(-z) = conj(chi(z)) holds identically.
    bool is_hermitian(double tol = 1e-12) const { return poly_.is_hermitian(tol); }

private:
    SymmetricMatrix quad_;
    std::vector<double> phase_;
    MultiIndexPolynomial poly_;
};

inline Complex eval(const GaussPolyCF& cf, std::span<const double> z) {
    const std::size_t n = cf.num_vars();
    if (z.size() != n) throw ContractViolation("eval: point has wrong dimension");
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) lin += cf.phase()[i] * z[i];
    const double quad = cf.quad().quadratic_form(z);
    return cf.poly().evaluate(z) * std::exp(Complex(-0.5 * quad, lin));
}

inline Complex eval(const GaussPolyCF& cf, const std::vector<double>& z) {
    return eval(cf, std::span<const double>(z));
}

// cf(M w) as a function of w; M has num_vars rows.
inline GaussPolyCF pullback(const GaussPolyCF& cf, const Matrix& map) {
    if (map.rows() != cf.num_vars()) throw ContractViolation("pullback: map must have num_vars rows");
    std::vector<double> phase(map.cols(), 0.0);
    for (std::size_t j = 0; j < map.cols(); ++j)
        for (std::size_t i = 0; i < map.rows(); ++i) phase[j] += map(i, j) * cf.phase()[i];
    return GaussPolyCF(cf.quad().congruence(map), std::move(phase), cf.poly().compose(map));
}

inline GaussPolyCF product(const GaussPolyCF& a, const GaussPolyCF& b) {
    if (a.num_vars() != b.num_vars()) throw ContractViolation("product: num_vars mismatch");
    std::vector<double> phase(a.phase());
    for (std::size_t i = 0; i < phase.size(); ++i) phase[i] += b.phase()[i];
    return GaussPolyCF(a.quad() + b.quad(), std::move(phase), a.poly() * b.poly());
}

// Multiplies by exp(-1/2 z^T B z).
inline GaussPolyCF mul_gaussian_factor(const GaussPolyCF& cf, const SymmetricMatrix& damping) {
    if (damping.dim() != cf.num_vars()) throw ContractViolation("mul_gaussian_factor: dimension mismatch");
    return GaussPolyCF(cf.quad() + damping, cf.phase(), cf.poly());
}

inline GaussPolyCF mul_gaussian_factor(const GaussPolyCF& cf, const Matrix& damping) {
    return mul_gaussian_factor(cf, SymmetricMatrix::from_dense(damping));
}

// Column-selection map that places an n-variable function at variable
// positions [offset, offset + n) of a total-variable space.
inline Matrix embedding_map(std::size_t n, std::size_t total, std::size_t offset) {
    if (offset + n > total) throw ContractViolation("embedding_map: block exceeds total dimension");
    Matrix m(n, total);
    for (std::size_t i = 0; i < n; ++i) m(i, offset + i) = 1.0;
    return m;
}

namespace detail {

// Central Gaussian moments E[y^k] for y ~ N(0, cov), by Isserlis recursion
// E[y_a Y] = sum_b cov_ab E[d Y / d y_b], memoised on the multi-index.
class GaussianMoments {
public:
    explicit GaussianMoments(const SymmetricMatrix& cov) : cov_(cov) {}

    double operator()(const Exponent& k) {
        const unsigned deg = total_degree(k);
        if (deg == 0) return 1.0;
        if (deg % 2 == 1) return 0.0;
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        std::size_t a = 0;
        while (k[a] == 0) ++a;
        Exponent rest = k;
        --rest[a];
        double acc = 0.0;
        for (std::size_t b = 0; b < cov_.dim(); ++b) {
            if (rest[b] == 0) continue;
            const double c = cov_(a, b);
            if (c == 0.0) continue;
            Exponent next = rest;
            const double mult = next[b];
            --next[b];
            acc += c * mult * (*this)(next);
        }
        memo_.emplace(k, acc);
        return acc;
    }

private:
    const SymmetricMatrix& cov_;
    std::map<Exponent, double> memo_;
};

}  // namespace detail

// Exact integral of cf over R^n (no 1/(2 pi) prefactors):
//   (2 pi)^{n/2} det(A)^{-1/2} exp(-1/2 c^T A^{-1} c) * E[P(mu + y)],
// with mu = i A^{-1} c and y ~ N(0, A^{-1}).
inline Complex integrate_full(const GaussPolyCF& cf) {
    const std::size_t n = cf.num_vars();
    std::optional<numerics::SpdFactor> factor;
    try {
        factor.emplace(numerics::factor_spd(cf.quad()));
    } catch (const numerics::NotPositiveDefinite& e) {
        throw DivergentIntegral(std::string("integrate_full: divergent integral, quadratic form ") + e.what(),
                                e.pivot());
    }
    const auto cov = factor->inverse();
    const auto sc = factor->solve(cf.phase());
    double csc = 0.0;
    bool has_phase = false;
    for (std::size_t i = 0; i < n; ++i) {
        csc += cf.phase()[i] * sc[i];
        has_phase = has_phase || cf.phase()[i] != 0.0;
    }
    const double log_pref = 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) -
                            0.5 * factor->log_determinant() - 0.5 * csc;

    MultiIndexPolynomial shifted = cf.poly();
    if (has_phase) {
        std::vector<Complex> mu(n);
        for (std::size_t i = 0; i < n; ++i) mu[i] = Complex(0.0, sc[i]);
        shifted = cf.poly().compose(Matrix::identity(n), mu);
    }
    detail::GaussianMoments moments(cov);
    Complex expectation{};
    for (const auto& t : shifted.terms()) expectation += t.coefficient * moments(t.exponent);
    return std::exp(log_pref) * expectation;
}

}  // namespace cvswap
