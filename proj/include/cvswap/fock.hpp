#pragma once

// Truncated Fock-space representation of one- and two-mode pure states, used
// as an independent check on the closed-form characteristic functions.
//
// Displacement matrix elements are the exact Laguerre expressions, so the only
// approximation is truncation of the state itself. For squeezed Bell states the
// discarded weight is reported by tail_weight(); it behaves like
// tanh(r)^(2 n_max), i.e. it is governed by the thermal occupancy sinh^2 r.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/states.hpp"

namespace cvswap::fock {

// Row-major (n_max+1) x (n_max+1) matrix of <m|D(alpha)|n>.
inline std::vector<Complex> displacement_matrix(Complex alpha, std::size_t n_max) {
    const std::size_t d = n_max + 1;
    std::vector<Complex> out(d * d);
    const double a2 = std::norm(alpha);
    const double g = std::exp(-0.5 * a2);
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n) {
            const std::size_t lo = std::min(m, n), hi = std::max(m, n);
            const unsigned k = static_cast<unsigned>(hi - lo);
            const double norm = std::exp(0.5 * (std::lgamma(double(lo) + 1) - std::lgamma(double(hi) + 1)));
            const Complex base = m >= n ? alpha : -std::conj(alpha);
            const Complex pw = k == 0 ? Complex(1.0) : std::pow(base, static_cast<int>(k));
            out[m * d + n] = norm * pw * g * std::assoc_laguerre(static_cast<unsigned>(lo), k, a2);
        }
    return out;
}

class TwoModeState {
public:
    explicit TwoModeState(std::size_t n_max) : n_max_(n_max), amp_((n_max + 1) * (n_max + 1)) {}

    std::size_t n_max() const noexcept { return n_max_; }
    std::size_t dim() const noexcept { return n_max_ + 1; }

    Complex& operator()(std::size_t j, std::size_t k) { return amp_[j * dim() + k]; }
    Complex operator()(std::size_t j, std::size_t k) const { return amp_[j * dim() + k]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        return s;
    }

    TwoModeState normalized() const {
        const double n = std::sqrt(norm_squared());
        if (n == 0.0) throw ContractViolation("TwoModeState: cannot normalise the zero vector");
        TwoModeState s = *this;
        for (auto& a : s.amp_) a /= n;
        return s;
    }

    // a_h (mode = 0) or a_k (mode = 1).
    TwoModeState annihilate(int mode) const {
        TwoModeState s(n_max_);
        for (std::size_t j = 0; j < dim(); ++j)
            for (std::size_t k = 0; k < dim(); ++k) {
                if (mode == 0 && j + 1 < dim()) s(j, k) = std::sqrt(double(j + 1)) * (*this)(j + 1, k);
                if (mode == 1 && k + 1 < dim()) s(j, k) = std::sqrt(double(k + 1)) * (*this)(j, k + 1);
            }
        return s;
    }

    // a_h^dag (mode = 0) or a_k^dag (mode = 1); the top level is dropped.
    TwoModeState create(int mode) const {
        TwoModeState s(n_max_);
        for (std::size_t j = 0; j < dim(); ++j)
            for (std::size_t k = 0; k < dim(); ++k) {
                if (mode == 0 && j > 0) s(j, k) = std::sqrt(double(j)) * (*this)(j - 1, k);
                if (mode == 1 && k > 0) s(j, k) = std::sqrt(double(k)) * (*this)(j, k - 1);
            }
        return s;
    }

    // <psi| D(alpha_h) (x) D(alpha_k) |psi>
    Complex characteristic(Complex alpha_h, Complex alpha_k) const {
        const std::size_t d = dim();
        const auto dh = displacement_matrix(alpha_h, n_max_);
        const auto dk = displacement_matrix(alpha_k, n_max_);
        // t = psi Dk^T, then sum conj(psi) (Dh t)
        std::vector<Complex> t(d * d);
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t k = 0; k < d; ++k) {
                Complex acc{};
                for (std::size_t n = 0; n < d; ++n) acc += amp_[m * d + n] * dk[k * d + n];
                t[m * d + k] = acc;
            }
        Complex total{};
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                Complex acc{};
                for (std::size_t m = 0; m < d; ++m) acc += dh[j * d + m] * t[m * d + k];
                total += std::conj(amp_[j * d + k]) * acc;
            }
        return total;
    }

private:
    std::size_t n_max_;
    std::vector<Complex> amp_;
};

inline Complex quadrature_amplitude(double x, double p) { return Complex(x, p) / std::numbers::sqrt2; }

// S(zeta)|00> and S(zeta)|11> from the disentangled form of the squeezer,
// with tau = e^{i phi} tanh r:
//   S|00> = (1/cosh r) sum_j (-tau)^j |jj>
//   S|11> = cosh^-3 r sum_j (-tau)^j (j+1) |j+1,j+1> + tau^* S|00>
inline TwoModeState sb_state_vector(const SqueezedBellParams& params, std::size_t n_max) {
    params.validate();
    const double c = std::cosh(params.r);
    const Complex tau = std::polar(std::tanh(params.r), params.phi);
    const Complex w00 = std::cos(params.delta);
    const Complex w11 = std::polar(std::sin(params.delta), params.theta);
    TwoModeState s(n_max);
    Complex pw = 1.0;  // (-tau)^j
    for (std::size_t j = 0; j <= n_max; ++j) {
        s(j, j) += (w00 + w11 * std::conj(tau)) * pw / c;
        if (j + 1 <= n_max) s(j + 1, j + 1) += w11 * pw * double(j + 1) / (c * c * c);
        pw *= -tau;
    }
    return s;
}

// Weight of the exact state lying outside the truncated basis.
inline double tail_weight(const SqueezedBellParams& params, std::size_t n_max) {
    return std::max(0.0, 1.0 - sb_state_vector(params, n_max).norm_squared());
}

inline Complex fock_cf_oracle(const SqueezedBellParams& params, std::span<const double> z, std::size_t n_max) {
    if (n_max < 10) throw ContractViolation("fock_cf_oracle: n_max must be at least 10");
    if (z.size() != 4) throw ContractViolation("fock_cf_oracle: z must have 4 components");
    return sb_state_vector(params, n_max).characteristic(quadrature_amplitude(z[0], z[1]),
                                                         quadrature_amplitude(z[2], z[3]));
}

inline Complex fock_cf_oracle(const SqueezedBellParams& params, const std::vector<double>& z, std::size_t n_max) {
    return fock_cf_oracle(params, std::span<const double>(z), n_max);
}

inline std::vector<Complex> coherent_state_vector(Complex beta, std::size_t n_max) {
    std::vector<Complex> v(n_max + 1);
    Complex term = std::exp(-0.5 * std::norm(beta));
    for (std::size_t n = 0; n <= n_max; ++n) {
        v[n] = term;
        term *= beta / std::sqrt(double(n + 1));
    }
    return v;
}

inline Complex single_mode_characteristic(const std::vector<Complex>& psi, double x, double p) {
    const std::size_t d = psi.size();
    if (d == 0) throw ContractViolation("single_mode_characteristic: empty state");
    const auto dm = displacement_matrix(quadrature_amplitude(x, p), d - 1);
    Complex total{};
    for (std::size_t m = 0; m < d; ++m) {
        Complex acc{};
        for (std::size_t n = 0; n < d; ++n) acc += dm[m * d + n] * psi[n];
        total += std::conj(psi[m]) * acc;
    }
    return total;
}

}  // namespace cvswap::fock
