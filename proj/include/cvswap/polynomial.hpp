#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/numerics/dense.hpp"

namespace cvswap {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxVariables = 8;
inline constexpr double kPruneThreshold = 1e-14;

using Exponent = std::array<std::uint8_t, kMaxVariables>;

inline unsigned total_degree(const Exponent& e) {
    unsigned d = 0;
    for (auto k : e) d += k;
    return d;
}

// Sparse polynomial with complex coefficients over num_vars real variables.
// Terms are kept sorted by exponent; no stored coefficient is zero.
class MultiIndexPolynomial {
public:
    struct Term {
        Exponent exponent{};
        Complex coefficient;
    };

    explicit MultiIndexPolynomial(std::size_t num_vars) : num_vars_(num_vars) {
        if (num_vars == 0 || num_vars > kMaxVariables)
            throw ContractViolation("MultiIndexPolynomial: num_vars must be 1..8");
    }

    static MultiIndexPolynomial constant(std::size_t num_vars, Complex c) {
        MultiIndexPolynomial p(num_vars);
        if (c != Complex{}) p.terms_.push_back({Exponent{}, c});
        return p;
    }

    static MultiIndexPolynomial variable(std::size_t num_vars, std::size_t index, Complex c = 1.0) {
        MultiIndexPolynomial p(num_vars);
        if (index >= num_vars) throw ContractViolation("MultiIndexPolynomial::variable: index out of range");
        Exponent e{};
        e[index] = 1;
        if (c != Complex{}) p.terms_.push_back({e, c});
        return p;
    }

    // Duplicate exponents are summed; zero sums are dropped.
    static MultiIndexPolynomial from_terms(std::size_t num_vars, std::vector<Term> terms) {
        MultiIndexPolynomial p(num_vars);
        for (const auto& t : terms)
            for (std::size_t i = num_vars; i < kMaxVariables; ++i)
                if (t.exponent[i] != 0)
                    throw ContractViolation("MultiIndexPolynomial: exponent uses a variable beyond num_vars");
        p.terms_ = std::move(terms);
        p.normalize();
        return p;
    }

    std::size_t num_vars() const noexcept { return num_vars_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& t : terms_) d = std::max(d, total_degree(t.exponent));
        return d;
    }

    Complex coefficient(const Exponent& e) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                   [](const Term& t, const Exponent& x) { return t.exponent < x; });
        return (it != terms_.end() && it->exponent == e) ? it->coefficient : Complex{};
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coefficient));
        return m;
    }

    template <typename T>
    Complex evaluate(std::span<const T> z) const {
        if (z.size() != num_vars_) throw ContractViolation("MultiIndexPolynomial::evaluate: dimension mismatch");
        if (terms_.empty()) return {};
        std::array<unsigned, kMaxVariables> max_pow{};
        for (const auto& t : terms_)
            for (std::size_t i = 0; i < num_vars_; ++i) max_pow[i] = std::max<unsigned>(max_pow[i], t.exponent[i]);
        std::array<std::vector<T>, kMaxVariables> pw;
        for (std::size_t i = 0; i < num_vars_; ++i) {
            pw[i].resize(max_pow[i] + 1);
            pw[i][0] = T(1);
            for (unsigned k = 1; k <= max_pow[i]; ++k) pw[i][k] = pw[i][k - 1] * z[i];
        }
        Complex acc{};
        for (const auto& t : terms_) {
            T m = T(1);
            for (std::size_t i = 0; i < num_vars_; ++i)
                if (t.exponent[i]) m *= pw[i][t.exponent[i]];
            acc += t.coefficient * m;
        }
        return acc;
    }

    Complex evaluate(const std::vector<double>& z) const { return evaluate(std::span<const double>(z)); }

    MultiIndexPolynomial scaled(Complex s) const {
        MultiIndexPolynomial p(num_vars_);
        if (s == Complex{}) return p;
        p.terms_ = terms_;
        for (auto& t : p.terms_) t.coefficient *= s;
        return p;
    }

    // Drops terms smaller than rel * (largest coefficient modulus).
    MultiIndexPolynomial pruned(double rel = kPruneThreshold) const {
        MultiIndexPolynomial p = *this;
        p.prune(rel);
        return p;
    }

    // P(M w + offset) as a polynomial in the map's column variables. M has
    // num_vars rows; offset (complex) is optional.
    MultiIndexPolynomial compose(const numerics::Matrix& map, std::span<const Complex> offset = {}) const {
        if (map.rows() != num_vars_) throw ContractViolation("MultiIndexPolynomial::compose: map row count mismatch");
        if (!offset.empty() && offset.size() != num_vars_)
            throw ContractViolation("MultiIndexPolynomial::compose: offset size mismatch");
        const std::size_t m = map.cols();
        MultiIndexPolynomial out(m);
        if (terms_.empty()) return out;

        std::array<unsigned, kMaxVariables> max_pow{};
        for (const auto& t : terms_)
            for (std::size_t i = 0; i < num_vars_; ++i) max_pow[i] = std::max<unsigned>(max_pow[i], t.exponent[i]);

        // powers[i][k] = (row_i . w + offset_i)^k
        std::array<std::vector<MultiIndexPolynomial>, kMaxVariables> powers;
        for (std::size_t i = 0; i < num_vars_; ++i) {
            std::vector<Term> lin;
            if (!offset.empty() && offset[i] != Complex{}) lin.push_back({Exponent{}, offset[i]});
            for (std::size_t j = 0; j < m; ++j)
                if (map(i, j) != 0.0) {
                    Exponent e{};
                    e[j] = 1;
                    lin.push_back({e, map(i, j)});
                }
            const auto form = from_terms(m, std::move(lin));
            powers[i].reserve(max_pow[i] + 1);
            powers[i].push_back(constant(m, 1.0));
            for (unsigned k = 1; k <= max_pow[i]; ++k) powers[i].push_back(powers[i].back() * form);
        }

        std::vector<Term> acc;
        for (const auto& t : terms_) {
            MultiIndexPolynomial prod = constant(m, t.coefficient);
            for (std::size_t i = 0; i < num_vars_ && !prod.is_zero(); ++i)
                if (t.exponent[i]) prod = multiply_raw(prod, powers[i][t.exponent[i]]);
            acc.insert(acc.end(), prod.terms_.begin(), prod.terms_.end());
        }
        out.terms_ = std::move(acc);
        out.normalize();
        out.prune(kPruneThreshold);
        return out;
    }

    // Hermitian in the phase-space sense: P(-z) = conj(P(z)), i.e. even-degree
    // coefficients real and odd-degree coefficients imaginary.
    bool is_hermitian(double tol = 1e-12) const {
        const double scale = std::max(1.0, max_abs_coefficient());
        for (const auto& t : terms_) {
            const bool odd = total_degree(t.exponent) % 2 == 1;
            const double off = odd ? t.coefficient.real() : t.coefficient.imag();
            if (std::abs(off) > tol * scale) return false;
        }
        return true;
    }

    friend MultiIndexPolynomial operator+(const MultiIndexPolynomial& a, const MultiIndexPolynomial& b) {
        if (a.num_vars_ != b.num_vars_) throw ContractViolation("polynomial sum: dimension mismatch");
        MultiIndexPolynomial p(a.num_vars_);
        p.terms_.reserve(a.terms_.size() + b.terms_.size());
        p.terms_ = a.terms_;
        p.terms_.insert(p.terms_.end(), b.terms_.begin(), b.terms_.end());
        p.normalize();
        return p;
    }

    friend MultiIndexPolynomial operator*(const MultiIndexPolynomial& a, const MultiIndexPolynomial& b) {
        MultiIndexPolynomial p = multiply_raw(a, b);
        p.prune(kPruneThreshold);
        return p;
    }

private:
    static MultiIndexPolynomial multiply_raw(const MultiIndexPolynomial& a, const MultiIndexPolynomial& b) {
        if (a.num_vars_ != b.num_vars_) throw ContractViolation("polynomial product: dimension mismatch");
        MultiIndexPolynomial p(a.num_vars_);
        p.terms_.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Term t;
                for (std::size_t i = 0; i < a.num_vars_; ++i) {
                    const unsigned e = unsigned(ta.exponent[i]) + tb.exponent[i];
                    if (e > 255) throw ContractViolation("polynomial product: exponent overflow");
                    t.exponent[i] = static_cast<std::uint8_t>(e);
                }
                t.coefficient = ta.coefficient * tb.coefficient;
                p.terms_.push_back(t);
            }
        p.normalize();
        return p;
    }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.exponent < y.exponent; });
        std::size_t w = 0;
        for (std::size_t r = 0; r < terms_.size();) {
            Term t = terms_[r++];
            while (r < terms_.size() && terms_[r].exponent == t.exponent) t.coefficient += terms_[r++].coefficient;
            if (t.coefficient != Complex{}) terms_[w++] = t;
        }
        terms_.resize(w);
    }

    void prune(double rel) {
        const double cut = rel * max_abs_coefficient();
        std::erase_if(terms_, [cut](const Term& t) { return std::abs(t.coefficient) < cut; });
    }

    std::size_t num_vars_;
    std::vector<Term> terms_;
};

}  // namespace cvswap
