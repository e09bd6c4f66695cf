#pragma once

// Squeezed Bell states S(zeta) [cos d |00> + e^{i theta} sin d |11>] and their
// named special cases, as characteristic functions over (x_h, p_h, x_k, p_k).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "cvswap/errors.hpp"
#include "cvswap/gauss_poly_cf.hpp"

namespace cvswap {

struct SqueezedBellParams {
    double r = 0.0;
    double phi = 0.0;
    double delta = 0.0;
    double theta = 0.0;

    void validate() const {
        if (!std::isfinite(r) || !std::isfinite(phi) || !std::isfinite(delta) || !std::isfinite(theta))
            throw ParameterRangeError("SqueezedBellParams: non-finite value");
        if (r < 0.0) throw ParameterRangeError("SqueezedBellParams: r must be non-negative");
    }

    friend bool operator==(const SqueezedBellParams&, const SqueezedBellParams&) = default;
};

enum class StateFamily { TB, PS, PA, SN, SB };

inline std::string_view to_string(StateFamily f) {
    switch (f) {
        case StateFamily::TB: return "TB";
        case StateFamily::PS: return "PS";
        case StateFamily::PA: return "PA";
        case StateFamily::SN: return "SN";
        case StateFamily::SB: return "SB";
    }
    return "?";
}

inline StateFamily parse_family(std::string_view s) {
    if (s == "TB") return StateFamily::TB;
    if (s == "PS") return StateFamily::PS;
    if (s == "PA") return StateFamily::PA;
    if (s == "SN") return StateFamily::SN;
    if (s == "SB") return StateFamily::SB;
    throw ContractViolation("unknown state family '" + std::string(s) + "'");
}

// Real form of beta_h = alpha_h cosh r + e^{i phi} alpha_k^* sinh r (and h <-> k):
// rows give (X_h, P_h, X_k, P_k) in terms of (x_h, p_h, x_k, p_k).
inline Matrix bogoliubov_map(double r, double phi) {
    if (!(r >= 0.0)) throw ParameterRangeError("bogoliubov_map: r must be non-negative");
    const double c = std::cosh(r), s = std::sinh(r);
    const double sc = s * std::cos(phi), ss = s * std::sin(phi);
    return Matrix(4, 4, {
        c,   0.0, sc,  ss,
        0.0, c,   ss,  -sc,
        sc,  ss,  c,   0.0,
        ss,  -sc, 0.0, c,
    });
}

// CF of the unsqueezed superposition cos d |00> + e^{i theta} sin d |11>.
inline GaussPolyCF bell_core_cf(double delta, double theta) {
    const double cd = std::cos(delta), sd = std::sin(delta);
    const double c2 = cd * cd, s2 = sd * sd, cs = cd * sd;
    const double ct = std::cos(theta), st = std::sin(theta);

    auto e = [](int x1, int p1, int x2, int p2) {
        Exponent k{};
        k[0] = static_cast<std::uint8_t>(x1);
        k[1] = static_cast<std::uint8_t>(p1);
        k[2] = static_cast<std::uint8_t>(x2);
        k[3] = static_cast<std::uint8_t>(p2);
        return k;
    };
    // sin^2 d (1 - (X1^2+P1^2)/2)(1 - (X2^2+P2^2)/2)
    std::vector<MultiIndexPolynomial::Term> t = {
        {e(0, 0, 0, 0), c2 + s2},
        {e(2, 0, 0, 0), -0.5 * s2},
        {e(0, 2, 0, 0), -0.5 * s2},
        {e(0, 0, 2, 0), -0.5 * s2},
        {e(0, 0, 0, 2), -0.5 * s2},
        {e(2, 0, 2, 0), 0.25 * s2},
        {e(2, 0, 0, 2), 0.25 * s2},
        {e(0, 2, 2, 0), 0.25 * s2},
        {e(0, 2, 0, 2), 0.25 * s2},
        // cos d sin d [cos theta (X1 X2 - P1 P2) + sin theta (X1 P2 + P1 X2)]
        {e(1, 0, 1, 0), cs * ct},
        {e(0, 1, 0, 1), -cs * ct},
        {e(1, 0, 0, 1), cs * st},
        {e(0, 1, 1, 0), cs * st},
    };
    return GaussPolyCF(SymmetricMatrix::identity(4, 0.5), std::vector<double>(4, 0.0),
                       MultiIndexPolynomial::from_terms(4, std::move(t)));
}

inline GaussPolyCF sb_cf(const SqueezedBellParams& params) {
    params.validate();
    return pullback(bell_core_cf(params.delta, params.theta), bogoliubov_map(params.r, params.phi));
}

// <m|D(alpha)|n> for m, n in {0, 1}.
inline Complex displaced_fock_element(int m, int n, Complex alpha) {
    const double a2 = std::norm(alpha);
    const double g = std::exp(-0.5 * a2);
    if (m == 0 && n == 0) return g;
    if (m == 1 && n == 1) return (1.0 - a2) * g;
    if (m == 0 && n == 1) return -std::conj(alpha) * g;
    if (m == 1 && n == 0) return alpha * g;
    throw ContractViolation("displaced_fock_element: indices must be 0 or 1");
}

// Named members of the family. PS and PA carry a negative delta: with
// theta = phi these are the states a_h a_k S|00> and a_h^dag a_k^dag S|00>
// (normalised) under this library's squeezing sign.
inline SqueezedBellParams preset_params(StateFamily kind, double r, double phi) {
    if (!(r >= 0.0)) throw ParameterRangeError("preset_params: r must be non-negative");
    switch (kind) {
        case StateFamily::TB: return {r, phi, 0.0, 0.0};
        case StateFamily::SN: return {r, phi, std::numbers::pi / 2, 0.0};
        case StateFamily::PS:
        case StateFamily::PA: {
            if (r > 300.0) throw ParameterRangeError("preset_params: cosh(2r) overflows for r > 300");
            // cos d = cosh r / sqrt(cosh 2r)  <=>  tan|d| = tanh r
            const double t = std::tanh(r);
            const double mag = kind == StateFamily::PS ? std::atan(t) : std::atan2(1.0, t);
            return {r, phi, -mag, phi};
        }
        case StateFamily::SB: break;
    }
    throw ContractViolation("preset_params: SB has no preset; supply delta and theta");
}

}  // namespace cvswap
