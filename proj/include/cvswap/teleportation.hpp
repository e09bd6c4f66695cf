#pragma once

// Ideal coherent-state teleportation through a two-mode resource (either a
// swapped state on modes 1, 4 or an unswapped pair) and its fidelity.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/gauss_poly_cf.hpp"
#include "cvswap/states.hpp"
#include "cvswap/swapping.hpp"

namespace cvswap {

struct CoherentAmplitude {
    Complex beta{};
};

inline constexpr double kImaginaryResidueTol = 1e-10;

// e^{-(x^2+p^2)/4} e^{i(p x_b - x p_b)} with x_b = sqrt2 Re beta, p_b = sqrt2 Im beta.
inline GaussPolyCF coherent_cf(CoherentAmplitude amp) {
    const double xb = std::numbers::sqrt2 * amp.beta.real();
    const double pb = std::numbers::sqrt2 * amp.beta.imag();
    return GaussPolyCF(SymmetricMatrix::identity(2, 0.5), {-pb, xb}, MultiIndexPolynomial::constant(2, 1.0));
}

// (x, p) -> (x, -p, x, p)
inline Matrix teleport_restriction() {
    return Matrix(4, 2, {1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 1.0});
}

inline GaussPolyCF teleported_cf(const GaussPolyCF& resource, CoherentAmplitude amp) {
    if (resource.num_vars() != 4) throw ContractViolation("teleported_cf: resource must be a two-mode CF");
    return product(coherent_cf(amp), pullback(resource, teleport_restriction()));
}

namespace detail {

inline double real_fidelity(Complex value, const char* who) {
    if (std::abs(value.imag()) > kImaginaryResidueTol) {
        std::ostringstream os;
        os << who << ": fidelity integral has imaginary part " << value.imag() << " (real part " << value.real()
           << ")";
        throw ImaginaryResidueError(os.str(), value.imag());
    }
    return value.real();
}

// (1/2pi) int e^{-(x^2+p^2)/2} g(x, p) for g already restricted to two variables.
inline Complex fidelity_integral(const GaussPolyCF& restricted) {
    return integrate_full(mul_gaussian_factor(restricted, SymmetricMatrix::identity(2))) /
           (2.0 * std::numbers::pi);
}

}  // namespace detail

// F = (1/2pi) int chi_in(z) chi_tel(-z) dz. The two coherent factors multiply
// to e^{-(x^2+p^2)/2} for every beta, leaving the resource evaluated at
// (-x, p, -x, -p).
inline double fidelity(const GaussPolyCF& resource) {
    if (resource.num_vars() != 4) throw ContractViolation("fidelity: resource must be a two-mode CF");
    const Matrix reflected = teleport_restriction() * Matrix(2, 2, {-1.0, 0.0, 0.0, -1.0});
    return detail::real_fidelity(detail::fidelity_integral(pullback(resource, reflected)), "fidelity");
}

// Same integral built literally from a coherent input of amplitude beta.
inline Complex fidelity_integral_with_input(const GaussPolyCF& resource, CoherentAmplitude amp) {
    const auto out = teleported_cf(resource, amp);
    const auto integrand = product(coherent_cf(amp), pullback(out, Matrix(2, 2, {-1.0, 0.0, 0.0, -1.0})));
    return integrate_full(integrand) / (2.0 * std::numbers::pi);
}

// Teleportation through the unswapped pair itself.
inline double direct_resource_fidelity(const GaussPolyCF& resource) {
    if (resource.num_vars() != 4) throw ContractViolation("direct_resource_fidelity: resource must be a two-mode CF");
    return fidelity(resource);
}

// Fidelity after swapping squeezed Bell states, with every linear map composed
// down to the two teleportation variables before any polynomial is expanded.
// Only g1 + g4 enters here, since the teleportation restriction sees the
// gains through g1 x + g4 x and g1 p + g4 p alone.
inline Complex swap_fidelity_integral(const SqueezedBellParams& input, const SqueezedBellParams& resource,
                                      const ApparatusParams& app) {
    input.validate();
    resource.validate();
    app.validate();
    const Matrix reflected = teleport_restriction() * Matrix(2, 2, {-1.0, 0.0, 0.0, -1.0});
    const Matrix in_map = bogoliubov_map(input.r, input.phi) * (input_argument_map(app) * reflected);
    const Matrix res_map = bogoliubov_map(resource.r, resource.phi) * (resource_argument_map(app) * reflected);
    const auto joint = product(pullback(bell_core_cf(input.delta, input.theta), in_map),
                               pullback(bell_core_cf(resource.delta, resource.theta), res_map));
    const auto damped = mul_gaussian_factor(joint, swap_damping(app).congruence(reflected));
    return detail::fidelity_integral(damped);
}

inline double swap_fidelity(const SqueezedBellParams& input, const SqueezedBellParams& resource,
                            const ApparatusParams& app) {
    return detail::real_fidelity(swap_fidelity_integral(input, resource, app), "swap_fidelity");
}

inline Complex direct_fidelity_integral(const SqueezedBellParams& resource) {
    resource.validate();
    const Matrix reflected = teleport_restriction() * Matrix(2, 2, {-1.0, 0.0, 0.0, -1.0});
    const auto restricted =
        pullback(bell_core_cf(resource.delta, resource.theta), bogoliubov_map(resource.r, resource.phi) * reflected);
    return detail::fidelity_integral(restricted);
}

inline double direct_fidelity(const SqueezedBellParams& resource) {
    return detail::real_fidelity(direct_fidelity_integral(resource), "direct_fidelity");
}

}  // namespace cvswap
