#pragma once

// Swapped two-mode state on modes (1, 4) after a Bell measurement on modes
// (2, 3), conditional displacements with gains g1, g4, detector inefficiency
// (fictitious beam splitters of transmissivity T2, T3) and thermal-loss
// propagation of the two kept modes.

#include <cmath>
#include <string>

#include "cvswap/errors.hpp"
#include "cvswap/gauss_poly_cf.hpp"

namespace cvswap {

struct ApparatusParams {
    double g1 = 0.0;
    double g4 = 1.0;
    double T2 = 1.0;
    double T3 = 1.0;
    double tau1 = 0.0;
    double tau4 = 0.0;
    double nth1 = 0.0;
    double nth4 = 0.0;

    double R2_squared() const { return 1.0 - T2 * T2; }
    double R3_squared() const { return 1.0 - T3 * T3; }
    double R2() const { return std::sqrt(R2_squared()); }
    double R3() const { return std::sqrt(R3_squared()); }

    void validate() const {
        for (double v : {g1, g4, T2, T3, tau1, tau4, nth1, nth4})
            if (!std::isfinite(v)) throw ParameterRangeError("ApparatusParams: non-finite value");
        if (T2 < 0.0 || T2 > 1.0 || T3 < 0.0 || T3 > 1.0)
            throw ParameterRangeError("ApparatusParams: transmissivities must lie in [0, 1]");
        if (tau1 < 0.0 || tau4 < 0.0) throw ParameterRangeError("ApparatusParams: tau must be non-negative");
        if (nth1 < 0.0 || nth4 < 0.0) throw ParameterRangeError("ApparatusParams: nth must be non-negative");
    }

    ApparatusParams with_gains(double g1_new, double g4_new) const {
        ApparatusParams a = *this;
        a.g1 = g1_new;
        a.g4 = g4_new;
        return a;
    }

    friend bool operator==(const ApparatusParams&, const ApparatusParams&) = default;
};

// Perfect detectors, no propagation loss, unit gain on mode 4 only.
inline constexpr ApparatusParams kIdealApparatus{};

// The lossy setting used for the realistic figures: tau1 = 0.1, tau4 = 0.2,
// no thermal photons, R2^2 = R3^2 = 0.05.
inline ApparatusParams realistic_apparatus() {
    ApparatusParams a;
    a.tau1 = 0.1;
    a.tau4 = 0.2;
    a.T2 = std::sqrt(1.0 - 0.05);
    a.T3 = std::sqrt(1.0 - 0.05);
    return a;
}

// Argument map (x1, p1, x4, p4) -> arguments of the input CF on modes (1, 2).
inline Matrix input_argument_map(const ApparatusParams& app) {
    const double d1 = std::exp(-0.5 * app.tau1);
    return Matrix(4, 4, {
        d1,              0.0,              0.0,             0.0,
        0.0,             d1,               0.0,             0.0,
        app.T2 * app.g1, 0.0,              app.T2 * app.g4, 0.0,
        0.0,             -app.T3 * app.g1, 0.0,             app.T3 * app.g4,
    });
}

// Argument map (x1, p1, x4, p4) -> arguments of the resource CF on modes (3, 4).
inline Matrix resource_argument_map(const ApparatusParams& app) {
    const double d4 = std::exp(-0.5 * app.tau4);
    return Matrix(4, 4, {
        app.T2 * app.g1, 0.0,             app.T2 * app.g4, 0.0,
        0.0,             app.T3 * app.g1, 0.0,             -app.T3 * app.g4,
        0.0,             0.0,             d4,              0.0,
        0.0,             0.0,             0.0,             d4,
    });
}

// B in exp(-1/2 z^T B z): thermal-loss diffusion of modes 1 and 4 plus the
// vacuum noise let in by the detectors' fictitious beam splitters.
inline SymmetricMatrix swap_damping(const ApparatusParams& app) {
    const double k1 = (1.0 - std::exp(-app.tau1)) * (0.5 + app.nth1);
    const double k4 = (1.0 - std::exp(-app.tau4)) * (0.5 + app.nth4);
    const double diag[] = {k1, k1, k4, k4};
    const double u[] = {app.g1, 0.0, app.g4, 0.0};
    const double v[] = {0.0, -app.g1, 0.0, app.g4};
    return SymmetricMatrix::diagonal(diag) + SymmetricMatrix::rank_one(u, app.R2_squared()) +
           SymmetricMatrix::rank_one(v, app.R3_squared());
}

inline GaussPolyCF swapped_cf(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                              const ApparatusParams& app) {
    if (input12.num_vars() != 4 || resource34.num_vars() != 4)
        throw ContractViolation("swapped_cf: input and resource must be two-mode CFs");
    app.validate();
    const auto joint = product(pullback(input12, input_argument_map(app)),
                               pullback(resource34, resource_argument_map(app)));
    return mul_gaussian_factor(joint, swap_damping(app));
}

// chi12(x1, p1, x4, p4) * chi34(x4, -p4, x4, p4)
inline GaussPolyCF ideal_swapped_cf(const GaussPolyCF& input12, const GaussPolyCF& resource34) {
    if (input12.num_vars() != 4 || resource34.num_vars() != 4)
        throw ContractViolation("ideal_swapped_cf: input and resource must be two-mode CFs");
    const Matrix restrict34(4, 4, {
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    });
    return product(input12, pullback(resource34, restrict34));
}

}  // namespace cvswap
