#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvswap/fock.hpp"
#include "cvswap/states.hpp"
#include "cvswap/swapping.hpp"
#include "cvswap/teleportation.hpp"

using namespace cvswap;

namespace {

constexpr double kPi = std::numbers::pi;

double twin_beam_fidelity(double r) { return 1.0 / (1.0 + std::exp(-2.0 * r)); }

Exponent expo(int x1) {
    Exponent e{};
    e[0] = static_cast<std::uint8_t>(x1);
    return e;
}

}  // namespace

TEST(CoherentCf, VacuumAndExamples) {
    const auto vac = coherent_cf({});
    EXPECT_NEAR(eval(vac, std::vector<double>{1.0, 1.0}).real(), std::exp(-0.5), 1e-15);
    const auto c = coherent_cf({Complex(1.0, 0.0)});
    // x_b = sqrt2, p_b = 0: phase e^{i p sqrt2}
    const auto v = eval(c, std::vector<double>{0.0, 1.0});
    EXPECT_NEAR(std::abs(v - std::exp(-0.25) * std::polar(1.0, std::numbers::sqrt2)), 0.0, 1e-15);
}

TEST(CoherentCf, MatchesFockVector) {
    for (Complex beta : {Complex(0.5, 0.2), Complex(-1.0, 0.7)}) {
        const auto cf = coherent_cf({beta});
        const auto psi = fock::coherent_state_vector(beta, 50);
        for (double x : {-0.6, 0.9})
            for (double p : {0.1, -1.4})
                EXPECT_NEAR(std::abs(eval(cf, std::vector<double>{x, p}) - fock::single_mode_characteristic(psi, x, p)),
                            0.0, 1e-12);
    }
}

TEST(Fidelity, TwinBeamClosedForm) {
    for (double r : {0.0, 0.3, 1.0, 2.0})
        EXPECT_NEAR(direct_fidelity({r, kPi, 0.0, 0.0}), twin_beam_fidelity(r), 1e-12) << r;
}

TEST(Fidelity, StrongTwinBeamNearOne) {
    EXPECT_NEAR(fidelity(sb_cf({8.0, kPi, 0.0, 0.0})), 1.0, 1e-6);
}

TEST(Fidelity, TwinBeamSwapClosedForm) {
    // Unit-gain swapping adds the two resources' correlation noises.
    for (double r12 : {0.0, 0.5, 1.2})
        for (double r34 : {0.0, 0.8, 2.0}) {
            const double ref = 1.0 / (1.0 + std::exp(-2 * r12) + std::exp(-2 * r34));
            EXPECT_NEAR(swap_fidelity({r12, kPi, 0, 0}, {r34, kPi, 0, 0}, kIdealApparatus), ref, 1e-12);
        }
}

TEST(Fidelity, AmplitudeCancels) {
    const auto res = sb_cf({0.7, kPi, 0.9, 0.0});
    const double f = fidelity(res);
    for (Complex beta : {Complex(0.0), Complex(1.0, -0.5), Complex(-2.0, 3.0)}) {
        const auto v = fidelity_integral_with_input(res, {beta});
        EXPECT_NEAR(v.real(), f, 1e-10);
        EXPECT_NEAR(v.imag(), 0.0, 1e-10);
    }
}

TEST(Fidelity, ImaginaryResidueIsReported) {
    const auto bad = GaussPolyCF(SymmetricMatrix::identity(4, 0.5), std::vector<double>(4, 0.0),
                                 MultiIndexPolynomial::from_terms(4, {{expo(0), Complex(1.0)}, {expo(2), Complex(0.0, 1.0)}}));
    try {
        fidelity(bad);
        FAIL() << "expected ImaginaryResidueError";
    } catch (const ImaginaryResidueError& e) {
        EXPECT_GT(std::abs(e.residue()), 1e-3);
    }
}

TEST(Fidelity, DivergentResource) {
    const auto bad = GaussPolyCF(SymmetricMatrix::identity(4, -2.0), std::vector<double>(4, 0.0),
                                 MultiIndexPolynomial::constant(4, 1.0));
    EXPECT_THROW(fidelity(bad), DivergentIntegral);
    EXPECT_THROW(fidelity(GaussPolyCF::constant_one(2)), ContractViolation);
}

TEST(Fidelity, FastPathMatchesFullSwappedCf) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
        const SqueezedBellParams in{1.5 * u(rng), kPi, kPi * u(rng), 0.0};
        const SqueezedBellParams res{1.5 * u(rng), kPi, kPi * u(rng), kPi * u(rng)};
        auto app = realistic_apparatus().with_gains(u(rng), u(rng));
        app.nth4 = 0.2 * u(rng);
        const double full = fidelity(swapped_cf(sb_cf(in), sb_cf(res), app));
        EXPECT_NEAR(swap_fidelity(in, res, app), full, 1e-12);
    }
}

TEST(Fidelity, StrongResourceIsTransparent) {
    for (const auto& in : {SqueezedBellParams{0.5, kPi, 0.7, 0.0}, preset_params(StateFamily::PS, 1.0, kPi)})
        EXPECT_NEAR(swap_fidelity(in, {8.0, kPi, 0.0, 0.0}, kIdealApparatus), direct_fidelity(in), 1e-5);
}

TEST(Fidelity, IncreasesWithResourceSqueezing) {
    double prev = 0.0;
    for (double r34 = 0.0; r34 <= 3.0; r34 += 0.25) {
        const double f = swap_fidelity(preset_params(StateFamily::PS, 0.8, kPi), {r34, kPi, 0, 0}, kIdealApparatus);
        EXPECT_GT(f, prev);
        prev = f;
    }
}

TEST(Fidelity, TwinBeamSwapNonDecreasingInResource) {
    for (double r12 : {0.3, 0.8, 1.3}) {
        double prev = 0.0;
        for (int i = 0; i <= 30; ++i) {
            const double f = swap_fidelity({r12, kPi, 0, 0}, {0.1 * i, kPi, 0, 0}, kIdealApparatus);
            EXPECT_GE(f, prev - 1e-15) << r12 << ' ' << 0.1 * i;
            prev = f;
        }
    }
}

TEST(Fidelity, DirectMatchesGeneralPath) {
    for (const auto& p : {SqueezedBellParams{0.4, kPi, 0.3, 0.0}, preset_params(StateFamily::PA, 0.9, kPi),
                          preset_params(StateFamily::SN, 1.1, kPi)})
        EXPECT_NEAR(direct_fidelity(p), fidelity(sb_cf(p)), 1e-13);
}

TEST(Fidelity, BoundedForPhysicalStates) {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const SqueezedBellParams in{2.0 * u(rng), kPi, kPi * u(rng), 0.0};
        const SqueezedBellParams res{2.0 * u(rng), kPi, kPi * u(rng), 0.0};
        const double f = swap_fidelity(in, res, realistic_apparatus().with_gains(0.0, 2.0 * u(rng)));
        EXPECT_GE(f, -1e-12);
        EXPECT_LE(f, 1.0 + 1e-12);
    }
}
