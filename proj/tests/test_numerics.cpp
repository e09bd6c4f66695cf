#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvswap/numerics/dense.hpp"
#include "cvswap/numerics/quadrature.hpp"
#include "cvswap/numerics/simplex.hpp"

using namespace cvswap;
using namespace cvswap::numerics;

namespace {

double cofactor_det(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    double det = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<double>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(m[i][j]);
            minor.push_back(row);
        }
        det += (c % 2 ? -1.0 : 1.0) * m[0][c] * cofactor_det(minor);
    }
    return det;
}

SymmetricMatrix random_spd(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = g(rng);
    return SymmetricMatrix::from_dense(b * b.transposed(), 1e-9) + SymmetricMatrix::identity(n, 0.5);
}

}  // namespace

TEST(Quadrature, GaussianOnFiniteInterval) {
    QuadratureSpec spec;
    spec.box = {{-8.0, 8.0}};
    spec.abs_tol = 1e-10;
    const auto r = adaptive_integrate([](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]); }, spec);
    EXPECT_NEAR(r.value.real(), std::sqrt(2.0 * std::numbers::pi), 1e-8);
}

TEST(Quadrature, TwoDimensionalFourierGaussian) {
    QuadratureSpec spec;
    spec.box = {{-10.0, 10.0}, {-10.0, 10.0}};
    spec.abs_tol = 1e-9;
    const auto r = adaptive_integrate(
        [](std::span<const double> x) {
            return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * std::polar(1.0, x[0]);
        },
        spec);
    EXPECT_NEAR(std::abs(r.value - 2.0 * std::numbers::pi * std::exp(-0.5)), 0.0, 1e-7);
}

TEST(Quadrature, OscillatoryGaussianFrequencyFive) {
    // int e^{-x^2/2} cos(5x) dx = sqrt(2 pi) e^{-25/2}
    QuadratureSpec spec;
    spec.box = {{-12.0, 12.0}};
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-12;
    const auto r = adaptive_integrate(
        [](std::span<const double> x) { return std::exp(-0.5 * x[0] * x[0]) * std::cos(5.0 * x[0]); }, spec);
    const double exact = std::sqrt(2.0 * std::numbers::pi) * std::exp(-12.5);
    EXPECT_LE(std::abs(r.value.real() - exact), std::max(spec.abs_tol, spec.rel_tol * std::abs(exact)) + 1e-13);
}

TEST(Quadrature, ErrorEstimateIsConservativeOnGaussianBattery) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int honest = 0;
    for (int t = 0; t < 200; ++t) {
        const double a = 0.3 + 3.0 * u(rng), mu = 2.0 * u(rng) - 1.0, w = 4.0 * u(rng);
        QuadratureSpec spec;
        spec.box = {{mu - 9.0 / std::sqrt(a), mu + 9.0 / std::sqrt(a)}};
        spec.abs_tol = 1e-7;
        spec.rel_tol = 1e-7;
        const auto r = adaptive_integrate(
            [&](std::span<const double> x) {
                const double d = x[0] - mu;
                return std::exp(-0.5 * a * d * d) * std::polar(1.0, w * x[0]);
            },
            spec);
        const auto exact =
            std::sqrt(2.0 * std::numbers::pi / a) * std::exp(-0.5 * w * w / a) * std::polar(1.0, w * mu);
        if (std::abs(r.value - exact) <= r.error + 1e-15) ++honest;
    }
    EXPECT_GE(honest, 190);
}

TEST(Quadrature, RejectsBadSpecs) {
    QuadratureSpec spec;
    spec.box = {{1.0, 0.0}};
    EXPECT_THROW(adaptive_integrate([](std::span<const double>) { return 1.0; }, spec), ContractViolation);
    spec.box = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    EXPECT_THROW(adaptive_integrate([](std::span<const double>) { return 1.0; }, spec), ContractViolation);
}

TEST(Quadrature, BudgetExhaustionCarriesBestEstimate) {
    QuadratureSpec spec;
    spec.box = {{-1.0, 1.0}};
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-15;
    spec.max_subdivisions = 3;
    try {
        adaptive_integrate([](std::span<const double> x) { return std::sqrt(std::abs(x[0])); }, spec);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_NEAR(e.best().value.real(), 4.0 / 3.0, 1e-2);
    }
}

TEST(Quadrature, GaussHermiteMoments) {
    const auto [t, w] = gauss_hermite(16);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        m0 += w[i];
        m2 += w[i] * t[i] * t[i];
        m4 += w[i] * std::pow(t[i], 4);
    }
    const double sp = std::sqrt(std::numbers::pi);
    EXPECT_NEAR(m0, sp, 1e-13);
    EXPECT_NEAR(m2, sp / 2.0, 1e-13);
    EXPECT_NEAR(m4, 3.0 * sp / 4.0, 1e-13);
}

TEST(Dense, IdentityFactor) {
    const auto f = factor_spd(SymmetricMatrix::identity(4));
    EXPECT_NEAR(f.determinant(), 1.0, 1e-15);
}

TEST(Dense, DiagonalFactorAndSolve) {
    const double d[] = {2.0, 3.0};
    const auto f = factor_spd(SymmetricMatrix::diagonal(d));
    EXPECT_NEAR(f.determinant(), 6.0, 1e-14);
    const auto x = f.solve(std::vector<double>{1.0, 1.0});
    EXPECT_NEAR(x[0], 0.5, 1e-15);
    EXPECT_NEAR(x[1], 1.0 / 3.0, 1e-15);
}

TEST(Dense, IndefiniteMatrixIsRejected) {
    // eigenvalues 1 and -1e-3 in a rotated basis
    const double c = std::cos(0.3), s = std::sin(0.3);
    Matrix rot(2, 2, {c, -s, s, c});
    Matrix diag(2, 2, {1.0, 0.0, 0.0, -1e-3});
    const auto m = SymmetricMatrix::from_dense(rot * diag * rot.transposed(), 1e-12);
    try {
        factor_spd(m);
        FAIL() << "expected NotPositiveDefinite";
    } catch (const NotPositiveDefinite& e) {
        EXPECT_EQ(e.pivot(), 1u);
    }
}

TEST(Dense, DeterminantMatchesCofactorExpansion) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        const auto m = random_spd(rng, 4);
        std::vector<std::vector<double>> rows(4, std::vector<double>(4));
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) rows[i][j] = m(i, j);
        const double ref = cofactor_det(rows);
        EXPECT_NEAR(factor_spd(m).determinant(), ref, 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Dense, SolveAndInverseResiduals) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        const auto m = random_spd(rng, 6);
        const auto f = factor_spd(m);
        std::vector<double> b(6);
        for (auto& v : b) v = g(rng);
        const auto x = f.solve(b);
        const auto mx = m.to_dense().apply(x);
        for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(mx[i], b[i], 1e-12);
        const auto prod = m.to_dense() * f.inverse().to_dense();
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(prod(i, j), i == j ? 1.0 : 0.0, 1e-11);
    }
}

TEST(Dense, CongruenceMatchesExplicitProduct) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> g;
    const auto a = random_spd(rng, 4);
    Matrix m(4, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = g(rng);
    const auto c = a.congruence(m);
    const auto ref = m.transposed() * a.to_dense() * m;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(c(i, j), ref(i, j), 1e-12);
}

TEST(Simplex, OneDimensionalParabola) {
    const double start[] = {0.0}, scale[] = {0.5};
    const auto r = simplex_minimize([](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); }, start, scale);
    EXPECT_NEAR(r.point[0], 2.0, 1e-6);
    EXPECT_TRUE(r.converged);
}

TEST(Simplex, QuadraticBowl) {
    const double start[] = {0.0, 0.0}, scale[] = {0.3, 0.3};
    const auto r = simplex_minimize(
        [](std::span<const double> x) {
            const double a = x[0] - 0.7, b = x[1] + 0.4;
            return a * a + 3.0 * b * b + a * b;
        },
        start, scale);
    EXPECT_NEAR(r.point[0], 0.7, 1e-6);
    EXPECT_NEAR(r.point[1], -0.4, 1e-6);
}

TEST(Simplex, RosenbrockWithinBudget) {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    // Dense scan locates the minimiser independently.
    double best = 1e300, bx = 0.0, by = 0.0;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            const double p[] = {-2.0 + 4.0 * i / 400.0, -1.0 + 4.0 * j / 400.0};
            if (rosen(p) < best) best = rosen(p), bx = p[0], by = p[1];
        }
    EXPECT_NEAR(bx, 1.0, 1e-2);
    EXPECT_NEAR(by, 1.0, 1e-2);

    const double start[] = {-1.0, 1.0}, scale[] = {0.2, 0.2};
    SimplexOptions o;
    o.budget = 500;
    const auto r = simplex_minimize(rosen, start, scale, o);
    EXPECT_LT(r.value, 1e-3);
    EXPECT_LE(r.evaluations, 500u);
}

TEST(Simplex, NeverWorseThanStart) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto bumpy = [](std::span<const double> x) { return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]) + 0.1 * x[0] * x[0]; };
    for (int t = 0; t < 50; ++t) {
        const double start[] = {u(rng), u(rng)}, scale[] = {0.5, 0.5};
        SimplexOptions o;
        o.budget = 40;
        const auto r = simplex_minimize(bumpy, start, scale, o);
        EXPECT_LE(r.value, bumpy(start));
    }
}

TEST(Simplex, ExcludedRegionsAreAvoided) {
    const double start[] = {0.5}, scale[] = {0.2};
    const auto r = simplex_minimize(
        [](std::span<const double> x) { return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : x[0]; }, start,
        scale);
    EXPECT_GE(r.point[0], 0.0);
    EXPECT_LT(r.value, 1e-5);
}
