#pragma once

// Independent numerical route to the swapped state: the Bell-measurement
// integral over (xi, upsilon) and the average over homodyne outcomes are both
// done by quadrature, followed by loss propagation and the outcome-conditioned
// displacements. Nothing here uses the closed-form swapped CF.
//
// For a kept-mode argument z the measurement integrand is
//   F_z(xi, ups) = chi12(z1, z2; T2 xi/sqrt2, T3 ups/sqrt2)
//                * chi34(T2 xi/sqrt2, -T3 ups/sqrt2; z3, z4)
//                * exp(-R2^2 xi^2/4 - R3^2 ups^2/4)
// and J_z(xt, pt) = int F_z e^{i xi pt - i xt ups}. Then the outcome density
// is J_0 / (2 pi)^2 and the conditional CF is J_z / J_0.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/gauss_poly_cf.hpp"
#include "cvswap/numerics/quadrature.hpp"
#include "cvswap/swapping.hpp"

namespace cvswap {

struct OracleOptions {
    // Target absolute accuracy of each returned CF value.
    double tol = 1e-6;
    // Measurement integrand extends this many standard deviations of its
    // Gaussian core; outcomes are integrated over +-10 deviations of theirs.
    double inner_sigmas = 10.0;
    double outer_sigmas = 10.0;
    std::size_t max_outer_regions = 20000;
    std::size_t max_inner_panels = 128;
    // Mutation hook for the validation suite: reverses the sign of the
    // displacement phase.
    bool flip_displacement_phase = false;
};

namespace detail {

// A two-mode CF restricted to an affine plane w -> M w + o, w = (xi, ups):
//   poly(w) exp(-1/2 w^T Q w + h^T w + i k^T w + c0)
struct PlaneRestriction {
    std::array<double, 3> q{};  // Q11, Q12, Q22
    std::array<double, 2> h{};
    std::array<double, 2> k{};
    Complex c0{};
    MultiIndexPolynomial poly{2};

    static PlaneRestriction from(const GaussPolyCF& cf, const Matrix& map, const std::array<double, 4>& offset) {
        PlaneRestriction r;
        const auto& A = cf.quad();
        const auto qm = A.congruence(map);
        r.q = {qm(0, 0), qm(0, 1), qm(1, 1)};
        std::array<double, 4> ao{};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) ao[i] += A(i, j) * offset[j];
        double oao = 0.0, co = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            oao += offset[i] * ao[i];
            co += cf.phase()[i] * offset[i];
        }
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t i = 0; i < 4; ++i) {
                r.h[a] -= map(i, a) * ao[i];
                r.k[a] += map(i, a) * cf.phase()[i];
            }
        r.c0 = Complex(-0.5 * oao, co);
        std::vector<Complex> off(offset.begin(), offset.end());
        r.poly = cf.poly().compose(map, off);
        return r;
    }

    friend PlaneRestriction operator*(const PlaneRestriction& a, const PlaneRestriction& b) {
        PlaneRestriction r;
        for (std::size_t i = 0; i < 3; ++i) r.q[i] = a.q[i] + b.q[i];
        for (std::size_t i = 0; i < 2; ++i) {
            r.h[i] = a.h[i] + b.h[i];
            r.k[i] = a.k[i] + b.k[i];
        }
        r.c0 = a.c0 + b.c0;
        r.poly = a.poly * b.poly;
        return r;
    }

    Complex operator()(double xi, double ups) const {
        const double w[2] = {xi, ups};
        const double re = -0.5 * (q[0] * xi * xi + 2.0 * q[1] * xi * ups + q[2] * ups * ups) + h[0] * xi + h[1] * ups;
        const double im = k[0] * xi + k[1] * ups;
        return poly.evaluate(std::span<const double>(w, 2)) * std::exp(Complex(re, im) + c0);
    }

    // Values on the tensor grid xs x ys, row-major in xs.
    void tabulate(const std::vector<double>& xs, const std::vector<double>& ys, std::vector<Complex>& out) const {
        unsigned dx = 0, dy = 0;
        for (const auto& t : poly.terms()) {
            dx = std::max<unsigned>(dx, t.exponent[0]);
            dy = std::max<unsigned>(dy, t.exponent[1]);
        }
        // coefficient table c[a][b] of xi^a ups^b
        std::vector<Complex> c((dx + 1) * (dy + 1));
        for (const auto& t : poly.terms()) c[t.exponent[0] * (dy + 1) + t.exponent[1]] += t.coefficient;
        out.assign(xs.size() * ys.size(), {});
        std::vector<Complex> row(dy + 1);
        std::vector<double> ypow(ys.size() * (dy + 1));
        for (std::size_t j = 0; j < ys.size(); ++j) {
            double p = 1.0;
            for (unsigned b = 0; b <= dy; ++b, p *= ys[j]) ypow[j * (dy + 1) + b] = p;
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double x = xs[i];
            std::fill(row.begin(), row.end(), Complex{});
            double p = 1.0;
            for (unsigned a = 0; a <= dx; ++a, p *= x)
                for (unsigned b = 0; b <= dy; ++b) row[b] += c[a * (dy + 1) + b] * p;
            for (std::size_t j = 0; j < ys.size(); ++j) {
                const double y = ys[j];
                Complex pv{};
                for (unsigned b = 0; b <= dy; ++b) pv += row[b] * ypow[j * (dy + 1) + b];
                const double re = -0.5 * (q[0] * x * x + 2.0 * q[1] * x * y + q[2] * y * y) + h[0] * x + h[1] * y;
                const double im = k[0] * x + k[1] * y;
                out[i * ys.size() + j] = pv * std::exp(Complex(re, im) + c0);
            }
        }
    }
};

// Composite 15-point Kronrod rule on [lo, hi] split into `panels` equal pieces.
struct CompositeRule {
    std::vector<double> nodes, weights;

    CompositeRule(double lo, double hi, std::size_t panels) {
        const auto& rule = numerics::detail::gk15();
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double center = lo + (static_cast<double>(p) + 0.5) * width;
            for (std::size_t i = 0; i < numerics::kRuleSize; ++i) {
                nodes.push_back(center + 0.5 * width * rule.nodes[i]);
                weights.push_back(0.5 * width * rule.kronrod[i]);
            }
        }
    }
};

class MeasurementIntegrand {
public:
    // bell_args are the kept-mode arguments (z1, z2, z3, z4) of the conditional CF.
    MeasurementIntegrand(const GaussPolyCF& input12, const GaussPolyCF& resource34, const ApparatusParams& app,
                         const std::array<double, 4>& bell_args) {
        if (input12.num_vars() != 4 || resource34.num_vars() != 4)
            throw ContractViolation("measurement integrand: input and resource must be two-mode CFs");
        const double s2 = std::numbers::sqrt2;
        const Matrix m12(4, 2, {0.0, 0.0, 0.0, 0.0, app.T2 / s2, 0.0, 0.0, app.T3 / s2});
        const Matrix m34(4, 2, {app.T2 / s2, 0.0, 0.0, -app.T3 / s2, 0.0, 0.0, 0.0, 0.0});
        const std::array<double, 4> o12 = {bell_args[0], bell_args[1], 0.0, 0.0};
        const std::array<double, 4> o34 = {0.0, 0.0, bell_args[2], bell_args[3]};
        f_ = PlaneRestriction::from(input12, m12, o12) * PlaneRestriction::from(resource34, m34, o34);
        f_.q[0] += 0.5 * app.R2_squared();
        f_.q[2] += 0.5 * app.R3_squared();

        const double det = f_.q[0] * f_.q[2] - f_.q[1] * f_.q[1];
        if (!(f_.q[0] > 0.0) || !(det > 1e-14 * f_.q[0] * f_.q[2]))
            throw DivergentIntegral("measurement integrand: Gaussian core is not positive definite", 1);
        cov_ = {f_.q[2] / det, -f_.q[1] / det, f_.q[0] / det};
        center_ = {cov_[0] * f_.h[0] + cov_[1] * f_.h[1], cov_[1] * f_.h[0] + cov_[2] * f_.h[1]};
    }

    const PlaneRestriction& restriction() const noexcept { return f_; }

    Complex operator()(double xi, double ups) const { return f_(xi, ups); }

    std::pair<double, double> xi_range(double sigmas) const {
        const double s = sigmas * std::sqrt(cov_[0]);
        return {center_[0] - s, center_[0] + s};
    }
    std::pair<double, double> ups_range(double sigmas) const {
        const double s = sigmas * std::sqrt(cov_[2]);
        return {center_[1] - s, center_[1] + s};
    }

    // J decays in (pt, -xt) like a Gaussian with covariance Q centred at -k.
    std::pair<double, double> xt_range(double sigmas) const {
        const double s = sigmas * std::sqrt(f_.q[2]);
        return {f_.k[1] - s, f_.k[1] + s};
    }
    std::pair<double, double> pt_range(double sigmas) const {
        const double s = sigmas * std::sqrt(f_.q[0]);
        return {-f_.k[0] - s, -f_.k[0] + s};
    }

    // J carries the phase e^{i (pt c_xi - xt c_ups)} from the shifted core c.
    double center_frequency_xt() const { return center_[1]; }
    double center_frequency_pt() const { return center_[0]; }

private:
    PlaneRestriction f_;
    std::array<double, 3> cov_{};
    std::array<double, 2> center_{};
};

// J at a block of outcomes. The composite rule is refined uniformly until
// two successive resolutions agree to abs_tol at every outcome; the finer
// result is kept.
class OutcomeTransform {
public:
    OutcomeTransform(const MeasurementIntegrand& f, const OracleOptions& options)
        : f_(f), options_(options), xi_box_(f.xi_range(options.inner_sigmas)),
          ups_box_(f.ups_range(options.inner_sigmas)) {}

    // out[a * pts.size() + b] = J(xts[a], pts[b])
    void evaluate(std::span<const double> xts, std::span<const double> pts, double abs_tol,
                  std::span<Complex> out) {
        double fx = 0.0, fp = 0.0;
        for (double x : xts) fx = std::max(fx, std::abs(x - f_.restriction().k[1]));
        for (double p : pts) fp = std::max(fp, std::abs(p + f_.restriction().k[0]));
        const std::size_t cap = options_.max_inner_panels;
        std::size_t n_xi = numerics::dyadic_divisions(xi_box_.second - xi_box_.first, fp, 4.0, cap);
        std::size_t n_up = numerics::dyadic_divisions(ups_box_.second - ups_box_.first, fx, 4.0, cap);
        std::vector<Complex> coarse(out.size());
        evaluate_on(grid(n_xi, n_up), xts, pts, coarse);
        while (true) {
            if (n_xi >= cap && n_up >= cap) {
                std::ostringstream os;
                os << "oracle: measurement integral did not converge within " << cap << " panels per axis";
                throw numerics::QuadratureError(os.str(), numerics::QuadratureResult{coarse[0], 0.0, 0, 0});
            }
            n_xi = std::min(2 * n_xi, cap);
            n_up = std::min(2 * n_up, cap);
            evaluate_on(grid(n_xi, n_up), xts, pts, out);
            double err = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) err = std::max(err, std::abs(out[i] - coarse[i]));
            if (err <= abs_tol) return;
            std::copy(out.begin(), out.end(), coarse.begin());
        }
    }

private:
    struct Grid {
        CompositeRule xi, ups;
        std::vector<Complex> weighted;  // F(xi_i, ups_j) * w_i * w_j
    };

    const Grid& grid(std::size_t n_xi, std::size_t n_up) {
        const auto key = std::make_pair(n_xi, n_up);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Grid g{CompositeRule(xi_box_.first, xi_box_.second, n_xi), CompositeRule(ups_box_.first, ups_box_.second, n_up),
               {}};
        f_.restriction().tabulate(g.xi.nodes, g.ups.nodes, g.weighted);
        const std::size_t nj = g.ups.nodes.size();
        for (std::size_t i = 0; i < g.xi.nodes.size(); ++i)
            for (std::size_t j = 0; j < nj; ++j) g.weighted[i * nj + j] *= g.xi.weights[i] * g.ups.weights[j];
        return cache_.emplace(key, std::move(g)).first->second;
    }

    static void evaluate_on(const Grid& g, std::span<const double> xts, std::span<const double> pts,
                            std::span<Complex> out) {
        const std::size_t ni = g.xi.nodes.size(), nj = g.ups.nodes.size();
        const std::size_t na = xts.size(), nb = pts.size();
        // eu[a][j] = e^{-i xt_a ups_j},  ex[b][i] = e^{i xi_i pt_b}
        std::vector<Complex> eu(na * nj), ex(nb * ni);
        for (std::size_t a = 0; a < na; ++a)
            for (std::size_t j = 0; j < nj; ++j) eu[a * nj + j] = std::polar(1.0, -xts[a] * g.ups.nodes[j]);
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t i = 0; i < ni; ++i) ex[b * ni + i] = std::polar(1.0, g.xi.nodes[i] * pts[b]);

        // h[a][i] = sum_j Fw[i][j] eu[a][j]
        std::vector<Complex> h(na * ni);
        for (std::size_t i = 0; i < ni; ++i) {
            const Complex* row = &g.weighted[i * nj];
            for (std::size_t a = 0; a < na; ++a) {
                const Complex* e = &eu[a * nj];
                Complex acc{};
                for (std::size_t j = 0; j < nj; ++j) acc += row[j] * e[j];
                h[a * ni + i] = acc;
            }
        }
        for (std::size_t a = 0; a < na; ++a)
            for (std::size_t b = 0; b < nb; ++b) {
                const Complex* e = &ex[b * ni];
                const Complex* hh = &h[a * ni];
                Complex acc{};
                for (std::size_t i = 0; i < ni; ++i) acc += e[i] * hh[i];
                out[a * nb + b] = acc;
            }
    }

    const MeasurementIntegrand& f_;
    OracleOptions options_;
    std::pair<double, double> xi_box_, ups_box_;
    std::map<std::pair<std::size_t, std::size_t>, Grid> cache_;
};

inline Complex measurement_transform(const MeasurementIntegrand& f, double xt, double pt, double tol,
                                     double abs_tol = 1e-300) {
    numerics::QuadratureSpec spec;
    const auto xr = f.xi_range(10.0), ur = f.ups_range(10.0);
    spec.box = {xr, ur};
    spec.rel_tol = tol;
    spec.abs_tol = abs_tol;
    spec.initial_divisions = {
        numerics::dyadic_divisions(xr.second - xr.first, std::abs(pt) + std::abs(f.restriction().k[0])),
        numerics::dyadic_divisions(ur.second - ur.first, std::abs(xt) + std::abs(f.restriction().k[1]))};
    auto integrand = [&](std::span<const double> w) {
        return f(w[0], w[1]) * std::polar(1.0, w[0] * pt - xt * w[1]);
    };
    return numerics::adaptive_integrate(integrand, spec).value;
}

inline std::array<double, 4> as_array4(std::span<const double> z, const char* who) {
    if (z.size() != 4) throw ContractViolation(std::string(who) + ": z must have 4 components");
    return {z[0], z[1], z[2], z[3]};
}

}  // namespace detail

// Conditional CF of modes (1, 4) for measured outcomes (xt, pt), before
// propagation and displacement.
inline Complex bell_conditional_cf(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                                   const ApparatusParams& app, double outcome_x, double outcome_p,
                                   std::span<const double> z, double tol) {
    if (!(tol > 0.0)) throw ContractViolation("bell_conditional_cf: tol must be positive");
    app.validate();
    const detail::MeasurementIntegrand fz(input12, resource34, app, detail::as_array4(z, "bell_conditional_cf"));
    const detail::MeasurementIntegrand f0(input12, resource34, app, {0.0, 0.0, 0.0, 0.0});
    return detail::measurement_transform(fz, outcome_x, outcome_p, tol) /
           detail::measurement_transform(f0, outcome_x, outcome_p, tol);
}

inline double outcome_distribution(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                                   const ApparatusParams& app, double outcome_x, double outcome_p, double tol) {
    if (!(tol > 0.0)) throw ContractViolation("outcome_distribution: tol must be positive");
    app.validate();
    const detail::MeasurementIntegrand f0(input12, resource34, app, {0.0, 0.0, 0.0, 0.0});
    const double two_pi = 2.0 * std::numbers::pi;
    const double scale = two_pi * two_pi;
    return std::max(0.0, detail::measurement_transform(f0, outcome_x, outcome_p, tol, tol * scale).real() / scale);
}

struct OraclePoint {
    Complex value;
    double error = 0.0;
    std::size_t outer_regions = 0;
};

inline OraclePoint oracle_swapped_point_report(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                                               const ApparatusParams& app, std::span<const double> z,
                                               const OracleOptions& options = {}) {
    if (!(options.tol > 0.0)) throw ContractViolation("oracle_swapped_point: tol must be positive");
    app.validate();
    const auto zz = detail::as_array4(z, "oracle_swapped_point");
    const double d1 = std::exp(-0.5 * app.tau1), d4 = std::exp(-0.5 * app.tau4);
    const detail::MeasurementIntegrand f(input12, resource34, app, {d1 * zz[0], d1 * zz[1], d4 * zz[2], d4 * zz[3]});
    detail::OutcomeTransform transform(f, options);

    // Displacements lambda1 = -g1 (xt - i pt), lambda4 = g4 (xt + i pt) contribute
    // exp(-i sqrt2 xt (g1 p1 - g4 p4) - i sqrt2 pt (g1 x1 + g4 x4)).
    const double sign = options.flip_displacement_phase ? -1.0 : 1.0;
    const double wx = -sign * std::numbers::sqrt2 * (app.g1 * zz[1] - app.g4 * zz[3]);
    const double wp = -sign * std::numbers::sqrt2 * (app.g1 * zz[0] + app.g4 * zz[2]);

    const auto xr = f.xt_range(options.outer_sigmas);
    const auto pr = f.pt_range(options.outer_sigmas);
    const double area = (xr.second - xr.first) * (pr.second - pr.first);
    const double two_pi = 2.0 * std::numbers::pi;
    const double inner_tol = 0.1 * options.tol * two_pi * two_pi / area;

    numerics::QuadratureSpec spec;
    spec.box = {xr, pr};
    spec.abs_tol = 0.5 * options.tol;
    spec.rel_tol = 1e-14;
    spec.max_subdivisions = options.max_outer_regions;
    // The displacement phase largely undoes the oscillation J inherits from
    // the shifted core; what is left sets the starting partition.
    spec.initial_divisions = {
        numerics::dyadic_divisions(xr.second - xr.first, wx - f.center_frequency_xt(), 2.0, 64),
        numerics::dyadic_divisions(pr.second - pr.first, wp + f.center_frequency_pt(), 2.0, 64)};

    auto grid = [&](const numerics::GridCell& cell, std::span<Complex> out) {
        const std::span<const double> xts(cell.nodes[0].data(), numerics::kRuleSize);
        const std::span<const double> pts(cell.nodes[1].data(), numerics::kRuleSize);
        transform.evaluate(xts, pts, inner_tol, out);
        for (std::size_t a = 0; a < numerics::kRuleSize; ++a)
            for (std::size_t b = 0; b < numerics::kRuleSize; ++b)
                out[a * numerics::kRuleSize + b] *= std::polar(1.0 / (two_pi * two_pi), wx * xts[a] + wp * pts[b]);
    };
    const auto result = numerics::adaptive_integrate_grid(grid, spec);

    const double k1 = (1.0 - std::exp(-app.tau1)) * (0.5 + app.nth1);
    const double k4 = (1.0 - std::exp(-app.tau4)) * (0.5 + app.nth4);
    const double thermal =
        std::exp(-0.5 * (k1 * (zz[0] * zz[0] + zz[1] * zz[1]) + k4 * (zz[2] * zz[2] + zz[3] * zz[3])));
    return {result.value * thermal, result.error * thermal, result.regions};
}

inline Complex oracle_swapped_point(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                                    const ApparatusParams& app, std::span<const double> z,
                                    const OracleOptions& options = {}) {
    return oracle_swapped_point_report(input12, resource34, app, z, options).value;
}

inline Complex oracle_swapped_point(const GaussPolyCF& input12, const GaussPolyCF& resource34,
                                    const ApparatusParams& app, const std::vector<double>& z,
                                    const OracleOptions& options = {}) {
    return oracle_swapped_point(input12, resource34, app, std::span<const double>(z), options);
}

// Teleportation fidelity of the swapped state with every CF value taken from
// the oracle: a Gauss-Hermite product rule of the given order over (x, p).
// Points come in (z, -z) pairs whose values are conjugate, so half suffice.
inline double oracle_fidelity(const GaussPolyCF& input12, const GaussPolyCF& resource34, const ApparatusParams& app,
                              const OracleOptions& options = {}, std::size_t order = 16) {
    if (order % 2 != 0) throw ContractViolation("oracle_fidelity: order must be even");
    const auto [t, w] = numerics::gauss_hermite(order);
    double sum = 0.0;
    for (std::size_t i = 0; i < order / 2; ++i)
        for (std::size_t j = 0; j < order; ++j) {
            const double x = std::numbers::sqrt2 * t[i], p = std::numbers::sqrt2 * t[j];
            const std::vector<double> z = {x, -p, x, p};
            sum += 2.0 * w[i] * w[j] * oracle_swapped_point(input12, resource34, app, z, options).real();
        }
    return 2.0 * sum / (2.0 * std::numbers::pi);
}

}  // namespace cvswap
