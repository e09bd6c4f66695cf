#pragma once

// Globally adaptive cubature over axis-aligned boxes in 1 to 4 dimensions.
//
// Each region is integrated with the tensor product of the 15-point
// Gauss-Kronrod rule; the embedded 7-point Gauss rule gives the error
// estimate. The worst region is bisected along the axis whose Gauss/Kronrod
// disagreement is largest. Regions are tracked in unit-cube coordinates, so
// every cell is a dyadic sub-box and two integrations over the same box visit
// bit-identical nodes. Integrands that are expensive but re-used across calls
// (see swap_oracle.hpp) key caches on those unit coordinates.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <numbers>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cvswap/errors.hpp"

namespace cvswap::numerics {

inline constexpr std::size_t kMaxQuadratureDim = 4;
inline constexpr std::size_t kRuleSize = 15;

namespace detail {

struct GaussKronrod15 {
    std::array<double, kRuleSize> nodes{};
    std::array<double, kRuleSize> kronrod{};
    std::array<double, kRuleSize> gauss{};
};

inline const GaussKronrod15& gk15() {
    static const GaussKronrod15 rule = [] {
        constexpr std::array<double, 8> xgk = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
        constexpr std::array<double, 8> wgk = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        // Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7].
        constexpr std::array<double, 4> wg = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
        GaussKronrod15 r;
        for (std::size_t k = 0; k < 8; ++k) {
            const double g = (k % 2 == 1) ? wg[k / 2] : 0.0;
            r.nodes[k] = -xgk[k];
            r.kronrod[k] = wgk[k];
            r.gauss[k] = g;
            r.nodes[14 - k] = xgk[k];
            r.kronrod[14 - k] = wgk[k];
            r.gauss[14 - k] = g;
        }
        return r;
    }();
    return rule;
}

}  // namespace detail

struct QuadratureSpec {
    std::vector<std::pair<double, double>> box;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 20000;
    // Optional initial partition per axis; use powers of two to keep cells dyadic.
    std::vector<std::size_t> initial_divisions;

    std::size_t dimension() const noexcept { return box.size(); }

    void validate() const {
        if (box.empty() || box.size() > kMaxQuadratureDim)
            throw ContractViolation("QuadratureSpec: dimension must be 1..4");
        for (const auto& [lo, hi] : box)
            if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
                throw ContractViolation("QuadratureSpec: bounds must be finite with hi > lo");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw ContractViolation("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions == 0) throw ContractViolation("QuadratureSpec: max_subdivisions must be positive");
        if (!initial_divisions.empty() && initial_divisions.size() != box.size())
            throw ContractViolation("QuadratureSpec: initial_divisions must match the dimension");
        for (std::size_t d : initial_divisions)
            if (d == 0) throw ContractViolation("QuadratureSpec: initial_divisions must be positive");
    }
};

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t regions = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult best)
        : std::runtime_error(what), best_(best) {}
    const QuadratureResult& best() const noexcept { return best_; }

private:
    QuadratureResult best_;
};

// The 15^dim tensor nodes of one region. Values are written row-major with
// axis 0 slowest.
struct GridCell {
    std::size_t dim = 0;
    std::array<std::array<double, kRuleSize>, kMaxQuadratureDim> nodes{};
    std::array<double, kMaxQuadratureDim> unit_lo{};
    std::array<double, kMaxQuadratureDim> unit_hi{};

    std::size_t size() const {
        std::size_t s = 1;
        for (std::size_t a = 0; a < dim; ++a) s *= kRuleSize;
        return s;
    }
};

// Smallest power of two k such that width / k spans at most `cycles` periods
// of a phase with angular frequency `frequency`.
inline std::size_t dyadic_divisions(double width, double frequency, double cycles = 2.0,
                                    std::size_t cap = 512) {
    const double f = std::abs(frequency);
    if (f == 0.0 || !(width > 0.0)) return 1;
    const double max_width = cycles * 2.0 * std::numbers::pi / f;
    std::size_t k = 1;
    while (width / static_cast<double>(k) > max_width && k < cap) k *= 2;
    return k;
}

namespace detail {

struct Region {
    std::array<double, kMaxQuadratureDim> lo{};
    std::array<double, kMaxQuadratureDim> hi{};
    std::complex<double> value;
    double error = 0.0;
    std::size_t split_axis = 0;
    std::size_t sequence = 0;
};

struct RegionOrder {
    bool operator()(const Region& a, const Region& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.sequence > b.sequence;
    }
};

template <typename GridFn>
void evaluate_region(GridFn& f, const QuadratureSpec& spec, Region& region,
                     std::vector<std::complex<double>>& values) {
    const auto& rule = gk15();
    const std::size_t dim = spec.dimension();
    GridCell cell;
    cell.dim = dim;
    std::array<std::array<double, kRuleSize>, kMaxQuadratureDim> wk{};
    std::array<std::array<double, kRuleSize>, kMaxQuadratureDim> ratio{};
    for (std::size_t a = 0; a < dim; ++a) {
        const auto [blo, bhi] = spec.box[a];
        const double x0 = blo + (bhi - blo) * region.lo[a];
        const double x1 = blo + (bhi - blo) * region.hi[a];
        const double center = 0.5 * (x0 + x1);
        const double half = 0.5 * (x1 - x0);
        for (std::size_t i = 0; i < kRuleSize; ++i) {
            cell.nodes[a][i] = center + half * rule.nodes[i];
            wk[a][i] = half * rule.kronrod[i];
            ratio[a][i] = rule.gauss[i] / rule.kronrod[i];
        }
        cell.unit_lo[a] = region.lo[a];
        cell.unit_hi[a] = region.hi[a];
    }
    const std::size_t n = cell.size();
    values.assign(n, {});
    f(cell, std::span<std::complex<double>>(values));

    std::complex<double> kron{}, gauss_full{};
    std::array<std::complex<double>, kMaxQuadratureDim> gauss_axis{};
    std::array<std::size_t, kMaxQuadratureDim> digit{};
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t rem = idx;
        for (std::size_t a = dim; a-- > 0;) {
            digit[a] = rem % kRuleSize;
            rem /= kRuleSize;
        }
        double wprod = 1.0;
        double gratio = 1.0;
        for (std::size_t a = 0; a < dim; ++a) {
            wprod *= wk[a][digit[a]];
            gratio *= ratio[a][digit[a]];
        }
        const std::complex<double> v = values[idx] * wprod;
        kron += v;
        if (gratio != 0.0) gauss_full += v * gratio;
        for (std::size_t a = 0; a < dim; ++a) {
            const double r = ratio[a][digit[a]];
            if (r != 0.0) gauss_axis[a] += v * r;
        }
    }
    region.value = kron;
    region.error = std::abs(kron - gauss_full);
    double worst = -1.0;
    for (std::size_t a = 0; a < dim; ++a) {
        const double e = std::abs(kron - gauss_axis[a]);
        const double width = region.hi[a] - region.lo[a];
        const double worst_width = worst < 0.0 ? 0.0 : region.hi[region.split_axis] - region.lo[region.split_axis];
        if (e > worst || (e == worst && width > worst_width)) {
            worst = e;
            region.split_axis = a;
        }
    }
}

}  // namespace detail

// Grid form: f(const GridCell&, std::span<std::complex<double>> out) fills the
// integrand on all tensor nodes of a cell.
template <typename GridFn>
QuadratureResult adaptive_integrate_grid(GridFn&& f, const QuadratureSpec& spec) {
    spec.validate();
    const std::size_t dim = spec.dimension();
    std::priority_queue<detail::Region, std::vector<detail::Region>, detail::RegionOrder> heap;
    std::vector<std::complex<double>> scratch;
    std::size_t sequence = 0;
    std::size_t evaluations = 0;
    std::complex<double> total{};
    double total_error = 0.0;

    std::array<std::size_t, kMaxQuadratureDim> divs{};
    std::size_t initial = 1;
    for (std::size_t a = 0; a < dim; ++a) {
        divs[a] = spec.initial_divisions.empty() ? 1 : spec.initial_divisions[a];
        initial *= divs[a];
    }
    for (std::size_t cell_index = 0; cell_index < initial; ++cell_index) {
        detail::Region r;
        std::size_t rem = cell_index;
        for (std::size_t a = dim; a-- > 0;) {
            const std::size_t i = rem % divs[a];
            rem /= divs[a];
            r.lo[a] = static_cast<double>(i) / static_cast<double>(divs[a]);
            r.hi[a] = static_cast<double>(i + 1) / static_cast<double>(divs[a]);
        }
        r.sequence = sequence++;
        detail::evaluate_region(f, spec, r, scratch);
        evaluations += scratch.size();
        total += r.value;
        total_error += r.error;
        heap.push(r);
    }

    auto converged = [&] { return total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (!converged()) {
        if (heap.size() >= spec.max_subdivisions) {
            std::ostringstream os;
            os << "adaptive_integrate: subdivision budget exhausted with estimate " << total
               << " and error " << total_error;
            throw QuadratureError(os.str(), QuadratureResult{total, total_error, evaluations, heap.size()});
        }
        detail::Region worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_error -= worst.error;
        const std::size_t a = worst.split_axis;
        const double mid = 0.5 * (worst.lo[a] + worst.hi[a]);
        detail::Region left = worst, right = worst;
        left.hi[a] = mid;
        right.lo[a] = mid;
        for (detail::Region* child : {&left, &right}) {
            child->sequence = sequence++;
            detail::evaluate_region(f, spec, *child, scratch);
            evaluations += scratch.size();
            total += child->value;
            total_error += child->error;
            heap.push(*child);
        }
    }

    // Re-sum to shed drift from the running updates.
    QuadratureResult result;
    result.regions = heap.size();
    result.evaluations = evaluations;
    std::vector<detail::Region> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.sequence < y.sequence; });
    for (const auto& r : all) {
        result.value += r.value;
        result.error += r.error;
    }
    return result;
}

// Pointwise form: f(std::span<const double> point) returns a real or complex value.
template <typename Fn>
QuadratureResult adaptive_integrate(Fn&& f, const QuadratureSpec& spec) {
    auto grid = [&f](const GridCell& cell, std::span<std::complex<double>> out) {
        std::array<double, kMaxQuadratureDim> point{};
        std::array<std::size_t, kMaxQuadratureDim> digit{};
        for (std::size_t idx = 0; idx < out.size(); ++idx) {
            std::size_t rem = idx;
            for (std::size_t a = cell.dim; a-- > 0;) {
                digit[a] = rem % kRuleSize;
                rem /= kRuleSize;
            }
            for (std::size_t a = 0; a < cell.dim; ++a) point[a] = cell.nodes[a][digit[a]];
            out[idx] = std::complex<double>(f(std::span<const double>(point.data(), cell.dim)));
        }
    };
    return adaptive_integrate_grid(grid, spec);
}

// n-point Gauss-Hermite rule for the weight exp(-t^2): nodes ascending.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(std::size_t n) {
    if (n == 0 || n > 200) throw ContractViolation("gauss_hermite: order must be 1..200");
    std::vector<double> x(n), w(n);
    const std::size_t m = (n + 1) / 2;
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(double(2 * n + 1)) - 1.85575 * std::pow(double(2 * n + 1), -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / double(j + 1)) * p2 - std::sqrt(double(j) / double(j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * double(n)) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        w[i] = 2.0 / (pp * pp);
    }
    // x[0..m) holds the positive half, largest first.
    std::vector<double> nodes(n), weights(n);
    for (std::size_t i = 0; i < m; ++i) {
        nodes[i] = -x[i];
        weights[i] = w[i];
        nodes[n - 1 - i] = x[i];
        weights[n - 1 - i] = w[i];
    }
    return {nodes, weights};
}

}  // namespace cvswap::numerics
