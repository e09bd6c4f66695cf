#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cvswap/errors.hpp"

namespace cvswap::numerics {

struct SimplexOptions {
    std::size_t budget = 500;
    // Converged once every vertex lies within this distance of the best one.
    double diameter_tol = 1e-6;
};

struct SimplexResult {
    std::vector<double> point;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Nelder-Mead with the standard coefficients (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). f may return +inf to mark excluded points.
// The starting point is a vertex of the initial simplex, so the returned value
// never exceeds f(start).
template <typename Fn>
SimplexResult simplex_minimize(Fn&& f, std::span<const double> start, std::span<const double> scale,
                               const SimplexOptions& options = {}) {
    const std::size_t k = start.size();
    if (k == 0 || k > 3) throw ContractViolation("simplex_minimize: dimension must be 1..3");
    if (scale.size() != k) throw ContractViolation("simplex_minimize: scale size mismatch");

    SimplexResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return static_cast<double>(f(std::span<const double>(x)));
    };

    std::vector<std::vector<double>> vertex(k + 1, std::vector<double>(start.begin(), start.end()));
    std::vector<double> value(k + 1);
    value[0] = eval(vertex[0]);
    if (!std::isfinite(value[0])) throw ContractViolation("simplex_minimize: f must be finite at start");
    for (std::size_t i = 0; i < k; ++i) {
        vertex[i + 1][i] += scale[i];
        value[i + 1] = eval(vertex[i + 1]);
    }

    std::vector<std::size_t> order(k + 1);
    std::vector<double> centroid(k), trial(k), trial2(k);
    auto point_at = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
        for (std::size_t j = 0; j < k; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[k - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= k; ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < k; ++j) d2 += (vertex[i][j] - vertex[best][j]) * (vertex[i][j] - vertex[best][j]);
            diameter = std::max(diameter, std::sqrt(d2));
        }
        if (diameter < options.diameter_tol) {
            result.converged = true;
            break;
        }
        if (result.evaluations + 2 > options.budget) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < k; ++j) centroid[j] += vertex[i][j] / static_cast<double>(k);
        }

        point_at(-1.0, vertex[worst], trial);
        const double fr = eval(trial);
        if (fr < value[best]) {
            point_at(-2.0, vertex[worst], trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                vertex[worst] = trial2;
                value[worst] = fe;
            } else {
                vertex[worst] = trial;
                value[worst] = fr;
            }
            continue;
        }
        if (fr < value[second]) {
            vertex[worst] = trial;
            value[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflection improved on the worst, inside otherwise.
        const bool outside = fr < value[worst];
        point_at(outside ? -0.5 : 0.5, vertex[worst], trial2);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : value[worst])) {
            vertex[worst] = trial2;
            value[worst] = fc;
            continue;
        }
        if (result.evaluations + k > options.budget) break;
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < k; ++j) vertex[i][j] = vertex[best][j] + 0.5 * (vertex[i][j] - vertex[best][j]);
            value[i] = eval(vertex[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= k; ++i)
        if (value[i] < value[best]) best = i;
    result.point = vertex[best];
    result.value = value[best];
    return result;
}

}  // namespace cvswap::numerics
