#pragma once

// Maximisation of the teleportation fidelity over the superposition angles of
// squeezed Bell inputs/resources and the total gain g1 + g4.
//
// Phases are fixed to phi = pi for every state and theta = 0 for the generic
// family; named families take their (delta, theta) from preset_params().

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvswap/errors.hpp"
#include "cvswap/numerics/simplex.hpp"
#include "cvswap/states.hpp"
#include "cvswap/swapping.hpp"
#include "cvswap/teleportation.hpp"

namespace cvswap {

inline constexpr double kFixedSqueezingPhase = std::numbers::pi;

enum class Constraint { None, Symmetric };

enum class FreeParam { Delta12, Delta34, Gain };

inline std::string_view to_string(FreeParam p) {
    switch (p) {
        case FreeParam::Delta12: return "delta12";
        case FreeParam::Delta34: return "delta34";
        case FreeParam::Gain: return "gain";
    }
    return "?";
}

inline FreeParam parse_free_param(std::string_view s) {
    if (s == "delta12") return FreeParam::Delta12;
    if (s == "delta34") return FreeParam::Delta34;
    if (s == "gain") return FreeParam::Gain;
    throw ContractViolation("unknown free parameter '" + std::string(s) + "'");
}

// g1 = fraction * g_tilde, g4 = g_tilde - g1.
struct GainSplit {
    double g_tilde = 1.0;
    double fraction_g1 = 0.0;

    std::pair<double, double> gains() const {
        const double g1 = fraction_g1 * g_tilde;
        return {g1, g_tilde - g1};
    }
};

struct Scenario {
    StateFamily input_family = StateFamily::TB;
    StateFamily resource_family = StateFamily::TB;
    double r12 = 0.0;
    double r34 = 0.0;
    ApparatusParams apparatus = kIdealApparatus;
    Constraint constraint = Constraint::None;
    // Empty means every parameter the families leave free.
    std::vector<FreeParam> free_params;
    // Values used for generic-family angles that are not optimised.
    double delta12 = 0.0;
    double delta34 = 0.0;
    // Rule for turning an optimised g_tilde into (g1, g4).
    double gain_fraction_g1 = 0.0;
    // Teleport through the input pair itself; resource and apparatus unused.
    bool direct = false;

    bool is_free(FreeParam p) const { return std::find(free_params.begin(), free_params.end(), p) != free_params.end(); }

    // Fills in default free parameters and applies the symmetric tie.
    Scenario resolved() const {
        Scenario s = *this;
        if (s.constraint == Constraint::Symmetric) {
            s.r34 = s.r12;
            s.delta34 = s.delta12;
        }
        if (s.free_params.empty()) {
            if (s.input_family == StateFamily::SB) s.free_params.push_back(FreeParam::Delta12);
            if (!s.direct && s.resource_family == StateFamily::SB && s.constraint == Constraint::None)
                s.free_params.push_back(FreeParam::Delta34);
            if (!s.direct) s.free_params.push_back(FreeParam::Gain);
        }
        std::sort(s.free_params.begin(), s.free_params.end());
        s.free_params.erase(std::unique(s.free_params.begin(), s.free_params.end()), s.free_params.end());
        return s;
    }

    void validate() const {
        if (!(r12 >= 0.0) || !(r34 >= 0.0) || !std::isfinite(r12) || !std::isfinite(r34))
            throw ParameterRangeError("Scenario: squeezing must be finite and non-negative");
        apparatus.validate();
        if (constraint == Constraint::Symmetric && input_family != resource_family)
            throw ContractViolation("Scenario: symmetric constraint needs equal input and resource families");
        if (constraint == Constraint::Symmetric && direct)
            throw ContractViolation("Scenario: symmetric constraint has no meaning without swapping");
        for (FreeParam p : free_params) {
            if (p == FreeParam::Delta12 && input_family != StateFamily::SB)
                throw ContractViolation("Scenario: delta12 is pinned by the input family");
            if (p == FreeParam::Delta34 && (resource_family != StateFamily::SB || direct))
                throw ContractViolation("Scenario: delta34 is pinned by the resource family");
            if (p == FreeParam::Delta34 && constraint == Constraint::Symmetric)
                throw ContractViolation("Scenario: delta34 is tied to delta12 by the symmetric constraint");
            if (p == FreeParam::Gain && direct) throw ContractViolation("Scenario: no gain without swapping");
        }
    }
};

inline SqueezedBellParams family_params(StateFamily family, double r, double delta) {
    if (family == StateFamily::SB) return {r, kFixedSqueezingPhase, delta, 0.0};
    return preset_params(family, r, kFixedSqueezingPhase);
}

// A point of the search space. Entries for parameters that are not free hold
// the scenario's fixed values.
struct ParamPoint {
    double delta12 = 0.0;
    double delta34 = 0.0;
    double g_tilde = 1.0;
};

inline ParamPoint fixed_point(const Scenario& s) {
    return {s.delta12, s.delta34, s.apparatus.g1 + s.apparatus.g4};
}

inline ApparatusParams apparatus_for(const Scenario& s, double g_tilde) {
    const auto [g1, g4] = GainSplit{g_tilde, s.gain_fraction_g1}.gains();
    return s.apparatus.with_gains(g1, g4);
}

// Fidelity integral of a resolved scenario at a parameter point, before the
// imaginary-residue check.
inline Complex scenario_fidelity_integral(const Scenario& s, const ParamPoint& p) {
    const double d34 = s.constraint == Constraint::Symmetric ? p.delta12 : p.delta34;
    const auto input = family_params(s.input_family, s.r12, p.delta12);
    if (s.direct) return direct_fidelity_integral(input);
    const double r34 = s.constraint == Constraint::Symmetric ? s.r12 : s.r34;
    const auto resource = family_params(s.resource_family, r34, d34);
    if (s.is_free(FreeParam::Gain)) return swap_fidelity_integral(input, resource, apparatus_for(s, p.g_tilde));
    return swap_fidelity_integral(input, resource, s.apparatus);
}

inline double scenario_fidelity(const Scenario& s, const ParamPoint& p) {
    return detail::real_fidelity(scenario_fidelity_integral(s, p), "scenario_fidelity");
}

struct TracePoint {
    std::vector<double> params;
    double value = 0.0;
};

struct OptimizationReport {
    double best_fidelity = 0.0;
    std::vector<std::pair<FreeParam, double>> argmax;
    std::size_t evaluations = 0;
    std::size_t excluded = 0;
    double grid_stage_best = 0.0;
    bool refined = false;
    bool converged = false;
    std::vector<TracePoint> trace;

    double value_of(FreeParam p) const {
        for (const auto& [k, v] : argmax)
            if (k == p) return v;
        throw ContractViolation("OptimizationReport: parameter was not optimised");
    }
};

struct OptimizerOptions {
    std::size_t delta_points = 33;  // on [0, pi), endpoint excluded
    std::size_t gain_points = 41;   // on [0, 2]
    double gain_max = 2.0;
    double tie_tol = 1e-12;
    numerics::SimplexOptions simplex{};
    bool keep_trace = false;
};

namespace detail {

inline ParamPoint make_point(const Scenario& s, std::span<const double> x) {
    ParamPoint p = fixed_point(s);
    for (std::size_t i = 0; i < s.free_params.size(); ++i) {
        switch (s.free_params[i]) {
            case FreeParam::Delta12: p.delta12 = x[i]; break;
            case FreeParam::Delta34: p.delta34 = x[i]; break;
            case FreeParam::Gain: p.g_tilde = x[i]; break;
        }
    }
    return p;
}

// -inf marks a point where the fidelity integral diverges.
inline double guarded_fidelity(const Scenario& s, std::span<const double> x) {
    try {
        return scenario_fidelity(s, make_point(s, x));
    } catch (const DivergentIntegral&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

inline OptimizationReport optimize(const Scenario& scenario, const OptimizerOptions& options = {}) {
    const Scenario s = scenario.resolved();
    s.validate();
    const std::size_t k = s.free_params.size();
    OptimizationReport report;

    if (k == 0) {
        report.best_fidelity = scenario_fidelity(s, fixed_point(s));
        report.grid_stage_best = report.best_fidelity;
        report.evaluations = 1;
        report.converged = true;
        return report;
    }

    // Axis grids in free-parameter order.
    std::vector<std::vector<double>> axes;
    std::vector<double> period(k, 0.0), norm(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> axis;
        if (s.free_params[i] == FreeParam::Gain) {
            for (std::size_t j = 0; j < options.gain_points; ++j)
                axis.push_back(options.gain_max * double(j) / double(options.gain_points - 1));
            norm[i] = options.gain_max;
        } else {
            for (std::size_t j = 0; j < options.delta_points; ++j)
                axis.push_back(std::numbers::pi * double(j) / double(options.delta_points));
            norm[i] = std::numbers::pi;
            period[i] = std::numbers::pi;
        }
        axes.push_back(std::move(axis));
    }

    // Grid stage, lexicographic order.
    std::vector<std::size_t> idx(k, 0);
    std::vector<double> x(k);
    std::vector<std::pair<std::vector<double>, double>> grid;
    while (true) {
        for (std::size_t i = 0; i < k; ++i) x[i] = axes[i][idx[i]];
        const double v = detail::guarded_fidelity(s, x);
        ++report.evaluations;
        if (!std::isfinite(v)) ++report.excluded;
        if (options.keep_trace) report.trace.push_back({x, v});
        grid.emplace_back(x, v);
        std::size_t d = k;
        while (d-- > 0) {
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
        }
        if (d == static_cast<std::size_t>(-1)) break;
    }
    double grid_max = -std::numeric_limits<double>::infinity();
    for (const auto& [pt, v] : grid) grid_max = std::max(grid_max, v);
    if (!std::isfinite(grid_max))
        throw DivergentIntegral("optimize: every point of the search domain is excluded", 0);
    // Lexicographically smallest point within tie_tol of the maximum; grid
    // order is already lexicographic.
    std::vector<double> start;
    for (const auto& [pt, v] : grid)
        if (v >= grid_max - options.tie_tol) {
            start = pt;
            break;
        }
    report.grid_stage_best = grid_max;

    // Refinement in normalised coordinates u = x / norm.
    auto to_physical = [&](std::span<const double> u) {
        std::vector<double> p(k);
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = u[i] * norm[i];
            if (period[i] > 0.0) {
                p[i] = std::fmod(p[i], period[i]);
                if (p[i] < 0.0) p[i] += period[i];
            }
        }
        return p;
    };
    auto objective = [&](std::span<const double> u) {
        const auto p = to_physical(u);
        for (std::size_t i = 0; i < k; ++i)
            if (period[i] == 0.0 && (p[i] < 0.0 || p[i] > options.gain_max))
                return std::numeric_limits<double>::infinity();
        const double v = detail::guarded_fidelity(s, p);
        if (options.keep_trace) report.trace.push_back({p, v});
        return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    };
    std::vector<double> u0(k), step(k);
    for (std::size_t i = 0; i < k; ++i) {
        u0[i] = start[i] / norm[i];
        step[i] = (axes[i][1] - axes[i][0]) / norm[i];
        // Step inward from the upper gain boundary.
        if (period[i] == 0.0 && start[i] + (axes[i][1] - axes[i][0]) > options.gain_max) step[i] = -step[i];
    }
    const auto result = numerics::simplex_minimize(objective, u0, step, options.simplex);
    report.evaluations += result.evaluations;
    report.converged = result.converged;

    std::vector<double> best = start;
    double best_value = grid_max;
    if (-result.value > grid_max) {
        best = to_physical(result.point);
        best_value = -result.value;
        report.refined = true;
    }
    report.best_fidelity = best_value;
    for (std::size_t i = 0; i < k; ++i) report.argmax.emplace_back(s.free_params[i], best[i]);
    return report;
}

// Parameter point at the reported optimum of a resolved scenario.
inline ParamPoint argmax_point(const Scenario& resolved, const OptimizationReport& report) {
    ParamPoint p = fixed_point(resolved);
    for (const auto& [k, v] : report.argmax) {
        switch (k) {
            case FreeParam::Delta12: p.delta12 = v; break;
            case FreeParam::Delta34: p.delta34 = v; break;
            case FreeParam::Gain: p.g_tilde = v; break;
        }
    }
    return p;
}

// Fidelity at one g_tilde for each (g1, g4) split, computed through the full
// four-variable swapped CF; true when all agree within 1e-9.
inline bool gain_invariance_check(const Scenario& scenario, double g_tilde,
                                  const std::vector<std::pair<double, double>>& splits, double tol = 1e-9) {
    const Scenario s = scenario.resolved();
    s.validate();
    if (s.direct) throw ContractViolation("gain_invariance_check: scenario has no swapping step");
    if (splits.empty()) throw ContractViolation("gain_invariance_check: no splits given");
    for (const auto& [g1, g4] : splits)
        if (std::abs(g1 + g4 - g_tilde) > 1e-12)
            throw ContractViolation("gain_invariance_check: every split must sum to g_tilde");
    const auto input = sb_cf(family_params(s.input_family, s.r12, s.delta12));
    const double d34 = s.constraint == Constraint::Symmetric ? s.delta12 : s.delta34;
    const double r34 = s.constraint == Constraint::Symmetric ? s.r12 : s.r34;
    const auto resource = sb_cf(family_params(s.resource_family, r34, d34));
    std::optional<double> first;
    bool same = true;
    for (const auto& [g1, g4] : splits) {
        const double f = fidelity(swapped_cf(input, resource, s.apparatus.with_gains(g1, g4)));
        if (!first) first = f;
        same = same && std::abs(f - *first) <= tol;
    }
    return same;
}

inline double relative_fidelity(double f_opt, double f_ref) {
    if (!(f_ref > 0.0)) throw ContractViolation("relative_fidelity: reference fidelity must be positive");
    return (f_opt - f_ref) / f_ref;
}

}  // namespace cvswap
