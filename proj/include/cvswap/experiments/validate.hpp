#pragma once

// Self-check suite behind `cvswap validate`. Quick runs the property checks
// and a single oracle reduction; full adds the dual-path comparisons.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvswap/fock.hpp"
#include "cvswap/optimizer.hpp"
#include "cvswap/swap_oracle.hpp"
#include "cvswap/swapping.hpp"
#include "cvswap/teleportation.hpp"
#include "cvswap/experiments/sweep.hpp"

namespace cvswap::experiments {

enum class ValidationLevel { Quick, Full };

struct ValidationOptions {
    ValidationLevel level = ValidationLevel::Quick;
    double oracle_tol = 1e-5;
    bool flip_displacement_phase = false;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double residue = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;
    std::string detail;
};

struct ValidationReport {
    ValidationOptions options;
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }

    nlohmann::ordered_json to_json() const {
        auto j = manifest_header();
        j["level"] = options.level == ValidationLevel::Full ? "full" : "quick";
        j["oracle_tol"] = options.oracle_tol;
        j["mutation_displacement_phase"] = options.flip_displacement_phase;
        j["passed"] = passed();
        auto arr = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json e;
            e["name"] = c.name;
            e["passed"] = c.passed;
            e["residue"] = c.residue;
            e["threshold"] = c.threshold;
            e["seconds"] = c.seconds;
            if (!c.detail.empty()) e["detail"] = c.detail;
            arr.push_back(e);
        }
        j["checks"] = arr;
        return j;
    }
};

namespace detail {

inline SqueezedBellParams random_sb(std::mt19937_64& rng, double r_max) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {r_max * u(rng), 2.0 * std::numbers::pi * u(rng), std::numbers::pi * u(rng),
            2.0 * std::numbers::pi * u(rng)};
}

inline std::vector<double> random_z(std::mt19937_64& rng, std::size_t n, double half_width) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    std::vector<double> z(n);
    for (auto& v : z) v = u(rng);
    return z;
}

// Runs body (which returns the worst residue) and times it.
inline CheckResult timed_check(const std::string& name, double threshold, const std::function<double()>& body) {
    CheckResult c;
    c.name = name;
    c.threshold = threshold;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.residue = body();
        c.passed = std::isfinite(c.residue) && c.residue <= threshold;
    } catch (const std::exception& e) {
        c.residue = std::numeric_limits<double>::infinity();
        c.passed = false;
        c.detail = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

}  // namespace detail

inline ValidationReport validate(const ValidationOptions& options = {}) {
    ValidationReport rep;
    rep.options = options;
    OracleOptions oracle;
    oracle.tol = options.oracle_tol;
    oracle.flip_displacement_phase = options.flip_displacement_phase;

    rep.checks.push_back(detail::timed_check("state_normalisation_and_hermiticity", 1e-12, [] {
        std::mt19937_64 rng(101);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto cf = sb_cf(detail::random_sb(rng, 1.5));
            worst = std::max(worst, std::abs(eval(cf, std::vector<double>(4, 0.0)) - 1.0));
            for (int i = 0; i < 20; ++i) {
                auto z = detail::random_z(rng, 4, 3.0);
                const auto v = eval(cf, z);
                for (auto& x : z) x = -x;
                worst = std::max(worst, std::abs(eval(cf, z) - std::conj(v)));
            }
        }
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("state_modulus_bound", 1e-10, [] {
        std::mt19937_64 rng(102);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto cf = sb_cf(detail::random_sb(rng, 1.5));
            for (int i = 0; i < 20; ++i) worst = std::max(worst, std::abs(eval(cf, detail::random_z(rng, 4, 4.0))) - 1.0);
        }
        return std::max(worst, 0.0);
    }));

    rep.checks.push_back(detail::timed_check("ideal_reduction_closed_form", 1e-12, [] {
        std::mt19937_64 rng(103);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const auto in = sb_cf(detail::random_sb(rng, 1.5));
            const auto res = sb_cf(detail::random_sb(rng, 1.5));
            const auto full = swapped_cf(in, res, kIdealApparatus);
            const auto ideal = ideal_swapped_cf(in, res);
            for (int i = 0; i < 20; ++i) {
                const auto z = detail::random_z(rng, 4, 3.0);
                worst = std::max(worst, std::abs(eval(full, z) - eval(ideal, z)));
            }
        }
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("twin_beam_reference_fidelity", 1e-9, [] {
        double worst = 0.0;
        for (double r : {0.0, 0.5, 1.0, 1.5})
            worst = std::max(worst, std::abs(direct_resource_fidelity(sb_cf(preset_params(StateFamily::TB, r, std::numbers::pi))) -
                                             1.0 / (1.0 + std::exp(-2.0 * r))));
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("epr_transparency", 1e-4, [] {
        const auto res = sb_cf(preset_params(StateFamily::TB, 6.0, std::numbers::pi));
        double worst = 0.0;
        for (const SqueezedBellParams& p :
             {preset_params(StateFamily::TB, 0.8, std::numbers::pi), preset_params(StateFamily::PS, 0.8, std::numbers::pi),
              SqueezedBellParams{0.8, std::numbers::pi, 0.3, 0.0}}) {
            const auto in = sb_cf(p);
            worst = std::max(worst, std::abs(fidelity(swapped_cf(in, res, kIdealApparatus)) - direct_resource_fidelity(in)));
        }
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("gain_reduction", 1e-9, [] {
        double worst = 0.0;
        const auto in = sb_cf({0.7, std::numbers::pi, 0.6, 0.0});
        const auto res = sb_cf({0.9, std::numbers::pi, 1.1, 0.0});
        for (const auto& app : {kIdealApparatus, realistic_apparatus()}) {
            const double f0 = fidelity(swapped_cf(in, res, app.with_gains(0.0, 0.9)));
            for (const auto& [g1, g4] : {std::pair{0.45, 0.45}, std::pair{0.9, 0.0}, std::pair{-0.3, 1.2}})
                worst = std::max(worst, std::abs(fidelity(swapped_cf(in, res, app.with_gains(g1, g4))) - f0));
        }
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("reduced_fidelity_path", 1e-12, [] {
        std::mt19937_64 rng(104);
        std::uniform_real_distribution<double> g(0.2, 1.8);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const auto a = detail::random_sb(rng, 1.5), b = detail::random_sb(rng, 1.5);
            const auto app = (k % 2 ? realistic_apparatus() : kIdealApparatus).with_gains(0.0, g(rng));
            worst = std::max(worst, std::abs(swap_fidelity(a, b, app) - fidelity(swapped_cf(sb_cf(a), sb_cf(b), app))));
        }
        return worst;
    }));

    rep.checks.push_back(detail::timed_check("coherent_amplitude_cancellation", 1e-8, [] {
        const auto sw = swapped_cf(sb_cf({0.6, std::numbers::pi, 0.4, 0.0}),
                                   sb_cf(preset_params(StateFamily::TB, 1.0, std::numbers::pi)), realistic_apparatus());
        const double f = fidelity(sw);
        double worst = 0.0;
        for (Complex beta : {Complex(0.0), Complex(1.0), Complex(2.0, 3.0)})
            worst = std::max(worst, std::abs(fidelity_integral_with_input(sw, {beta}) - f));
        return worst;
    }));

    // Oracle at an ideal-apparatus point against the reduced closed form.
    rep.checks.push_back(detail::timed_check("ideal_reduction_oracle", 1e-4, [&] {
        const auto in = sb_cf(preset_params(StateFamily::TB, 0.5, std::numbers::pi));
        const auto res = sb_cf(preset_params(StateFamily::TB, 1.0, std::numbers::pi));
        const auto ideal = ideal_swapped_cf(in, res);
        double worst = 0.0;
        for (const auto& z : {std::vector<double>{0.5, -0.3, 0.2, 0.7}, std::vector<double>{-0.4, 0.6, 0.8, 0.1}})
            worst = std::max(worst, std::abs(oracle_swapped_point(in, res, kIdealApparatus, z, oracle) - eval(ideal, z)));
        return worst;
    }));

    if (options.level == ValidationLevel::Full) {
        rep.checks.push_back(detail::timed_check("fock_state_oracle", 1e-6, [] {
            std::mt19937_64 rng(105);
            double worst = 0.0;
            for (int k = 0; k < 10; ++k) {
                const auto p = detail::random_sb(rng, 1.0);
                const auto z = detail::random_z(rng, 4, 3.0);
                worst = std::max(worst, std::abs(eval(sb_cf(p), z) - fock::fock_cf_oracle(p, z, 40)));
            }
            return worst;
        }));

        const double pi = std::numbers::pi;
        struct OracleCase {
            const char* name;
            SqueezedBellParams in, res;
            ApparatusParams app;
        };
        const std::vector<OracleCase> configs{
            {"TB/TB ideal", preset_params(StateFamily::TB, 0.5, pi), preset_params(StateFamily::TB, 1.0, pi), kIdealApparatus},
            {"PS/TB realistic", preset_params(StateFamily::PS, 0.7, pi), preset_params(StateFamily::TB, 1.0, pi),
             realistic_apparatus()},
            {"SB/SB realistic", {0.6, pi, 0.4, 0.0}, {0.8, pi, 1.2, 0.0}, realistic_apparatus().with_gains(0.2, 0.7)},
        };
        for (const auto& c : configs) {
            rep.checks.push_back(detail::timed_check(std::string("oracle_cf ") + c.name, 1e-4, [&] {
                const auto in = sb_cf(c.in), res = sb_cf(c.res);
                const auto closed = swapped_cf(in, res, c.app);
                std::mt19937_64 rng(106);
                double worst = 0.0;
                for (int i = 0; i < 3; ++i) {
                    const auto z = detail::random_z(rng, 4, 1.5);
                    worst = std::max(worst, std::abs(oracle_swapped_point(in, res, c.app, z, oracle) - eval(closed, z)));
                }
                return worst;
            }));
        }
        rep.checks.push_back(detail::timed_check("oracle_fidelity PS/TB realistic", 1e-4, [&] {
            const auto in = sb_cf(configs[1].in), res = sb_cf(configs[1].res);
            return std::abs(oracle_fidelity(in, res, configs[1].app, oracle) - fidelity(swapped_cf(in, res, configs[1].app)));
        }));

        rep.checks.push_back(detail::timed_check("superset_dominance", 1e-9, [] {
            double worst = 0.0;
            for (double r12 : {0.2, 1.0, 1.8}) {
                Scenario s;
                s.r12 = r12;
                s.r34 = 1.0;
                s.resource_family = StateFamily::TB;
                s.input_family = StateFamily::SB;
                const double sb = optimize(s).best_fidelity;
                s.input_family = StateFamily::PS;
                const double ps = optimize(s).best_fidelity;
                s.input_family = StateFamily::TB;
                const double tb = optimize(s).best_fidelity;
                worst = std::max(worst, std::max(ps, tb) - sb);
            }
            return std::max(worst, 0.0);
        }));
    }
    return rep;
}

}  // namespace cvswap::experiments
