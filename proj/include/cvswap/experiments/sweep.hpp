#pragma once

// Optimised-fidelity sweeps over one squeezing axis. Each grid value runs one
// optimisation per curve; relative fidelities are formed per comparison.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cvswap/errors.hpp"
#include "cvswap/experiments/config.hpp"
#include "cvswap/experiments/csv.hpp"
#include "cvswap/optimizer.hpp"

namespace cvswap::experiments {

inline constexpr const char* kToolVersion = "0.3.0";

inline constexpr const char* kConventionSheet =
    "D(a)=exp(a a^+ - a^* a); chi(a)=Tr[rho D(a)]; x=(a+a^*)/sqrt2; p=i(a^*-a)/sqrt2; "
    "vacuum chi=exp(-(x^2+p^2)/4); [X,P]=i; variables (x1,p1,x2,p2,...); "
    "squeezer exp(-zeta a_h^+ a_k^+ + zeta^* a_h a_k); phi=pi; theta=0 for SB; "
    "F=(1/2pi) int chi_in(z) chi_tel(-z) dz";

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string convention_hash() {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(kConventionSheet)));
    return buf;
}

enum class SweepAxis { R12, R34, Symmetric };

inline std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::R12: return "r12";
        case SweepAxis::R34: return "r34";
        case SweepAxis::Symmetric: return "symmetric";
    }
    return "?";
}

inline SweepAxis parse_axis(std::string_view s) {
    if (s == "r12") return SweepAxis::R12;
    if (s == "r34") return SweepAxis::R34;
    if (s == "symmetric") return SweepAxis::Symmetric;
    throw ConfigError("axis must be r12, r34 or symmetric, got '" + std::string(s) + "'");
}

// "XswY" swaps input X with resource Y; a bare family name "X" teleports
// through the input pair directly.
struct CurveSpec {
    std::string label;
    Scenario scenario;
};

inline CurveSpec make_curve(const std::string& label, const Scenario& base) {
    CurveSpec c{label, base};
    const auto pos = label.find("sw");
    try {
        if (pos == std::string::npos) {
            c.scenario.input_family = parse_family(label);
            c.scenario.direct = true;
            c.scenario.constraint = Constraint::None;
        } else {
            c.scenario.input_family = parse_family(label.substr(0, pos));
            c.scenario.resource_family = parse_family(label.substr(pos + 2));
            c.scenario.direct = false;
        }
    } catch (const ContractViolation&) {
        throw ConfigError("bad curve label '" + label + "'");
    }
    return c;
}

// Relative fidelity (F_numerator - F_reference) / F_reference.
struct ComparisonSpec {
    std::string numerator;
    std::string reference;
    std::string label() const { return numerator + "/" + reference; }
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::R12;
    double start = 0.0;
    double stop = 2.0;
    double step = 0.05;
    std::vector<CurveSpec> curves;
    std::vector<ComparisonSpec> comparisons;
    std::string output;

    // start + i*step up to stop (inclusive within 1e-9 of a step).
    std::vector<double> grid() const {
        std::vector<double> g;
        if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) return g;
        const double n = std::floor((stop - start) / step + 1e-9);
        for (long i = 0; i <= static_cast<long>(n); ++i) g.push_back(start + double(i) * step);
        return g;
    }

    std::size_t curve_index(const std::string& label) const {
        for (std::size_t i = 0; i < curves.size(); ++i)
            if (curves[i].label == label) return i;
        throw ConfigError("comparison refers to unknown curve '" + label + "'");
    }

    void validate() const {
        if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("sweep step must be positive");
        if (grid().empty()) throw ConfigError("sweep grid is empty");
        if (start < 0.0) throw ConfigError("sweep axis must start at a non-negative squeezing");
        if (curves.empty()) throw ConfigError("sweep has no curves");
        for (std::size_t i = 0; i < curves.size(); ++i)
            for (std::size_t j = i + 1; j < curves.size(); ++j)
                if (curves[i].label == curves[j].label) throw ConfigError("duplicate curve '" + curves[i].label + "'");
        for (const auto& c : comparisons) {
            curve_index(c.numerator);
            curve_index(c.reference);
        }
    }

    // Scenario of curve i at axis value v; equal-family swaps on the
    // symmetric axis also tie delta34 to delta12.
    Scenario scenario_at(std::size_t i, double v) const {
        Scenario s = curves[i].scenario;
        switch (axis) {
            case SweepAxis::R12: s.r12 = v; break;
            case SweepAxis::R34: s.r34 = v; break;
            case SweepAxis::Symmetric:
                s.r12 = v;
                s.r34 = v;
                if (!s.direct && s.input_family == s.resource_family) s.constraint = Constraint::Symmetric;
                break;
        }
        return s.resolved();
    }
};

inline const std::set<std::string>& sweep_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = scenario_keys();
        k.insert({"axis", "start", "stop", "step", "curves", "compare", "output"});
        return k;
    }();
    return keys;
}

inline SweepSpec sweep_from_config(const Config& c) {
    c.require_known(sweep_keys());
    Config base_cfg = c;
    SweepSpec spec;
    spec.axis = parse_axis(c.get("axis", "r12"));
    spec.start = c.get_double("start", 0.0);
    spec.stop = c.get_double("stop", 2.0);
    spec.step = c.get_double("step", 0.05);
    spec.output = c.get("output", "sweep.csv");
    const Scenario base = scenario_from_config(base_cfg);
    const auto labels = detail::split(c.get("curves", ""), ',');
    for (const auto& l : labels) spec.curves.push_back(make_curve(l, base));
    for (const auto& comp : detail::split(c.get("compare", ""), ',')) {
        const auto parts = detail::split(comp, '/');
        if (parts.size() != 2) throw ConfigError("comparison '" + comp + "' is not A/B");
        spec.comparisons.push_back({parts[0], parts[1]});
    }
    spec.validate();
    return spec;
}

struct CurvePoint {
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<FreeParam, double>> argmax;
    std::size_t evaluations = 0;
    std::size_t excluded = 0;
    double grid_stage_best = std::numeric_limits<double>::quiet_NaN();
    bool refined = false;
    bool converged = false;
    double residue = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct SweepRow {
    double axis_value = 0.0;
    std::vector<CurvePoint> curves;
    std::vector<double> relative;
    std::string reason;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    // Free parameters per curve, in column order.
    std::vector<std::vector<FreeParam>> free_params;

    CsvTable table() const {
        CsvTable t;
        t.header.emplace_back(to_string(spec.axis));
        for (const auto& c : spec.curves) t.header.push_back("F_" + c.label);
        for (const auto& c : spec.comparisons) t.header.push_back("dF_" + c.label());
        for (std::size_t i = 0; i < spec.curves.size(); ++i)
            for (FreeParam p : free_params[i]) t.header.push_back(spec.curves[i].label + "_" + std::string(to_string(p)));
        t.header.emplace_back("reason");
        for (const auto& row : rows) {
            std::vector<std::string> cells;
            cells.push_back(format_number(row.axis_value));
            for (const auto& cp : row.curves) cells.push_back(format_number(cp.fidelity));
            for (double d : row.relative) cells.push_back(format_number(d));
            for (std::size_t i = 0; i < spec.curves.size(); ++i)
                for (FreeParam p : free_params[i]) {
                    double v = std::numeric_limits<double>::quiet_NaN();
                    for (const auto& [k, x] : row.curves[i].argmax)
                        if (k == p) v = x;
                    cells.push_back(format_number(v));
                }
            cells.push_back(row.reason);
            t.add_row(std::move(cells));
        }
        return t;
    }

    std::vector<double> column(const std::string& curve_label) const {
        const auto i = spec.curve_index(curve_label);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r.curves[i].fidelity);
        return out;
    }

    std::vector<double> relative_column(const std::string& comparison_label) const {
        for (std::size_t j = 0; j < spec.comparisons.size(); ++j)
            if (spec.comparisons[j].label() == comparison_label) {
                std::vector<double> out;
                for (const auto& r : rows) out.push_back(r.relative[j]);
                return out;
            }
        throw ConfigError("unknown comparison '" + comparison_label + "'");
    }

    std::vector<double> axis_values() const {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r.axis_value);
        return out;
    }
};

inline unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(i) for i in [0, count) on `jobs` threads. Each index is handled by
// exactly one worker, so writes to per-index slots need no locking.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline CurvePoint evaluate_curve(const Scenario& resolved, const OptimizerOptions& options) {
    CurvePoint cp;
    try {
        const auto rep = optimize(resolved, options);
        cp.fidelity = rep.best_fidelity;
        cp.argmax = rep.argmax;
        cp.evaluations = rep.evaluations;
        cp.excluded = rep.excluded;
        cp.grid_stage_best = rep.grid_stage_best;
        cp.refined = rep.refined;
        cp.converged = rep.converged;
        cp.residue = std::abs(scenario_fidelity_integral(resolved, argmax_point(resolved, rep)).imag());
    } catch (const std::exception& e) {
        cp = CurvePoint{};
        cp.error = e.what();
    }
    return cp;
}

inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = default_jobs(),
                             const OptimizerOptions& options = {}) {
    spec.validate();
    const auto grid = spec.grid();
    const std::size_t nc = spec.curves.size();

    SweepResult res;
    res.spec = spec;
    for (std::size_t i = 0; i < nc; ++i) res.free_params.push_back(spec.scenario_at(i, grid.front()).free_params);

    std::vector<CurvePoint> cells(grid.size() * nc);
    parallel_for(cells.size(), jobs, [&](std::size_t k) {
        const std::size_t row = k / nc, curve = k % nc;
        try {
            cells[k] = evaluate_curve(spec.scenario_at(curve, grid[row]), options);
        } catch (const std::exception& e) {
            cells[k].error = e.what();
        }
    });

    for (std::size_t r = 0; r < grid.size(); ++r) {
        SweepRow row;
        row.axis_value = grid[r];
        std::string reason;
        for (std::size_t c = 0; c < nc; ++c) {
            row.curves.push_back(cells[r * nc + c]);
            if (!cells[r * nc + c].error.empty()) {
                if (!reason.empty()) reason += "; ";
                reason += spec.curves[c].label + ": " + cells[r * nc + c].error;
            }
        }
        for (const auto& comp : spec.comparisons) {
            const double num = row.curves[spec.curve_index(comp.numerator)].fidelity;
            const double ref = row.curves[spec.curve_index(comp.reference)].fidelity;
            double d = std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(num) && std::isfinite(ref) && ref > 0.0) d = relative_fidelity(num, ref);
            row.relative.push_back(d);
        }
        row.reason = reason;
        res.rows.push_back(std::move(row));
    }
    return res;
}

inline nlohmann::ordered_json apparatus_json(const ApparatusParams& a) {
    nlohmann::ordered_json j;
    j["g1"] = a.g1;
    j["g4"] = a.g4;
    j["T2"] = a.T2;
    j["T3"] = a.T3;
    j["R2_squared"] = a.R2_squared();
    j["R3_squared"] = a.R3_squared();
    j["tau1"] = a.tau1;
    j["tau4"] = a.tau4;
    j["nth1"] = a.nth1;
    j["nth4"] = a.nth4;
    return j;
}

inline nlohmann::ordered_json scenario_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["input"] = to_string(s.input_family);
    j["resource"] = s.direct ? "none" : std::string(to_string(s.resource_family));
    j["direct"] = s.direct;
    j["r12"] = s.r12;
    j["r34"] = s.r34;
    j["constraint"] = s.constraint == Constraint::Symmetric ? "symmetric" : "none";
    auto free = nlohmann::ordered_json::array();
    for (FreeParam p : s.free_params) free.push_back(std::string(to_string(p)));
    j["free"] = free;
    j["delta12"] = s.delta12;
    j["delta34"] = s.delta34;
    j["gain_fraction_g1"] = s.gain_fraction_g1;
    j["phi"] = kFixedSqueezingPhase;
    if (!s.direct) j["apparatus"] = apparatus_json(s.apparatus);
    return j;
}

inline nlohmann::ordered_json report_json(const OptimizationReport& rep) {
    nlohmann::ordered_json j;
    j["best_fidelity"] = rep.best_fidelity;
    nlohmann::ordered_json arg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.argmax) arg[std::string(to_string(k))] = v;
    j["argmax"] = arg;
    j["evaluations"] = rep.evaluations;
    j["excluded"] = rep.excluded;
    j["grid_stage_best"] = rep.grid_stage_best;
    j["refined"] = rep.refined;
    j["converged"] = rep.converged;
    if (!rep.trace.empty()) {
        auto tr = nlohmann::ordered_json::array();
        for (const auto& t : rep.trace) tr.push_back({{"params", t.params}, {"value", t.value}});
        j["trace"] = tr;
    }
    return j;
}

// Manifest section for one dataset: resolved curve scenarios and one
// diagnostics entry per CSV row.
inline nlohmann::ordered_json dataset_json(const SweepResult& res, const std::string& file) {
    nlohmann::ordered_json j;
    j["file"] = file;
    j["axis"] = to_string(res.spec.axis);
    j["start"] = res.spec.start;
    j["stop"] = res.spec.stop;
    j["step"] = res.spec.step;
    auto curves = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < res.spec.curves.size(); ++i) {
        nlohmann::ordered_json c;
        c["label"] = res.spec.curves[i].label;
        c["scenario"] = scenario_json(res.spec.scenario_at(i, res.spec.start));
        curves.push_back(c);
    }
    j["curves"] = curves;
    auto comps = nlohmann::ordered_json::array();
    for (const auto& c : res.spec.comparisons) comps.push_back(c.label());
    j["comparisons"] = comps;
    auto points = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < res.rows.size(); ++r) {
        nlohmann::ordered_json p;
        p["row"] = r;
        p["axis_value"] = res.rows[r].axis_value;
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < res.spec.curves.size(); ++i) {
            const auto& cp = res.rows[r].curves[i];
            nlohmann::ordered_json d;
            d["evaluations"] = cp.evaluations;
            d["excluded"] = cp.excluded;
            d["refined"] = cp.refined;
            d["converged"] = cp.converged;
            if (std::isfinite(cp.residue)) d["imaginary_residue"] = cp.residue;
            if (!cp.error.empty()) d["error"] = cp.error;
            per[res.spec.curves[i].label] = d;
        }
        p["curves"] = per;
        points.push_back(p);
    }
    j["points"] = points;
    return j;
}

inline nlohmann::ordered_json manifest_header() {
    nlohmann::ordered_json j;
    j["tool"] = "cvswap";
    j["version"] = kToolVersion;
    j["convention_sheet"] = kConventionSheet;
    j["convention_hash"] = convention_hash();
    j["ps_policy"] = "PS/PA/SN delta pinned by the family preset; only the gain is optimised";
    return j;
}

}  // namespace cvswap::experiments
