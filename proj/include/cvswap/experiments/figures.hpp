#pragma once

// Figure datasets: optimised absolute and relative fidelities against r12 on
// [0, 2] in steps of 0.05, one CSV per r34 value (or per symmetric/direct
// family), plus a JSON manifest.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvswap/experiments/csv.hpp"
#include "cvswap/experiments/sweep.hpp"

namespace cvswap::experiments {

inline constexpr double kFigureStep = 0.05;

struct FeatureCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct FigureDataset {
    std::string file;
    double r34 = std::numeric_limits<double>::quiet_NaN();  // NaN for symmetric and direct sets
    SweepResult result;
};

struct FigureResult {
    std::string id;
    std::vector<FigureDataset> datasets;
    std::vector<FeatureCheck> checks;
    nlohmann::ordered_json manifest;

    const FigureDataset& dataset(const std::string& file) const {
        for (const auto& d : datasets)
            if (d.file == file) return d;
        throw ConfigError("figure " + id + " has no dataset '" + file + "'");
    }
};

struct FigureDef {
    std::string id;
    bool realistic = false;
    bool symmetric = false;
    std::vector<double> r34_values;
    std::vector<std::string> swap_curves;
    std::vector<ComparisonSpec> swap_comparisons;
    std::vector<std::string> direct_curves;
    std::vector<ComparisonSpec> direct_comparisons;
};

inline const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    return ids;
}

inline FigureDef figure_def(const std::string& id) {
    const std::vector<std::string> against_tb{"SBswTB", "PSswTB", "TBswTB"};
    const std::vector<ComparisonSpec> against_tb_cmp{{"SBswTB", "TBswTB"}, {"SBswTB", "PSswTB"}};
    const std::vector<std::string> same{"SBswSB", "PSswPS", "TBswTB"};
    const std::vector<ComparisonSpec> same_cmp{{"SBswSB", "TBswTB"}, {"SBswSB", "PSswPS"}};
    const std::vector<std::string> direct{"SB", "PS", "TB"};
    const std::vector<ComparisonSpec> direct_cmp{{"SB", "TB"}, {"SB", "PS"}};
    if (id == "fig2") return {id, false, false, {1.5, 1.0, 0.5}, against_tb, against_tb_cmp, direct, direct_cmp};
    if (id == "fig3") return {id, false, false, {1.5, 1.0, 0.7, 0.5}, same, same_cmp, {}, {}};
    if (id == "fig4") return {id, false, true, {}, same, same_cmp, direct, direct_cmp};
    if (id == "fig5") return {id, true, false, {0.5, 0.7, 1.0, 1.5}, against_tb, against_tb_cmp, {}, {}};
    if (id == "fig6") return {id, true, false, {0.5, 0.7, 1.0, 1.5}, same, same_cmp, {}, {}};
    if (id == "fig7") return {id, true, true, {}, same, same_cmp, {}, {}};
    throw ConfigError("unknown figure '" + id + "' (expected fig2 ... fig7)");
}

// Apparatus values in the form they are quoted for the lossy figures.
inline nlohmann::ordered_json declared_apparatus(bool realistic) {
    nlohmann::ordered_json j;
    j["setting"] = realistic ? "realistic" : "ideal";
    j["tau1"] = realistic ? 0.1 : 0.0;
    j["nth1"] = 0.0;
    j["tau4"] = realistic ? 0.2 : 0.0;
    j["nth4"] = 0.0;
    j["R2"] = realistic ? std::sqrt(0.05) : 0.0;
    j["R3"] = realistic ? std::sqrt(0.05) : 0.0;
    j["gains"] = "g1 = 0, g4 = g_tilde (optimised)";
    return j;
}

namespace detail {

inline SweepSpec figure_sweep(const FigureDef& def, const std::vector<std::string>& labels,
                              const std::vector<ComparisonSpec>& comps, SweepAxis axis, double r34) {
    Scenario base;
    base.apparatus = def.realistic ? realistic_apparatus() : kIdealApparatus;
    base.r34 = std::isfinite(r34) ? r34 : 0.0;
    SweepSpec spec;
    spec.axis = axis;
    spec.start = 0.0;
    spec.stop = 2.0;
    spec.step = kFigureStep;
    for (const auto& l : labels) spec.curves.push_back(make_curve(l, base));
    spec.comparisons = comps;
    return spec;
}

inline double value_at(const SweepResult& r, const std::vector<double>& col, double x) {
    const auto xs = r.axis_values();
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - x) < 1e-9) return col[i];
    return std::numeric_limits<double>::quiet_NaN();
}

// First sign change of a - b on the common grid; NaN when none.
inline double crossing(const std::vector<double>& xs, const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
        if (d0 == 0.0) return xs[i];
        if ((d0 < 0.0) != (d1 < 0.0)) return xs[i] + (xs[i + 1] - xs[i]) * d0 / (d0 - d1);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline std::string fmt(double v) { return format_number(v); }

inline void ordering_check(FigureResult& fr, const std::string& comparison) {
    // Datasets sorted by descending r34 must give descending values at r12 = 0.
    std::vector<std::pair<double, double>> at0;
    for (const auto& d : fr.datasets)
        if (std::isfinite(d.r34)) at0.emplace_back(d.r34, value_at(d.result, d.result.relative_column(comparison), 0.0));
    std::sort(at0.begin(), at0.end(), [](auto a, auto b) { return a.first > b.first; });
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < at0.size(); ++i) {
        detail += (i ? ", " : "") + std::string("r34=") + fmt(at0[i].first) + ": " + fmt(at0[i].second);
        if (i > 0 && !(at0[i].second < at0[i - 1].second)) ok = false;
    }
    fr.checks.push_back({"ordered_by_r34_at_r12_0 " + comparison, ok, detail});
}

inline void monotone_check(FigureResult& fr, const std::string& comparison, double from, double to) {
    for (const auto& d : fr.datasets) {
        if (!std::isfinite(d.r34)) continue;
        const auto xs = d.result.axis_values();
        const auto col = d.result.relative_column(comparison);
        bool ok = true;
        double prev = std::numeric_limits<double>::quiet_NaN(), worst_drop = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] < from - 1e-9 || xs[i] > to + 1e-9) continue;
            if (!(col[i] > 0.0)) ok = false;
            if (std::isfinite(prev) && col[i] < prev - 1e-9) {
                ok = false;
                worst_drop = std::max(worst_drop, prev - col[i]);
            }
            prev = col[i];
        }
        fr.checks.push_back({"positive_nondecreasing " + comparison + " r34=" + fmt(d.r34), ok,
                             "value at " + fmt(from) + ": " + fmt(value_at(d.result, col, from)) + ", at " +
                                 fmt(to) + ": " + fmt(value_at(d.result, col, to)) +
                                 ", largest drop: " + fmt(worst_drop)});
    }
}

inline void crossing_check(FigureResult& fr, const std::string& comparison, double r34a, double r34b, double lo,
                           double hi) {
    const FigureDataset *a = nullptr, *b = nullptr;
    for (const auto& d : fr.datasets) {
        if (d.r34 == r34a) a = &d;
        if (d.r34 == r34b) b = &d;
    }
    if (!a || !b) return;
    const double x = crossing(a->result.axis_values(), a->result.relative_column(comparison),
                              b->result.relative_column(comparison));
    fr.checks.push_back({"crossing " + comparison + " r34=" + fmt(r34a) + "," + fmt(r34b),
                         std::isfinite(x) && x >= lo && x <= hi, "crossing at r12=" + fmt(x)});
}

inline void floor_check(FigureResult& fr, const std::string& comparison, double x, double floor) {
    for (const auto& d : fr.datasets) {
        if (!std::isfinite(d.r34)) continue;
        const double v = value_at(d.result, d.result.relative_column(comparison), x);
        fr.checks.push_back({"floor " + comparison + " r34=" + fmt(d.r34) + " at r12=" + fmt(x), v >= floor,
                             "value " + fmt(v)});
    }
}

inline void grid_check(FigureResult& fr) {
    bool ok = true;
    for (const auto& d : fr.datasets) {
        const auto xs = d.result.axis_values();
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1])) ok = false;
    }
    fr.checks.push_back({"axis_strictly_increasing", ok, ""});
}

}  // namespace detail

// Runs every dataset of a figure; writes CSVs and manifest.json into out_dir
// unless it is empty.
inline FigureResult reproduce_figure(const std::string& id, const std::string& out_dir = {},
                                     unsigned jobs = default_jobs(), const OptimizerOptions& options = {}) {
    const FigureDef def = figure_def(id);
    FigureResult fr;
    fr.id = id;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    if (def.symmetric) {
        auto spec = detail::figure_sweep(def, def.swap_curves, def.swap_comparisons, SweepAxis::Symmetric, nan);
        spec.output = id + "_symmetric.csv";
        fr.datasets.push_back({spec.output, nan, run_sweep(spec, jobs, options)});
    } else {
        for (double r34 : def.r34_values) {
            auto spec = detail::figure_sweep(def, def.swap_curves, def.swap_comparisons, SweepAxis::R12, r34);
            spec.output = id + "_r34_" + format_number(r34) + ".csv";
            fr.datasets.push_back({spec.output, r34, run_sweep(spec, jobs, options)});
        }
    }
    if (!def.direct_curves.empty()) {
        auto spec = detail::figure_sweep(def, def.direct_curves, def.direct_comparisons, SweepAxis::R12, nan);
        spec.output = id + "_direct.csv";
        fr.datasets.push_back({spec.output, nan, run_sweep(spec, jobs, options)});
    }

    detail::grid_check(fr);
    if (id == "fig2" || id == "fig5") {
        detail::ordering_check(fr, "SBswTB/TBswTB");
        detail::ordering_check(fr, "SBswTB/PSswTB");
    }
    if (id == "fig3" || id == "fig6") detail::ordering_check(fr, "SBswSB/TBswTB");
    if (id == "fig3") {
        detail::crossing_check(fr, "SBswSB/TBswTB", 0.5, 1.5, 0.25, 0.55);
        detail::floor_check(fr, "SBswSB/TBswTB", 2.0, 0.01);
    }
    if (id == "fig5") detail::monotone_check(fr, "SBswTB/TBswTB", 0.5, 2.0);

    auto m = manifest_header();
    m["figure"] = id;
    m["apparatus"] = declared_apparatus(def.realistic);
    m["r12_grid"] = {{"start", 0.0}, {"stop", 2.0}, {"step", kFigureStep}};
    if (!def.r34_values.empty()) m["r34_values"] = def.r34_values;
    m["symmetric"] = def.symmetric;
    auto sets = nlohmann::ordered_json::array();
    for (const auto& d : fr.datasets) sets.push_back(dataset_json(d.result, d.file));
    m["datasets"] = sets;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : fr.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    m["feature_checks"] = checks;
    fr.manifest = m;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& d : fr.datasets) d.result.table().write((std::filesystem::path(out_dir) / d.file).string());
        std::ofstream f(std::filesystem::path(out_dir) / (id + "_manifest.json"), std::ios::binary);
        if (!f) throw std::runtime_error("cannot write manifest into '" + out_dir + "'");
        f << fr.manifest.dump(2) << '\n';
    }
    return fr;
}

}  // namespace cvswap::experiments
