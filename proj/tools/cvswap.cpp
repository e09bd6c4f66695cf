// cvswap command-line front end.
//
//   cvswap fidelity  --config scenario.cfg [--set k=v ...] [--oracle --tol 1e-5]
//   cvswap optimize  --config scenario.cfg [--trace]
//   cvswap sweep     --config sweep.cfg --out dir [--jobs n]
//   cvswap figure    fig5 --out dir [--jobs n]
//   cvswap validate  [--full] [--tol 1e-5] [--out dir]
//
// Exit status: 0 success, 1 failed validation or computation, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvswap/cvswap.hpp"
#include "cvswap/experiments/config.hpp"
#include "cvswap/experiments/figures.hpp"
#include "cvswap/experiments/sweep.hpp"
#include "cvswap/experiments/validate.hpp"

namespace fs = std::filesystem;
using namespace cvswap;
using namespace cvswap::experiments;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned jobs = default_jobs();
    double tol = 1e-5;
};

Config load_config(const Common& c) {
    Config cfg;
    if (!c.config_path.empty()) cfg = Config::load(c.config_path);
    for (const auto& kv : c.overrides) cfg.set_assignment(kv);
    return cfg;
}

json config_echo(const Config& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

void emit(const json& j, const Common& c, const std::string& file) {
    const auto text = j.dump(2);
    std::cout << text << '\n';
    if (!c.out_dir.empty()) {
        fs::create_directories(c.out_dir);
        std::ofstream f(fs::path(c.out_dir) / file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write into '" + c.out_dir + "'");
        f << text << '\n';
    }
}

int run_fidelity(const Common& c, bool with_oracle) {
    const auto cfg = load_config(c);
    cfg.require_known(scenario_keys());
    const Scenario s = scenario_from_config(cfg);
    const ParamPoint p = fixed_point(s);
    const Complex value = scenario_fidelity_integral(s, p);
    json j = manifest_header();
    j["config"] = config_echo(cfg);
    j["scenario"] = scenario_json(s);
    j["fidelity"] = cvswap::detail::real_fidelity(value, "fidelity");
    j["imaginary_residue"] = std::abs(value.imag());
    if (with_oracle) {
        if (s.direct) throw UsageError("--oracle needs a swapping scenario");
        const double d34 = s.constraint == Constraint::Symmetric ? s.delta12 : s.delta34;
        const double r34 = s.constraint == Constraint::Symmetric ? s.r12 : s.r34;
        OracleOptions o;
        o.tol = c.tol;
        j["oracle_fidelity"] = oracle_fidelity(sb_cf(family_params(s.input_family, s.r12, s.delta12)),
                                               sb_cf(family_params(s.resource_family, r34, d34)), s.apparatus, o);
        j["oracle_tol"] = c.tol;
    }
    emit(j, c, "fidelity.json");
    return 0;
}

int run_optimize(const Common& c, bool trace) {
    const auto cfg = load_config(c);
    cfg.require_known(scenario_keys());
    const Scenario s = scenario_from_config(cfg).resolved();
    OptimizerOptions opt;
    opt.keep_trace = trace;
    const auto rep = optimize(s, opt);
    json j = manifest_header();
    j["config"] = config_echo(cfg);
    j["scenario"] = scenario_json(s);
    j["report"] = report_json(rep);
    j["imaginary_residue"] = std::abs(scenario_fidelity_integral(s, argmax_point(s, rep)).imag());
    emit(j, c, "optimize.json");
    return 0;
}

int run_sweep_command(const Common& c) {
    if (c.config_path.empty() && c.overrides.empty()) throw UsageError("sweep needs --config");
    const auto cfg = load_config(c);
    const auto spec = sweep_from_config(cfg);
    const auto res = run_sweep(spec, c.jobs);
    const fs::path dir = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
    fs::create_directories(dir);
    const fs::path csv = dir / spec.output;
    res.table().write(csv.string());
    json m = manifest_header();
    m["config"] = config_echo(cfg);
    m["datasets"] = json::array({dataset_json(res, spec.output)});
    const fs::path manifest = dir / (fs::path(spec.output).stem().string() + "_manifest.json");
    std::ofstream f(manifest, std::ios::binary);
    f << m.dump(2) << '\n';
    std::size_t failed = 0;
    for (const auto& r : res.rows)
        if (!r.reason.empty()) ++failed;
    std::cout << csv.string() << " (" << res.rows.size() << " rows, " << failed << " with failures)\n"
              << manifest.string() << '\n';
    return 0;
}

int run_figure(const Common& c, const std::string& id) {
    const fs::path dir = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
    const auto fr = reproduce_figure(id, dir.string(), c.jobs);
    for (const auto& d : fr.datasets) std::cout << (dir / d.file).string() << '\n';
    std::cout << (dir / (id + "_manifest.json")).string() << '\n';
    for (const auto& chk : fr.checks)
        std::cout << (chk.passed ? "  ok    " : "  MISS  ") << chk.name << "  " << chk.detail << '\n';
    return 0;
}

int run_validate(const Common& c, bool full, bool mutate) {
    ValidationOptions o;
    o.level = full ? ValidationLevel::Full : ValidationLevel::Quick;
    o.oracle_tol = c.tol;
    o.flip_displacement_phase = mutate;
    const auto rep = validate(o);
    for (const auto& chk : rep.checks) {
        std::cout << (chk.passed ? "PASS " : "FAIL ") << chk.name << "  residue=" << format_number(chk.residue)
                  << " threshold=" << format_number(chk.threshold);
        if (full) std::cout << " time=" << format_number(chk.seconds) << "s";
        if (!chk.detail.empty()) std::cout << "  (" << chk.detail << ")";
        std::cout << '\n';
    }
    const fs::path dir = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
    fs::create_directories(dir);
    std::ofstream f(dir / "validate_report.json", std::ios::binary);
    f << rep.to_json().dump(2) << '\n';
    std::cout << (rep.passed() ? "validation passed" : "validation FAILED") << '\n';
    return rep.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement swapping with squeezed Bell states: teleportation fidelity tools"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "key=value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", common.overrides, "override one config key (key=value), repeatable");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tol", common.tol, "oracle quadrature tolerance")->check(CLI::PositiveNumber);
    };

    bool with_oracle = false, trace = false, full = false, mutate = false;
    std::string figure_id;

    auto* fid = app.add_subcommand("fidelity", "fidelity of one scenario at fixed parameters");
    add_common(fid);
    fid->add_flag("--oracle", with_oracle, "also evaluate the fidelity through the step-by-step oracle");

    auto* opt = app.add_subcommand("optimize", "optimise the fidelity of one scenario");
    add_common(opt);
    opt->add_flag("--trace", trace, "include every evaluated point in the report");

    auto* sw = app.add_subcommand("sweep", "optimised fidelities over a squeezing grid");
    add_common(sw);

    auto* fig = app.add_subcommand("figure", "reproduce one figure dataset (fig2 ... fig7)");
    add_common(fig);
    fig->add_option("id", figure_id, "figure id")->required()->check(CLI::IsMember(figure_ids()));

    auto* val = app.add_subcommand("validate", "run the self-check suite");
    add_common(val);
    val->add_flag("--full", full, "add the dual-path oracle comparisons");
    val->add_flag("--mutate-displacement-phase", mutate, "")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*fid) return run_fidelity(common, with_oracle);
        if (*opt) return run_optimize(common, trace);
        if (*sw) return run_sweep_command(common);
        if (*fig) return run_figure(common, figure_id);
        if (*val) return run_validate(common, full, mutate);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid request: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterRangeError& e) {
        std::cerr << "parameter out of range: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
