#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cvswap/optimizer.hpp"

using namespace cvswap;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario swap_scenario(StateFamily in, StateFamily res, double r12, double r34, ApparatusParams app = kIdealApparatus) {
    Scenario s;
    s.input_family = in;
    s.resource_family = res;
    s.r12 = r12;
    s.r34 = r34;
    s.apparatus = app;
    return s;
}

Scenario direct_scenario(StateFamily f, double r) {
    Scenario s;
    s.input_family = f;
    s.r12 = r;
    s.direct = true;
    return s;
}

}  // namespace

TEST(Scenario, ResolvedDefaults) {
    auto s = swap_scenario(StateFamily::SB, StateFamily::SB, 0.5, 1.0).resolved();
    EXPECT_EQ(s.free_params, (std::vector<FreeParam>{FreeParam::Delta12, FreeParam::Delta34, FreeParam::Gain}));
    s = swap_scenario(StateFamily::TB, StateFamily::PS, 0.5, 1.0).resolved();
    EXPECT_EQ(s.free_params, (std::vector<FreeParam>{FreeParam::Gain}));
    EXPECT_TRUE(direct_scenario(StateFamily::TB, 1.0).resolved().free_params.empty());
    auto sym = swap_scenario(StateFamily::SB, StateFamily::SB, 0.7, 0.0);
    sym.constraint = Constraint::Symmetric;
    sym = sym.resolved();
    EXPECT_EQ(sym.r34, 0.7);
    EXPECT_EQ(sym.free_params, (std::vector<FreeParam>{FreeParam::Delta12, FreeParam::Gain}));
}

TEST(Scenario, Validation) {
    auto s = swap_scenario(StateFamily::SB, StateFamily::TB, 0.5, 1.0);
    s.constraint = Constraint::Symmetric;
    EXPECT_THROW(optimize(s), ContractViolation);
    s = swap_scenario(StateFamily::TB, StateFamily::TB, 0.5, 1.0);
    s.free_params = {FreeParam::Delta12};
    EXPECT_THROW(optimize(s), ContractViolation);
    s = direct_scenario(StateFamily::SB, 0.5);
    s.free_params = {FreeParam::Gain};
    EXPECT_THROW(optimize(s), ContractViolation);
    s = swap_scenario(StateFamily::TB, StateFamily::TB, -0.5, 1.0);
    EXPECT_THROW(optimize(s), ParameterRangeError);
    EXPECT_THROW(parse_free_param("theta"), ContractViolation);
    EXPECT_EQ(parse_free_param(to_string(FreeParam::Delta34)), FreeParam::Delta34);
}

TEST(Optimize, NoFreeParameters) {
    const auto rep = optimize(direct_scenario(StateFamily::TB, 1.0));
    EXPECT_EQ(rep.evaluations, 1u);
    EXPECT_NEAR(rep.best_fidelity, 1.0 / (1.0 + std::exp(-2.0)), 1e-12);
    EXPECT_TRUE(rep.argmax.empty());
}

TEST(Optimize, DirectSqueezedBellBeatsTwinBeam) {
    const auto sb = optimize(direct_scenario(StateFamily::SB, 0.5));
    const auto tb = optimize(direct_scenario(StateFamily::TB, 0.5));
    EXPECT_GT(sb.best_fidelity, tb.best_fidelity + 1e-3);
    EXPECT_GE(sb.best_fidelity, sb.grid_stage_best);
    const auto s = direct_scenario(StateFamily::SB, 0.5).resolved();
    EXPECT_NEAR(scenario_fidelity(s, argmax_point(s, sb)), sb.best_fidelity, 1e-14);
}

TEST(Optimize, GridPointsNeverBeatReport) {
    const auto s = swap_scenario(StateFamily::SB, StateFamily::TB, 0.6, 1.0).resolved();
    OptimizerOptions o;
    o.keep_trace = true;
    const auto rep = optimize(s, o);
    ASSERT_FALSE(rep.trace.empty());
    for (const auto& t : rep.trace) EXPECT_LE(t.value, rep.best_fidelity + 1e-12);
    // A dense independent scan along both axes finds nothing better than the optimum.
    double scan = 0.0;
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j <= 100; ++j) {
            ParamPoint p = fixed_point(s);
            p.delta12 = kPi * i / 200.0;
            p.g_tilde = 2.0 * j / 100.0;
            scan = std::max(scan, scenario_fidelity(s, p));
        }
    EXPECT_GE(rep.best_fidelity, scan - 1e-9);
    EXPECT_LE(rep.best_fidelity - scan, 1e-3);
}

TEST(Optimize, Deterministic) {
    const auto s = swap_scenario(StateFamily::SB, StateFamily::SB, 0.9, 0.7, realistic_apparatus());
    const auto a = optimize(s), b = optimize(s);
    EXPECT_EQ(a.best_fidelity, b.best_fidelity);
    EXPECT_EQ(a.argmax, b.argmax);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Optimize, UnitGainInStrongResourceLimit) {
    for (double r34 : {4.0, 6.0}) {
        const auto rep = optimize(swap_scenario(StateFamily::TB, StateFamily::TB, 0.8, r34));
        EXPECT_NEAR(rep.value_of(FreeParam::Gain), 1.0, 0.05) << r34;
    }
}

TEST(Optimize, VacuumInputReachesClassicalBound) {
    for (double r34 : {0.5, 1.5}) {
        const auto rep = optimize(swap_scenario(StateFamily::TB, StateFamily::TB, 0.0, r34));
        EXPECT_NEAR(rep.best_fidelity, 0.5, 1e-6);
    }
}

TEST(Optimize, SupersetDominance) {
    for (double r12 : {0.0, 0.6, 1.4})
        for (double r34 : {0.5, 1.5}) {
            const double sb = optimize(swap_scenario(StateFamily::SB, StateFamily::TB, r12, r34)).best_fidelity;
            const double ps = optimize(swap_scenario(StateFamily::PS, StateFamily::TB, r12, r34)).best_fidelity;
            const double tb = optimize(swap_scenario(StateFamily::TB, StateFamily::TB, r12, r34)).best_fidelity;
            EXPECT_GE(sb, std::max(ps, tb) - 1e-9) << r12 << ' ' << r34;
        }
}

TEST(Optimize, ValueOfUnknownParameter) {
    const auto rep = optimize(swap_scenario(StateFamily::TB, StateFamily::TB, 0.5, 0.5));
    EXPECT_THROW(rep.value_of(FreeParam::Delta12), ContractViolation);
}

TEST(GainInvariance, SplitsAgree) {
    for (const auto& app : {ApparatusParams{}, realistic_apparatus()}) {
        auto s = swap_scenario(StateFamily::SB, StateFamily::PS, 0.7, 1.0, app);
        s.delta12 = 0.4;
        EXPECT_TRUE(gain_invariance_check(s, 0.9, {{0.0, 0.9}, {0.45, 0.45}, {0.9, 0.0}}));
        EXPECT_TRUE(gain_invariance_check(s, 1.3, {{0.2, 1.1}, {1.3, 0.0}, {-0.5, 1.8}}));
    }
}

TEST(GainInvariance, UnequalSumsRejected) {
    const auto s = swap_scenario(StateFamily::TB, StateFamily::TB, 0.5, 0.5);
    EXPECT_THROW(gain_invariance_check(s, 1.0, {{0.5, 0.6}}), ContractViolation);
    EXPECT_THROW(gain_invariance_check(s, 1.0, {}), ContractViolation);
    EXPECT_THROW(gain_invariance_check(direct_scenario(StateFamily::TB, 0.5), 1.0, {{0.0, 1.0}}), ContractViolation);
}

TEST(GainInvariance, FractionRuleDoesNotChangeOptimum) {
    auto s = swap_scenario(StateFamily::PS, StateFamily::TB, 0.8, 1.0, realistic_apparatus());
    const double a = optimize(s).best_fidelity;
    s.gain_fraction_g1 = 0.3;
    EXPECT_NEAR(optimize(s).best_fidelity, a, 1e-9);
}

TEST(RelativeFidelity, Examples) {
    EXPECT_DOUBLE_EQ(relative_fidelity(0.6, 0.5), 0.2);
    EXPECT_DOUBLE_EQ(relative_fidelity(0.5, 0.5), 0.0);
    EXPECT_THROW(relative_fidelity(0.5, 0.0), ContractViolation);
}
