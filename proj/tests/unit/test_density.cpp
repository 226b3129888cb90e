#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "jdweak/density.hpp"
#include "jdweak/errors.hpp"
#include "jdweak/realization.hpp"
#include "support/models.hpp"

using namespace jdweak;

namespace {

EulerPath one_step_linear_path(const JumpDiffusionModel& m) {
    const std::vector<double> mesh{0.0, 1.0};
    return euler_path(m, build_augmented_grid(mesh, {}), std::vector<double>{0.0}, JumpRealization{});
}

JumpDiffusionModel linear_growth_model() {
    fixtures::ScalarSpec spec;
    spec.k = 1.0;
    spec.x0 = 1.0;
    return fixtures::scalar_model(spec);
}

}  // namespace

TEST(RhoDet, LinearOneStepHandTrace) {
    const auto m = linear_growth_model();
    const auto path = one_step_linear_path(m);
    ASSERT_EQ(path.terminal()[0], 2.0);
    const auto duals = backward_duals(m, path, 2);
    const auto rho = rho_det(m, path, duals);
    ASSERT_EQ(rho.size(), 1u);
    EXPECT_DOUBLE_EQ(rho[0], 0.5);
}

TEST(RhoTilde, LinearOneStepHandTrace) {
    const auto m = linear_growth_model();
    const auto path = one_step_linear_path(m);
    const auto duals = backward_duals(m, path, 3);
    const auto rho = rho_tilde(m, path, duals);
    ASSERT_EQ(rho.size(), 1u);
    EXPECT_DOUBLE_EQ(rho[0], 0.5);
}

TEST(Densities, VanishForConstantCoefficients) {
    fixtures::ScalarSpec spec;
    spec.a0 = 0.7;
    spec.s = 0.4;
    spec.intensity = 1.5;
    spec.mark = 0.3;
    spec.payoff = fixtures::Payoff::quadratic;
    const auto m = fixtures::scalar_model(spec);
    const Simulator sim(m, Seeds{});
    for (std::uint64_t idx = 0; idx < 20; ++idx) {
        const auto path = sim.path_on_mesh(uniform_mesh(1.0, 5), idx);
        const auto duals = backward_duals(m, path, 3);
        for (double v : rho_det(m, path, duals)) EXPECT_EQ(v, 0.0);
        for (double v : rho_tilde(m, path, duals)) EXPECT_EQ(v, 0.0);
    }
}

TEST(Densities, VanishForPureJumps) {
    const Simulator sim(pure_jump_test_problem(), Seeds{});
    std::size_t jumps = 0;
    for (std::uint64_t idx = 0; idx < 50; ++idx) {
        const auto path = sim.path_on_mesh(uniform_mesh(1.0, 4), idx);
        jumps += path.grid.jump_count();
        const auto duals = backward_duals(sim.model(), path, 3);
        for (double v : rho_det(sim.model(), path, duals)) EXPECT_EQ(v, 0.0);
        for (double v : rho_tilde(sim.model(), path, duals)) EXPECT_EQ(v, 0.0);
    }
    EXPECT_GT(jumps, 0u);
}

TEST(Densities, NeedEnoughDualOrders) {
    const auto m = linear_growth_model();
    const auto path = one_step_linear_path(m);
    const auto first = backward_duals(m, path, 1);
    const auto second = backward_duals(m, path, 2);
    EXPECT_THROW(rho_det(m, path, first), CapabilityError);
    EXPECT_THROW(rho_tilde(m, path, second), CapabilityError);
}

TEST(Cutoff, Examples) {
    EXPECT_NEAR(clamp_density(0.0, 0.01), std::pow(0.01, 1.0 / 9.0), 1e-15);
    EXPECT_NEAR(clamp_density(0.0, 0.01), 0.5995, 5e-5);
    EXPECT_EQ(clamp_density(1e6, 0.01), 100.0);
    EXPECT_EQ(clamp_density(-1.0, 0.01), 1.0);
    EXPECT_THROW(clamp_density(1.0, 1.0), ParameterError);
    EXPECT_THROW(cutoff_density_S(std::vector<double>{1.0}, 0.0), ParameterError);
}

TEST(Cutoff, BandInvariant) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> expo(-12.0, 12.0), ut(0.001, 0.5);
    for (int i = 0; i < 2000; ++i) {
        const double tol = ut(gen);
        const double rho = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, expo(gen));
        const double v = clamp_density(rho, tol);
        ASSERT_GE(v, std::pow(tol, 1.0 / 9.0));
        ASSERT_LE(v, 1.0 / tol);
    }
}

TEST(CutoffD, SingletonIntervalsReduceToClampedAbs) {
    const auto mesh = uniform_mesh(1.0, 4);
    const auto grid = build_augmented_grid(mesh, {});
    const std::vector<double> rho{0.3, -2.0, 500.0, 0.0};
    const auto out = cutoff_density_D(grid, rho, 0.01);
    ASSERT_EQ(out.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out[i], clamp_density(rho[i], 0.01), 1e-13);
}

TEST(CutoffD, ZeroDensityHitsFloor) {
    const auto grid = build_augmented_grid(uniform_mesh(1.0, 3), std::vector<double>{0.5});
    const std::vector<double> rho(grid.step_count(), 0.0);
    for (double v : cutoff_density_D(grid, rho, 0.02)) EXPECT_EQ(v, std::pow(0.02, 1.0 / 9.0));
}

TEST(CutoffD, AggregationArithmetic) {
    const std::vector<double> mesh{0.0, 0.2};
    const auto grid = build_augmented_grid(mesh, std::vector<double>{0.1});
    ASSERT_EQ(grid.interval_count(), 1u);
    const std::vector<double> rho{3.0, 5.0};
    const auto agg = aggregate_by_interval(grid, rho);
    ASSERT_EQ(agg.size(), 1u);
    EXPECT_NEAR(agg[0], 2.0, 1e-14);
    EXPECT_NEAR(cutoff_density_D(grid, rho, 0.01)[0], 2.0, 1e-14);
}

TEST(Indicators, Examples) {
    const auto one = error_indicators(std::vector<double>{1.0}, std::vector<double>{0.1});
    EXPECT_NEAR(one.indicator[0], 0.01, 1e-17);

    const auto a = error_indicators(std::vector<double>{3.0}, std::vector<double>{0.4});
    const auto b = error_indicators(std::vector<double>{3.0}, std::vector<double>{0.2});
    EXPECT_DOUBLE_EQ(b.indicator[0], a.indicator[0] / 4.0);

    const auto two = error_indicators(std::vector<double>{2.0, 8.0}, std::vector<double>{0.5, 0.25});
    EXPECT_EQ(two.total, 1.0);
    EXPECT_EQ(two.max(), 0.5);
    EXPECT_EQ(two.size(), 2u);
    EXPECT_EQ(two.indicator[0], two.density[0] * two.step[0] * two.step[0]);
}

TEST(Indicators, SignedErrorSum) {
    EXPECT_EQ(signed_error_sum(std::vector<double>{2.0, -8.0}, std::vector<double>{0.5, 0.25}), 0.0);
    EXPECT_THROW(signed_error_sum(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), ParameterError);
}

TEST(Indicators, StepAndIntervalLengths) {
    const auto grid = build_augmented_grid(uniform_mesh(1.0, 2), std::vector<double>{0.25});
    EXPECT_EQ(step_lengths(grid), (std::vector<double>{0.25, 0.25, 0.5}));
    EXPECT_EQ(interval_lengths(grid), (std::vector<double>{0.5, 0.5}));
}

TEST(Indicators, CsvDump) {
    const auto ind = error_indicators(std::vector<double>{2.0, 8.0}, std::vector<double>{0.5, 0.25});
    std::ostringstream out;
    write_indicator_csv(out, std::vector<double>{0.0, 0.5}, ind);
    EXPECT_EQ(out.str().rfind("index,t,step,density,indicator\n", 0), 0u);
}
