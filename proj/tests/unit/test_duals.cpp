#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jdweak/duals.hpp"
#include "jdweak/errors.hpp"
#include "jdweak/realization.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace jdweak;

TEST(LocalDerivatives, ZeroModelStepIsIdentity) {
    const auto m = fixtures::frozen_linear_model({1.0, 1.0}, 0.0);
    const std::vector<double> x{0.3, -0.2}, dw{0.7};
    const auto local = time_step_derivatives(m, 0.1, x, 0.25, dw, 3);
    const auto id = LocalDerivatives::identity(2, 3);
    EXPECT_EQ(local.jac, id.jac);
    EXPECT_EQ(local.hess, id.hess);
    EXPECT_EQ(local.third, id.third);
    for (double v : local.hess) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(local.jac, (std::vector<double>{1.0, 0.0, 0.0, 1.0}));
}

TEST(LocalDerivatives, LinearDriftStep) {
    fixtures::ScalarSpec spec;
    spec.k = 1.0;
    const auto m = fixtures::scalar_model(spec);
    const std::vector<double> x{2.0}, dw{0.4};
    const auto local = time_step_derivatives(m, 0.0, x, 0.1, dw, 3);
    EXPECT_DOUBLE_EQ(local.d1(0, 0), 1.1);
    EXPECT_EQ(local.d2(0, 0, 0), 0.0);
    EXPECT_EQ(local.d3(0, 0, 0, 0), 0.0);
}

TEST(LocalDerivatives, TestProblemJumpMap) {
    const auto m = builtin_test_problem();
    const std::vector<double> x{0.0, 3.0}, z{1.0};
    const auto local = jump_derivatives(m, 0.5, x, z, 3);
    EXPECT_EQ(local.d1(0, 0), 1.0);
    EXPECT_EQ(local.d1(0, 1), 0.0);
    EXPECT_NEAR(local.d1(1, 0), 0.0, 1e-16);
    EXPECT_EQ(local.d1(1, 1), 0.0);
    EXPECT_NEAR(local.d2(1, 0, 0), -1.0 / std::sqrt(1.5), 1e-15);
    EXPECT_NEAR(local.d2(1, 0, 0), -0.8165, 5e-5);
}

TEST(LocalDerivatives, MissingDerivativesThrow) {
    auto m = builtin_test_problem();
    m.derivative_order = 1;
    const std::vector<double> x{0.0, 0.0}, dw{0.1};
    EXPECT_THROW(time_step_derivatives(m, 0.0, x, 0.1, dw, 2), CapabilityError);
}

TEST(BackwardDuals, LinearPayoffUnderFrozenFlow) {
    const auto m = fixtures::frozen_linear_model({2.0, -3.0}, 1.0);
    const Simulator sim(m, Seeds{});
    for (std::uint64_t idx = 0; idx < 20; ++idx) {
        const auto path = sim.path_on_mesh(uniform_mesh(1.0, 4), idx);
        const auto duals = backward_duals(m, path, 3);
        for (std::size_t n = 0; n <= path.step_count(); ++n) {
            EXPECT_EQ(duals.at(n)[0], 2.0);
            EXPECT_EQ(duals.at(n)[1], -3.0);
            EXPECT_EQ(duals.left(n)[0], 2.0);
            for (double v : duals.first_variation_at(n)) EXPECT_EQ(v, 0.0);
            for (double v : duals.second_variation_at(n)) EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(BackwardDuals, QuadraticPayoffTerminalValues) {
    const Simulator sim(builtin_test_problem(), Seeds{});
    const auto path = sim.path_on_mesh(uniform_mesh(1.0, 5), 3);
    const auto duals = backward_duals(sim.model(), path, 3);
    const std::size_t end = path.step_count();
    const auto x = path.terminal();
    EXPECT_EQ(duals.at(end)[0], 2.0 * x[0]);
    EXPECT_EQ(duals.at(end)[1], 2.0 * x[1]);
    EXPECT_EQ(duals.first_variation_at(end)[0], 2.0);
    EXPECT_EQ(duals.first_variation_at(end)[1], 0.0);
    EXPECT_EQ(duals.first_variation_at(end)[2], 0.0);
    EXPECT_EQ(duals.first_variation_at(end)[3], 2.0);
    for (double v : duals.second_variation_at(end)) EXPECT_EQ(v, 0.0);
}

TEST(BackwardDuals, OrderChecks) {
    const Simulator sim(builtin_test_problem(), Seeds{});
    const auto path = sim.path_on_mesh(uniform_mesh(1.0, 2), 0);
    EXPECT_THROW(backward_duals(sim.model(), path, 0), ParameterError);
    EXPECT_THROW(backward_duals(sim.model(), path, 4), ParameterError);
    const auto first = backward_duals(sim.model(), path, 1);
    EXPECT_TRUE(first.phi1.empty());
    EXPECT_TRUE(first.phi2.empty());
    const auto third = backward_duals(sim.model(), path, 3);
    for (std::size_t i = 0; i < first.phi.size(); ++i) EXPECT_EQ(first.phi[i], third.phi[i]);
}

TEST(BackwardDuals, MatchFrozenNoiseDifferences) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0, with_jumps = 0;
    for (std::uint64_t idx = 0; checked < 30; ++idx) {
        JumpDiffusionModel m = builtin_test_problem();
        m.initial_state = {u(gen), u(gen)};
        const Simulator sim(m, Seeds{});
        const auto path = sim.path_on_mesh(uniform_mesh(1.0, 2 + idx % 4), idx);
        if (path.step_count() > 8) continue;
        ++checked;
        with_jumps += path.grid.jump_count() > 0 ? 1 : 0;
        const auto duals = backward_duals(m, path, 3);
        const auto check = fixtures::check_duals_against_fd(m, path, duals);
        EXPECT_LE(check.phi, 1e-4) << "realization " << idx;
        EXPECT_LE(check.phi1, 1e-3) << "realization " << idx;
        EXPECT_LE(check.symmetry1, 1e-12) << "realization " << idx;
        EXPECT_LE(check.symmetry2, 1e-12) << "realization " << idx;
    }
    EXPECT_GT(with_jumps, 5);
}

TEST(BackwardDuals, NoJumpEffectPassesThroughLeftLimits) {
    const auto m = fixtures::test_problem_without_jump_effect();
    const Simulator sim(m, Seeds{});
    int jump_nodes = 0;
    for (std::uint64_t idx = 0; idx < 30; ++idx) {
        const auto path = sim.path_on_mesh(uniform_mesh(1.0, 4), idx);
        const auto duals = backward_duals(m, path, 3);
        for (std::size_t n = 1; n <= path.step_count(); ++n) {
            jump_nodes += path.grid.is_jump(n) ? 1 : 0;
            for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(duals.left(n)[i], duals.at(n)[i]);
            for (std::size_t i = 0; i < 4; ++i) {
                EXPECT_EQ(duals.first_variation_left(n)[i], duals.first_variation_at(n)[i]);
            }
            for (std::size_t i = 0; i < 8; ++i) {
                EXPECT_EQ(duals.second_variation_left(n)[i], duals.second_variation_at(n)[i]);
            }
        }
    }
    EXPECT_GT(jump_nodes, 0);
}

TEST(PullBack, ChainRuleThroughLinearMap) {
    // F(x) = M x with M = [[1, 2], [3, 4]]: phi = M^T psi, phi' = M^T psi' M.
    LocalDerivatives local = LocalDerivatives::identity(2, 3);
    local.jac = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> psi{1.0, -1.0}, psi1{1.0, 0.5, 0.5, 2.0}, psi2(8, 0.0);
    std::vector<double> phi(2), phi1(4), phi2(8);
    pull_back_duals(local, psi, psi1, psi2, phi, phi1, phi2);
    EXPECT_EQ(phi, (std::vector<double>{-2.0, -2.0}));
    // M^T psi' M
    EXPECT_DOUBLE_EQ(phi1[0], 1 * (1 * 1 + 0.5 * 3) + 3 * (0.5 * 1 + 2 * 3));
    EXPECT_DOUBLE_EQ(phi1[1], 1 * (1 * 2 + 0.5 * 4) + 3 * (0.5 * 2 + 2 * 4));
    EXPECT_DOUBLE_EQ(phi1[2], phi1[1]);
    EXPECT_DOUBLE_EQ(phi1[3], 2 * (1 * 2 + 0.5 * 4) + 4 * (0.5 * 2 + 2 * 4));
}
