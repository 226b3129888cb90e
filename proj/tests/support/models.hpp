#pragma once

// Small hand-checkable models shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "jdweak/model.hpp"

namespace jdweak::fixtures {

enum class Payoff { linear, quadratic };

/// dX = (k x + a0) dt + s dW + z p(dt, dz) in one dimension, constant
/// intensity and constant mark, X(0) = x0.
struct ScalarSpec {
    double k = 0.0;
    double a0 = 0.0;
    double s = 0.0;
    double intensity = 0.0;
    double mark = 0.0;
    double x0 = 1.0;
    double horizon = 1.0;
    Payoff payoff = Payoff::linear;
    bool closed_form_inverse = true;
};

inline JumpDiffusionModel scalar_model(const ScalarSpec& p) {
    JumpDiffusionModel m;
    m.name = "scalar";
    m.dim = 1;
    m.wiener_dim = 1;
    m.mark_dim = 1;
    m.horizon = p.horizon;
    m.initial_state = {p.x0};
    m.drift = [p](double, StateView x, std::span<double> a) { a[0] = p.k * x[0] + p.a0; };
    m.diffusion = [p](double, StateView, std::span<double> b) { b[0] = p.s; };
    m.jump = [](double, StateView, StateView z, std::span<double> c) { c[0] = z[0]; };
    m.intensity = [p](double) { return p.intensity; };
    m.intensity_max = p.intensity;
    if (p.closed_form_inverse && p.intensity > 0.0) {
        m.inverse_cumulative_intensity = [p](double s) { return s / p.intensity; };
    }
    m.mark_sampler = [p](double, RandomStream&, std::span<double> z) { z[0] = p.mark; };
    if (p.payoff == Payoff::linear) {
        m.payoff = [](StateView x) { return x[0]; };
    } else {
        m.payoff = [](StateView x) { return x[0] * x[0]; };
    }

    m.drift_jet = [p](double, StateView x, int order, Jet& jet) {
        jet.reset(1, 1, order);
        jet.value[0] = p.k * x[0] + p.a0;
        if (order >= 1) jet.grad(0, 0) = p.k;
    };
    m.diffusion_jet = [p](double, StateView, int order, Jet& jet) {
        jet.reset(1, 1, order);
        jet.value[0] = p.s;
    };
    m.jump_jet = [](double, StateView, StateView z, int order, Jet& jet) {
        jet.reset(1, 1, order);
        jet.value[0] = z[0];
    };
    m.payoff_jet = [p](StateView x, int order, Jet& jet) {
        jet.reset(1, 1, order);
        if (p.payoff == Payoff::linear) {
            jet.value[0] = x[0];
            if (order >= 1) jet.grad(0, 0) = 1.0;
        } else {
            jet.value[0] = x[0] * x[0];
            if (order >= 1) jet.grad(0, 0) = 2.0 * x[0];
            if (order >= 2) jet.hess(0, 0, 0) = 2.0;
        }
    };
    m.derivative_order = 3;
    return m;
}

/// Two-dimensional model with a = b = c = 0 and payoff v . x.
inline JumpDiffusionModel frozen_linear_model(std::vector<double> v, double intensity) {
    JumpDiffusionModel m;
    m.name = "frozen";
    m.dim = v.size();
    m.wiener_dim = 1;
    m.mark_dim = 1;
    m.initial_state.assign(v.size(), 0.5);
    const std::size_t d = v.size();
    auto zero = [](double, StateView, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    m.drift = zero;
    m.diffusion = zero;
    m.jump = [](double, StateView, StateView, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    m.intensity = [intensity](double) { return intensity; };
    m.intensity_max = intensity;
    m.mark_sampler = [](double, RandomStream& u, std::span<double> z) { z[0] = u.uniform(); };
    m.payoff = [v](StateView x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += v[i] * x[i];
        return s;
    };
    m.drift_jet = [d](double, StateView, int order, Jet& jet) { jet.reset(d, d, order); };
    m.diffusion_jet = [d](double, StateView, int order, Jet& jet) { jet.reset(d, d, order); };
    m.jump_jet = [d](double, StateView, StateView, int order, Jet& jet) { jet.reset(d, d, order); };
    m.payoff_jet = [v, d](StateView x, int order, Jet& jet) {
        jet.reset(1, d, order);
        for (std::size_t i = 0; i < d; ++i) jet.value[0] += v[i] * x[i];
        for (std::size_t i = 0; i < d && order >= 1; ++i) jet.grad(0, i) = v[i];
    };
    m.derivative_order = 3;
    return m;
}

/// The built-in test problem with every jump amplitude forced to zero.
inline JumpDiffusionModel test_problem_without_jump_effect() {
    JumpDiffusionModel m = builtin_test_problem();
    m.name = "test5-c0";
    m.jump = [](double, StateView, StateView, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    m.jump_jet = [](double, StateView x, StateView, int order, Jet& jet) { jet.reset(2, x.size(), order); };
    return m;
}

}  // namespace jdweak::fixtures
