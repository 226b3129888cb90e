#include "jdweak/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "jdweak/errors.hpp"

namespace jdweak {

void Jet::reset(std::size_t n_out, std::size_t n_dim, int max_order) {
    outputs = n_out;
    dim = n_dim;
    order = max_order;
    value.assign(n_out, 0.0);
    dt.assign(n_out, 0.0);
    d1.assign(max_order >= 1 ? n_out * n_dim : 0, 0.0);
    d2.assign(max_order >= 2 ? n_out * n_dim * n_dim : 0, 0.0);
    d3.assign(max_order >= 3 ? n_out * n_dim * n_dim * n_dim : 0, 0.0);
}

void JumpDiffusionModel::validate() const {
    if (dim == 0 || wiener_dim == 0 || mark_dim == 0) {
        throw ParameterError("model '" + name + "': dimensions must be positive");
    }
    if (initial_state.size() != dim) {
        throw ParameterError("model '" + name + "': initial state has wrong dimension");
    }
    if (!(horizon > 0.0)) {
        throw ParameterError("model '" + name + "': horizon must be positive");
    }
    if (!drift || !diffusion || !jump || !intensity || !mark_sampler || !payoff) {
        throw ParameterError("model '" + name + "': missing coefficient callback");
    }
}

void JumpDiffusionModel::require_derivatives(int order) const {
    if (order > derivative_order || !drift_jet || !diffusion_jet || !jump_jet || !payoff_jet) {
        throw CapabilityError("model '" + name + "' provides derivatives up to order " +
                              std::to_string(derivative_order) + ", order " +
                              std::to_string(order) + " requested");
    }
}

namespace {

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ModelError(std::string("non-finite value in coefficient '") + what + "'");
        }
    }
}

}  // namespace

Coefficients eval_coefficients(const JumpDiffusionModel& model, double t, StateView x) {
    const std::size_t d = model.dim;
    const std::size_t l0 = model.wiener_dim;
    Coefficients out;
    out.drift.assign(d, 0.0);
    out.diffusion.assign(d * l0, 0.0);
    out.diffusion_tensor.assign(d * d, 0.0);
    model.drift(t, x, out.drift);
    check_finite(out.drift, "drift");
    model.diffusion(t, x, out.diffusion);
    check_finite(out.diffusion, "diffusion");
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < l0; ++l) s += out.diffusion[i * l0 + l] * out.diffusion[j * l0 + l];
            out.diffusion_tensor[i * d + j] = 0.5 * s;
            out.diffusion_tensor[j * d + i] = 0.5 * s;
        }
    }
    return out;
}

void diffusion_tensor_jet(const JumpDiffusionModel& model, double t, StateView x, int order,
                          Jet& b_jet, Jet& d_jet) {
    const std::size_t d = model.dim;
    const std::size_t l0 = model.wiener_dim;
    b_jet.reset(d * l0, d, order);
    model.diffusion_jet(t, x, order, b_jet);
    d_jet.reset(d * d, d, order);

    auto b = [&](std::size_t k, std::size_t l) { return b_jet.value[k * l0 + l]; };
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t m = 0; m < d; ++m) {
            const std::size_t o = k * d + m;
            double v = 0.0, vt = 0.0;
            for (std::size_t l = 0; l < l0; ++l) {
                const std::size_t bk = k * l0 + l, bm = m * l0 + l;
                v += b(k, l) * b(m, l);
                vt += b_jet.dt[bk] * b(m, l) + b(k, l) * b_jet.dt[bm];
            }
            d_jet.value[o] = 0.5 * v;
            d_jet.dt[o] = 0.5 * vt;
            if (order < 1) continue;
            for (std::size_t i = 0; i < d; ++i) {
                double g = 0.0;
                for (std::size_t l = 0; l < l0; ++l) {
                    const std::size_t bk = k * l0 + l, bm = m * l0 + l;
                    g += b_jet.grad(bk, i) * b(m, l) + b(k, l) * b_jet.grad(bm, i);
                }
                d_jet.grad(o, i) = 0.5 * g;
                if (order < 2) continue;
                for (std::size_t j = 0; j < d; ++j) {
                    double h = 0.0;
                    for (std::size_t l = 0; l < l0; ++l) {
                        const std::size_t bk = k * l0 + l, bm = m * l0 + l;
                        h += b_jet.hess(bk, i, j) * b(m, l) + b_jet.grad(bk, i) * b_jet.grad(bm, j) +
                             b_jet.grad(bk, j) * b_jet.grad(bm, i) + b(k, l) * b_jet.hess(bm, i, j);
                    }
                    d_jet.hess(o, i, j) = 0.5 * h;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Built-in test problem
// ---------------------------------------------------------------------------

namespace {

double test_intensity(double t) { return 1.0 / (1.0 + t); }

void test_marks(double t, RandomStream& uniform, std::span<double> z) {
    const double u = uniform.uniform();
    z[0] = std::cos(2.0 * std::numbers::pi * t) +
           std::sin(2.0 * std::numbers::pi * t) * 2.0 * std::sqrt(3.0) * (u - 0.5);
}

void test_jump(double t, StateView x, StateView z, std::span<double> out) {
    out[0] = 0.0;
    out[1] = z[0] * std::cos(x[0]) / std::sqrt(t + 1.0) - x[1];
}

void test_jump_jet(double t, StateView x, StateView z, int order, Jet& jet) {
    jet.reset(2, 2, order);
    test_jump(t, x, z, jet.value);
    const double s = z[0] / std::sqrt(t + 1.0);
    if (order >= 1) {
        jet.grad(1, 0) = -s * std::sin(x[0]);
        jet.grad(1, 1) = -1.0;
    }
    if (order >= 2) jet.hess(1, 0, 0) = -s * std::cos(x[0]);
    if (order >= 3) jet.third(1, 0, 0, 0) = s * std::sin(x[0]);
}

double squared_norm(StateView x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void squared_norm_jet(StateView x, int order, Jet& jet) {
    jet.reset(1, x.size(), order);
    jet.value[0] = squared_norm(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (order >= 1) jet.grad(0, i) = 2.0 * x[i];
        if (order >= 2) jet.hess(0, i, i) = 2.0;
    }
}

JumpDiffusionModel test_problem_skeleton() {
    JumpDiffusionModel m;
    m.dim = 2;
    m.wiener_dim = 1;
    m.mark_dim = 1;
    m.horizon = 1.0;
    m.initial_state = {0.0, 0.0};
    m.jump = test_jump;
    m.jump_jet = test_jump_jet;
    m.intensity = test_intensity;
    m.intensity_max = 1.0;
    m.inverse_cumulative_intensity = [](double s) { return std::expm1(s); };
    m.mark_sampler = test_marks;
    m.payoff = squared_norm;
    m.payoff_jet = squared_norm_jet;
    m.derivative_order = 3;
    return m;
}

}  // namespace

JumpDiffusionModel builtin_test_problem() {
    JumpDiffusionModel m = test_problem_skeleton();
    m.name = "test5";
    m.drift = [](double t, StateView x, std::span<double> a) {
        a[0] = -x[1];
        a[1] = x[0] + 0.5 * test_intensity(t) * x[1];
    };
    m.drift_jet = [](double t, StateView x, int order, Jet& jet) {
        jet.reset(2, 2, order);
        const double lam = test_intensity(t);
        jet.value = {-x[1], x[0] + 0.5 * lam * x[1]};
        jet.dt[1] = -0.5 * lam * lam * x[1];
        if (order >= 1) {
            jet.grad(0, 1) = -1.0;
            jet.grad(1, 0) = 1.0;
            jet.grad(1, 1) = 0.5 * lam;
        }
    };
    // b^1 = (sqrt(lambda/(1+t)) sin x1, 0) = (sin x1 / (1+t), 0)
    m.diffusion = [](double t, StateView x, std::span<double> b) {
        b[0] = std::sqrt(test_intensity(t) / (1.0 + t)) * std::sin(x[0]);
        b[1] = 0.0;
    };
    m.diffusion_jet = [](double t, StateView x, int order, Jet& jet) {
        jet.reset(2, 2, order);
        const double s = std::sqrt(test_intensity(t) / (1.0 + t));
        const double sn = std::sin(x[0]), cs = std::cos(x[0]);
        jet.value[0] = s * sn;
        jet.dt[0] = -s * s * sn;
        if (order >= 1) jet.grad(0, 0) = s * cs;
        if (order >= 2) jet.hess(0, 0, 0) = -s * sn;
        if (order >= 3) jet.third(0, 0, 0, 0) = -s * cs;
    };
    m.exact_answer = 0.5;
    return m;
}

JumpDiffusionModel pure_jump_test_problem() {
    JumpDiffusionModel m = test_problem_skeleton();
    m.name = "test5-purejump";
    m.drift = [](double, StateView, std::span<double> a) { std::fill(a.begin(), a.end(), 0.0); };
    m.diffusion = [](double, StateView, std::span<double> b) { std::fill(b.begin(), b.end(), 0.0); };
    m.drift_jet = [](double, StateView x, int order, Jet& jet) { jet.reset(2, x.size(), order); };
    m.diffusion_jet = [](double, StateView x, int order, Jet& jet) { jet.reset(2, x.size(), order); };
    m.exact_answer = 0.5 * std::numbers::ln2;
    return m;
}

// ---------------------------------------------------------------------------
// Finite-difference adapter
// ---------------------------------------------------------------------------

namespace {

using PointFn = std::function<void(StateView x, std::span<double> out)>;

// Fills jet.value, d1, d2, d3 (not dt) by central differences of f around x.
void fd_state_jet(const PointFn& f, std::size_t outputs, StateView x0, int order, double h,
                  Jet& jet) {
    const std::size_t d = x0.size();
    jet.reset(outputs, d, order);
    f(x0, jet.value);
    if (order < 1) return;

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> fp(outputs), fm(outputs), fpp(outputs), fpm(outputs), fmp(outputs),
        fmm(outputs);

    const double h1 = h;
    for (std::size_t i = 0; i < d; ++i) {
        x[i] = x0[i] + h1;
        f(x, fp);
        x[i] = x0[i] - h1;
        f(x, fm);
        x[i] = x0[i];
        for (std::size_t o = 0; o < outputs; ++o) jet.grad(o, i) = (fp[o] - fm[o]) / (2.0 * h1);
    }
    if (order < 2) return;

    // Second differences at an arbitrary base point with step s.
    auto second = [&](std::vector<double>& base, std::size_t i, std::size_t j, double s,
                      std::vector<double>& out) {
        const double bi = base[i], bj = base[j];
        if (i == j) {
            std::vector<double> f0(outputs);
            f(base, f0);
            base[i] = bi + s;
            f(base, fp);
            base[i] = bi - s;
            f(base, fm);
            base[i] = bi;
            for (std::size_t o = 0; o < outputs; ++o) out[o] = (fp[o] - 2.0 * f0[o] + fm[o]) / (s * s);
            return;
        }
        base[i] = bi + s; base[j] = bj + s; f(base, fpp);
        base[i] = bi + s; base[j] = bj - s; f(base, fpm);
        base[i] = bi - s; base[j] = bj + s; f(base, fmp);
        base[i] = bi - s; base[j] = bj - s; f(base, fmm);
        base[i] = bi; base[j] = bj;
        for (std::size_t o = 0; o < outputs; ++o) {
            out[o] = (fpp[o] - fpm[o] - fmp[o] + fmm[o]) / (4.0 * s * s);
        }
    };

    const double h2 = std::pow(h, 0.75);
    std::vector<double> s2(outputs);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            second(x, i, j, h2, s2);
            for (std::size_t o = 0; o < outputs; ++o) {
                jet.hess(o, i, j) = s2[o];
                jet.hess(o, j, i) = s2[o];
            }
        }
    }
    if (order < 3) return;

    const double h3 = std::pow(h, 0.6);
    std::vector<double> up(outputs), down(outputs);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            for (std::size_t k = j; k < d; ++k) {
                x[k] = x0[k] + h3;
                second(x, i, j, h3, up);
                x[k] = x0[k] - h3;
                second(x, i, j, h3, down);
                x[k] = x0[k];
                for (std::size_t o = 0; o < outputs; ++o) {
                    const double v = (up[o] - down[o]) / (2.0 * h3);
                    const std::size_t p[3] = {i, j, k};
                    // fill all permutations of (i, j, k)
                    jet.third(o, p[0], p[1], p[2]) = v;
                    jet.third(o, p[0], p[2], p[1]) = v;
                    jet.third(o, p[1], p[0], p[2]) = v;
                    jet.third(o, p[1], p[2], p[0]) = v;
                    jet.third(o, p[2], p[0], p[1]) = v;
                    jet.third(o, p[2], p[1], p[0]) = v;
                }
            }
        }
    }
}

FieldJetFn fd_field_jet(FieldFn field, std::size_t outputs, double h) {
    return [field = std::move(field), outputs, h](double t, StateView x, int order, Jet& jet) {
        const PointFn at_t = [&](StateView y, std::span<double> out) { field(t, y, out); };
        fd_state_jet(at_t, outputs, x, order, h, jet);
        std::vector<double> fp(outputs), fm(outputs);
        field(t + h, x, fp);
        field(t - h, x, fm);
        for (std::size_t o = 0; o < outputs; ++o) jet.dt[o] = (fp[o] - fm[o]) / (2.0 * h);
    };
}

}  // namespace

JumpDiffusionModel finite_difference_adapter(JumpDiffusionModel model, double h) {
    if (!(h > 0.0)) throw ParameterError("finite difference step must be positive");
    model.validate();
    const std::size_t d = model.dim;
    model.drift_jet = fd_field_jet(model.drift, d, h);
    model.diffusion_jet = fd_field_jet(model.diffusion, d * model.wiener_dim, h);
    model.jump_jet = [jump = model.jump, d, h](double t, StateView x, StateView z, int order, Jet& jet) {
        const PointFn at = [&](StateView y, std::span<double> out) { jump(t, y, z, out); };
        fd_state_jet(at, d, x, order, h, jet);
    };
    model.payoff_jet = [payoff = model.payoff, h](StateView x, int order, Jet& jet) {
        const PointFn at = [&](StateView y, std::span<double> out) { out[0] = payoff(y); };
        fd_state_jet(at, 1, x, order, h, jet);
    };
    model.derivative_order = 3;
    return model;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

struct Registry {
    std::mutex mutex;
    std::map<std::string, std::function<JumpDiffusionModel()>> factories{
        {"test5", builtin_test_problem},
        {"test5-purejump", pure_jump_test_problem},
    };
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

JumpDiffusionModel make_model(const std::string& name) {
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.factories.find(name);
    if (it == r.factories.end()) throw ParameterError("unknown model '" + name + "'");
    return it->second();
}

void register_model(const std::string& name, std::function<JumpDiffusionModel()> factory) {
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    r.factories[name] = std::move(factory);
}

std::vector<std::string> registered_models() {
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> names;
    for (const auto& [name, _] : r.factories) names.push_back(name);
    return names;
}

}  // namespace jdweak
