#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jdweak/rng.hpp"

namespace jdweak {

/// Value and derivatives of a vector field f: (t, x) -> R^outputs, x in R^dim.
///
/// Layout is dense and output-major:
///   d1[o*dim + i]                  = d f_o / d x_i
///   d2[(o*dim + i)*dim + j]        = d^2 f_o / d x_i d x_j
///   d3[((o*dim + i)*dim + j)*dim + k]
/// `dt` holds the first time derivative when the field depends on time.
struct Jet {
    std::size_t outputs = 0;
    std::size_t dim = 0;
    int order = 0;
    std::vector<double> value;
    std::vector<double> dt;
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<double> d3;

    Jet() = default;
    Jet(std::size_t outputs, std::size_t dim, int order) { reset(outputs, dim, order); }

    /// Resizes for the given shape and zero-fills every block up to `order`.
    void reset(std::size_t outputs, std::size_t dim, int order);

    double& grad(std::size_t o, std::size_t i) { return d1[o * dim + i]; }
    double& hess(std::size_t o, std::size_t i, std::size_t j) { return d2[(o * dim + i) * dim + j]; }
    double& third(std::size_t o, std::size_t i, std::size_t j, std::size_t k) {
        return d3[((o * dim + i) * dim + j) * dim + k];
    }
    double grad(std::size_t o, std::size_t i) const { return d1[o * dim + i]; }
    double hess(std::size_t o, std::size_t i, std::size_t j) const { return d2[(o * dim + i) * dim + j]; }
    double third(std::size_t o, std::size_t i, std::size_t j, std::size_t k) const {
        return d3[((o * dim + i) * dim + j) * dim + k];
    }
};

using StateView = std::span<const double>;

using FieldFn = std::function<void(double t, StateView x, std::span<double> out)>;
using JumpFn = std::function<void(double t, StateView x, StateView z, std::span<double> out)>;
using PayoffFn = std::function<double(StateView x)>;
using IntensityFn = std::function<double(double t)>;
using MarkSampler = std::function<void(double t, RandomStream& uniform, std::span<double> z)>;

using FieldJetFn = std::function<void(double t, StateView x, int order, Jet& jet)>;
using JumpJetFn = std::function<void(double t, StateView x, StateView z, int order, Jet& jet)>;
using PayoffJetFn = std::function<void(StateView x, int order, Jet& jet)>;

/// A jump-diffusion problem
///
///   dX = a(t, X-) dt + sum_l b^l(t, X-) dW^l + c(t, X-, z) p(dt, dz)
///
/// on [0, horizon], with deterministic jump intensity lambda(t) and a
/// time-dependent mark law, together with the payoff g. The diffusion is
/// stored row-major as a dim x wiener_dim matrix: out[i*wiener_dim + l] = b_i^l.
///
/// Derivative callbacks fill a Jet up to the requested order (and `dt` for
/// drift and diffusion). `derivative_order` is the highest order they support.
/// All callbacks must be reentrant; the model is shared by worker threads.
struct JumpDiffusionModel {
    std::string name;
    std::size_t dim = 0;
    std::size_t wiener_dim = 0;
    std::size_t mark_dim = 0;
    double horizon = 1.0;
    std::vector<double> initial_state;

    FieldFn drift;
    FieldFn diffusion;
    JumpFn jump;
    IntensityFn intensity;
    double intensity_max = 0.0;
    MarkSampler mark_sampler;
    PayoffFn payoff;

    FieldJetFn drift_jet;
    FieldJetFn diffusion_jet;
    JumpJetFn jump_jet;
    PayoffJetFn payoff_jet;
    int derivative_order = 0;

    /// Closed-form inverse of Lambda(t) = int_0^t lambda, when known.
    std::function<double(double)> inverse_cumulative_intensity;

    /// Known value of E[g(X(T))], when available.
    std::optional<double> exact_answer;

    /// Throws ParameterError if dimensions or mandatory callbacks are missing.
    void validate() const;
    /// Throws CapabilityError unless derivatives up to `order` are available.
    void require_derivatives(int order) const;
};

/// Drift a, diffusion b (dim x wiener_dim) and d = 1/2 b b^T (dim x dim).
struct Coefficients {
    std::vector<double> drift;
    std::vector<double> diffusion;
    std::vector<double> diffusion_tensor;
};

/// Evaluates a, b and d at (t, x). Throws ModelError naming the offending
/// coefficient if any value is non-finite.
Coefficients eval_coefficients(const JumpDiffusionModel& model, double t, StateView x);

/// Jet of d_km = 1/2 sum_l b_k^l b_m^l, treated as a field with dim*dim
/// outputs (output index k*dim + m), up to `order` <= 2, including dt.
void diffusion_tensor_jet(const JumpDiffusionModel& model, double t, StateView x, int order,
                          Jet& b_jet, Jet& d_jet);

/// The two-dimensional test problem with time-dependent intensity
/// lambda(t) = 1/(1+t), time-dependent marks with E[Z^2] = 1 and payoff
/// g(x) = |x|^2. E[g(X(1))] = 1/2.
JumpDiffusionModel builtin_test_problem();

/// Same jumps, marks and payoff as the test problem but with a = b = 0. The
/// Euler scheme is exact in law; E[g(X(1))] = log(2)/2.
JumpDiffusionModel pure_jump_test_problem();

/// Default step for finite_difference_adapter.
inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

/// Returns a copy of `model` whose derivative callbacks are central finite
/// differences of the value callbacks. `h` is the first-order step; orders 2
/// and 3 use h^(3/4) and h^(3/5) to balance truncation against cancellation.
/// Throws ParameterError if h <= 0.
JumpDiffusionModel finite_difference_adapter(JumpDiffusionModel model,
                                             double h = kDefaultFiniteDifferenceStep);

/// Looks up a model by name ("test5", "test5-purejump", or anything added via
/// register_model). Throws ParameterError for unknown names.
JumpDiffusionModel make_model(const std::string& name);
void register_model(const std::string& name, std::function<JumpDiffusionModel()> factory);
std::vector<std::string> registered_models();

}  // namespace jdweak
