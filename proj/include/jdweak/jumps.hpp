#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jdweak/model.hpp"
#include "jdweak/rng.hpp"

namespace jdweak {

/// Cumulative intensity Lambda(t) = int_0^t lambda(s) ds on [0, T].
///
/// Built once per model: Lambda is tabulated at panel edges by adaptive
/// Gauss-Kronrod quadrature, then evaluated inside a panel by integrating
/// from the nearest edge. The table is read-only after construction and may
/// be shared between threads.
class IntensityIntegral {
public:
    IntensityIntegral(IntensityFn intensity, double horizon, std::size_t panels = 64);
    explicit IntensityIntegral(const JumpDiffusionModel& model, std::size_t panels = 64);

    double horizon() const noexcept { return horizon_; }
    double total() const noexcept { return cumulative_.back(); }

    /// Lambda(t) for t in [0, T].
    double operator()(double t) const;

    /// Smallest t with Lambda(t) = s, for s in [0, Lambda(T)], via bracketed
    /// Newton iteration (bisection fallback) to 1e-12 absolute.
    double inverse(double s) const;

private:
    double integrate(double a, double b) const;
    double checked_intensity(double t) const;

    IntensityFn intensity_;
    double horizon_;
    std::vector<double> edges_;
    std::vector<double> cumulative_;
};

/// Jump times tau_1 < ... < tau_N in (0, T) and their marks (flattened,
/// mark_dim values per jump).
struct JumpRealization {
    std::vector<double> times;
    std::vector<double> marks;
    std::size_t mark_dim = 0;

    std::size_t count() const noexcept { return times.size(); }
    std::span<const double> mark(std::size_t k) const {
        return std::span<const double>(marks).subspan(k * mark_dim, mark_dim);
    }
};

/// tau_k = Lambda^{-1}(eps_1 + ... + eps_k), stopping at the first partial
/// sum exceeding Lambda(T). Uses the model's closed-form inverse when
/// present. Throws ParameterError if `exponentials` runs out first.
std::vector<double> jump_times_from_exponentials(const JumpDiffusionModel& model,
                                                 const IntensityIntegral& lambda,
                                                 std::span<const double> exponentials);

/// Samples jump times with unit exponentials drawn from `rng`. Marks are left
/// empty; see sample_marks.
JumpRealization sample_jump_times(const JumpDiffusionModel& model, const IntensityIntegral& lambda,
                                  RandomStream& rng);

/// Draws Z_k ~ mu(tau_k, dz) through the model's mark sampler.
void sample_marks(const JumpDiffusionModel& model, JumpRealization& jumps, RandomStream& rng);

/// Union of a deterministic mesh and a realization's jump times.
struct AugmentedGrid {
    /// t_0 = 0 < t_1 < ... < t_{N_A} = T
    std::vector<double> nodes;
    /// For each node, the index k of the jump landing there, or -1.
    std::vector<int> jump_of_node;
    /// Position in `nodes` of each deterministic node (size N + 1).
    std::vector<std::size_t> deterministic_index;
    /// Coarse interval m containing each step n (size N_A).
    std::vector<std::size_t> interval_of_step;

    std::size_t step_count() const noexcept { return nodes.size() - 1; }
    std::size_t interval_count() const noexcept { return deterministic_index.size() - 1; }
    double step(std::size_t n) const { return nodes[n + 1] - nodes[n]; }
    double interval_length(std::size_t m) const {
        return nodes[deterministic_index[m + 1]] - nodes[deterministic_index[m]];
    }
    bool is_jump(std::size_t node) const { return jump_of_node[node] >= 0; }
    std::size_t jump_count() const;
};

/// Relative distance (in units of T) below which a jump time is merged into a
/// deterministic node.
inline constexpr double kCollisionTolerance = 1e-14;

/// Builds the augmented grid. Throws ParameterError unless the deterministic
/// nodes are strictly increasing from 0 to T.
AugmentedGrid build_augmented_grid(std::span<const double> deterministic_nodes,
                                   std::span<const double> jump_times);

/// Uniform mesh 0, T/N, ..., T.
std::vector<double> uniform_mesh(double horizon, std::size_t steps);

}  // namespace jdweak
