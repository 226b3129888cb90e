#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "jdweak/jumps.hpp"
#include "jdweak/model.hpp"
#include "jdweak/rng.hpp"

namespace jdweak {

/// Forward Euler approximation on an augmented grid.
///
/// values(n) is X(t_n); left_value(n) is X(t_n-) for n >= 1 (and the initial
/// state for n = 0). At nodes without a jump the two coincide.
struct EulerPath {
    AugmentedGrid grid;
    std::size_t dim = 0;
    std::size_t wiener_dim = 0;
    std::size_t mark_dim = 0;
    std::vector<double> left_values;
    std::vector<double> values;
    std::vector<double> increments;
    std::vector<double> marks;

    std::size_t step_count() const noexcept { return grid.step_count(); }
    std::span<const double> value(std::size_t n) const {
        return std::span<const double>(values).subspan(n * dim, dim);
    }
    std::span<const double> left_value(std::size_t n) const {
        return std::span<const double>(left_values).subspan(n * dim, dim);
    }
    std::span<const double> increment(std::size_t n) const {
        return std::span<const double>(increments).subspan(n * wiener_dim, wiener_dim);
    }
    /// Mark of the jump landing on `node`; the node must be a jump node.
    std::span<const double> mark_at(std::size_t node) const {
        const auto k = static_cast<std::size_t>(grid.jump_of_node[node]);
        return std::span<const double>(marks).subspan(k * mark_dim, mark_dim);
    }
    std::span<const double> terminal() const { return value(step_count()); }
};

/// Runs the Euler scheme with the given Wiener increments (wiener_dim per
/// step) and jumps. Throws DivergenceError if a state becomes non-finite.
EulerPath euler_path(const JumpDiffusionModel& model, AugmentedGrid grid,
                     std::span<const double> increments, const JumpRealization& jumps);

/// Independent N(0, dt_n) increments, wiener_dim per step, on the quantum grid.
std::vector<double> sample_wiener_increments(const AugmentedGrid& grid, std::size_t wiener_dim,
                                             RandomStream& rng);

/// Minimum step relative to T allowed by bisection (30 levels).
inline constexpr double kMinStepFraction = 0x1.0p-30;

struct RefinedMesh {
    AugmentedGrid grid;
    std::vector<double> increments;
};

/// Bisects the listed steps (sorted, unique) and splits their increments by
/// Brownian bridges: for a step of length dt with increment w, the first half
/// gets w/2 + xi, xi ~ N(0, dt/4), and the second half gets the remainder.
/// The two halves sum to w exactly in floating point whenever the input
/// increments lie on the quantum grid (as sampled ones do). Midpoints are
/// non-jump nodes and become deterministic nodes of the new grid.
///
/// Throws RefinementDepthError if a half step would fall below `min_step`.
RefinedMesh brownian_bridge_refine(const AugmentedGrid& grid, std::span<const double> increments,
                                   std::size_t wiener_dim, std::span<const std::size_t> steps,
                                   RandomStream& rng, double min_step);

/// Wiener increments are kept on a fixed-point grid of spacing
/// increment_quantum(T) so that sums and differences of increments are exact
/// in double precision (the grid covers |w| < 128 sqrt(T) with ~2^-46 sqrt(T)
/// resolution).
double increment_quantum(double horizon);
double quantize_increment(double value, double quantum);

/// Splits w into (first, second) with first = w/2 + xi rounded to the
/// quantum and second = w - first. For w on the quantum grid,
/// first + second == w holds exactly.
std::pair<double, double> split_increment(double w, double xi, double quantum);

/// CSV dump: node, t, jump, left state..., state...
void write_path_csv(std::ostream& out, const EulerPath& path);

}  // namespace jdweak
