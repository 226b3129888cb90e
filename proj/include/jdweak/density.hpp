#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "jdweak/duals.hpp"
#include "jdweak/euler.hpp"
#include "jdweak/model.hpp"

namespace jdweak {

/// Per-coarse-interval error density from flux differences across each step;
/// needs duals of order >= 2. Output has grid.interval_count() entries.
std::vector<double> rho_det(const JumpDiffusionModel& model, const EulerPath& path,
                            const DualWeights& duals);

/// Per-step error density evaluated at (t_n, X(t_n)) with duals at t_{n+1}-;
/// needs duals of order 3. Output has grid.step_count() entries.
std::vector<double> rho_tilde(const JumpDiffusionModel& model, const EulerPath& path,
                              const DualWeights& duals);

/// Signed sum of density * step^2 over one realization: the leading-order
/// estimate of g(X(T)) - g(Xbar(T)) contributed by that path.
double signed_error_sum(std::span<const double> density, std::span<const double> steps);

/// Signed per-interval aggregate sum_{l in J_m} dt_l^2 rho_l / dt_m^2.
std::vector<double> aggregate_by_interval(const AugmentedGrid& grid, std::span<const double> step_density);

/// min(max(|rho|, TOL^(1/9)), 1/TOL), elementwise. TOL must lie in (0, 1).
double clamp_density(double rho, double tol);
std::vector<double> cutoff_density_S(std::span<const double> rho, double tol);

/// |aggregate_by_interval| clamped into the same band, per coarse interval.
std::vector<double> cutoff_density_D(const AugmentedGrid& grid, std::span<const double> step_density,
                                     double tol);

struct ErrorIndicators {
    std::vector<double> density;
    std::vector<double> step;
    std::vector<double> indicator;
    double total = 0.0;

    std::size_t size() const noexcept { return indicator.size(); }
    double max() const;
};

/// r_n = density_n * step_n^2 and their sum.
ErrorIndicators error_indicators(std::span<const double> density, std::span<const double> steps);

/// Step lengths of the augmented grid, and of its coarse intervals.
std::vector<double> step_lengths(const AugmentedGrid& grid);
std::vector<double> interval_lengths(const AugmentedGrid& grid);

/// CSV dump: index, t, step, density, indicator. `starts` gives the left end
/// of each step or interval.
void write_indicator_csv(std::ostream& out, std::span<const double> starts, const ErrorIndicators& ind);

}  // namespace jdweak
