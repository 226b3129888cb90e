#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jdweak/jumps.hpp"
#include "jdweak/model.hpp"
#include "jdweak/realization.hpp"
#include "jdweak/rng.hpp"
#include "jdweak/stats.hpp"

namespace jdweak {

/// Tolerance scaling the refinement and stopping thresholds: the time share
/// of the budget (TOL_TT for D, TOL_T for S) or the total TOL.
enum class ThresholdScale { split, total };

ThresholdScale parse_threshold_scale(const std::string& name);
std::string to_string(ThresholdScale scale);

struct AdaptParams {
    double d1 = 2.0;
    double D1 = 8.0;
    double s1 = 2.0;
    double S1 = 8.0;
    std::size_t initial_n = 5;
    std::size_t max_iterations = 30;
    double min_step_fraction = kMinStepFraction;
    ThresholdScale threshold = ThresholdScale::split;
};

/// Throws ParameterError unless D1 > (2/c) d1 and S1 > (2/c) s1 with c = 0.55.
void validate(const AdaptParams& params);
void validate(const StatParams& params);

struct RunOptions {
    Seeds seeds;
    int workers = 1;
    DensityMode density = DensityMode::rhotilde;
};

/// Bisects every coarse step whose averaged indicator is >= d1 TOL_TT / N.
std::vector<double> refine_deterministic(std::span<const double> mesh, std::span<const double> rbar,
                                         double tol_tt, double d1);

/// max rbar < D1 TOL_TT / N.
bool stopping_deterministic(std::span<const double> rbar, std::size_t n, double tol_tt, double D1);

/// One row per pass of the adaptive loop; the final Monte Carlo batches of
/// Algorithm D appear as rows with `final_phase` set.
struct IterationRecord {
    std::size_t iteration = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    double mean_payoff = 0.0;
    std::optional<double> computational_error;
    std::optional<double> time_error;        // signed density estimate
    std::optional<double> indicator_sum;     // E_TT: mean of sum r
    std::optional<double> time_statistical;  // E_TS
    double statistical = 0.0;                // E_S
    std::optional<double> max_indicator;
    std::string action;
    bool final_phase = false;
};

/// Statistics of one batch of Algorithm S.
struct StochasticBatch {
    std::size_t batch = 0;
    std::size_t m = 0;
    double nbar_used = 0.0;
    double mean_payoff = 0.0;
    double std_payoff = 0.0;
    double statistical = 0.0;
    double mean_steps = 0.0;
    std::size_t min_steps = 0;
    std::size_t max_steps = 0;
    double std_steps = 0.0;
    std::size_t max_jumps = 0;
    std::size_t floor_hits = 0;
};

struct WorkCounters {
    std::uint64_t realizations = 0;
    /// Sum of final N_A over all realizations of the accepted estimate.
    std::uint64_t final_steps = 0;
    /// Every Euler step taken, all iterations and refinement levels included.
    std::uint64_t total_steps = 0;
};

struct AdaptiveRunReport {
    std::string algorithm;
    std::string model;
    double tol = 0.0;
    ToleranceBudget budget;
    StatParams stat;
    AdaptParams adapt;
    RunOptions options;

    double estimate = 0.0;
    double statistical = 0.0;
    std::optional<double> indicator_sum;
    std::optional<double> time_statistical;
    std::optional<double> exact;
    std::optional<double> computational_error;
    std::size_t final_m = 0;

    std::vector<IterationRecord> iterations;
    std::vector<StochasticBatch> batches;
    std::vector<std::vector<double>> mesh_history;
    std::vector<std::size_t> m_history;
    WorkCounters work;
};

/// Quasi-deterministic adaptive algorithm: shared coarse mesh refined from
/// averaged indicators, then a Monte Carlo phase with TOL_S on the frozen mesh.
AdaptiveRunReport algorithm_D(const JumpDiffusionModel& model, double tol, const StatParams& stat,
                              const AdaptParams& adapt, const RunOptions& options);

struct ControlResult {
    double payoff = 0.0;
    std::size_t steps = 0;
    std::size_t jumps = 0;
    std::size_t levels = 0;
    std::uint64_t work = 0;
    bool floor_hit = false;
};

/// Per-realization stochastic refinement: bisects every step with
/// r_n >= s1 TOL_T / nbar (extending the Wiener path by Brownian bridges)
/// until max r_n < S1 TOL_T / nbar. `tol` sets the density clamp band. If a
/// step would go below the floor, the last path is accepted and floor_hit
/// is set.
ControlResult control_time_error(const JumpDiffusionModel& model, const JumpRealization& jumps,
                                 std::span<const double> initial_mesh, RandomStream& wiener, double tol,
                                 double tol_t, double nbar, const AdaptParams& adapt);

/// Stochastic-step adaptive algorithm.
AdaptiveRunReport algorithm_S(const JumpDiffusionModel& model, double tol, const StatParams& stat,
                              const AdaptParams& adapt, const RunOptions& options);

}  // namespace jdweak
