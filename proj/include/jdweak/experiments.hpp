#pragma once

#include <cstddef>
#include <optional>

#include "jdweak/controller.hpp"
#include "jdweak/model.hpp"

namespace jdweak {

/// Plain Monte Carlo on a fixed uniform mesh.
struct SimulationSummary {
    std::size_t n = 0;
    std::size_t m = 0;
    double mean = 0.0;
    double std = 0.0;
    double statistical = 0.0;
    std::optional<double> exact;
    std::optional<double> computational_error;
    double mean_steps = 0.0;
    double mean_jumps = 0.0;
    std::uint64_t work = 0;
};

SimulationSummary simulate_fixed(const JumpDiffusionModel& model, std::size_t n, std::size_t m, double c0,
                                 const RunOptions& options);

/// Time error estimate on a fixed uniform mesh compared with the true error.
///
/// time_error is the sample mean of the signed density sums; A and B divide
/// time_error -/+ (E_S + E_TS) by the computational error, and
/// efficiency_index is computational_error / time_error.
struct EfficiencyResult {
    std::size_t n = 0;
    std::size_t m = 0;
    DensityMode density = DensityMode::rhotilde;
    double mean_payoff = 0.0;
    double time_error = 0.0;
    double statistical = 0.0;
    double time_statistical = 0.0;
    std::optional<double> exact;
    std::optional<double> computational_error;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> efficiency_index;
};

EfficiencyResult efficiency_study(const JumpDiffusionModel& model, std::size_t n, std::size_t m, double c0,
                                  const RunOptions& options);

}  // namespace jdweak
