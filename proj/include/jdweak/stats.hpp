#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace jdweak {

/// Compensated (Neumaier) running sum. Adding the same values in the same
/// order always gives the same bits.
class NeumaierSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// Sample average and the biased standard deviation sqrt(A(Y^2) - A(Y)^2).
struct SampleStats {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

/// Throws ParameterError for fewer than two values.
SampleStats sample_stats(std::span<const double> values);

/// c0 * std / sqrt(M).
double statistical_error_bound(double std, std::size_t m, double c0);

/// Split of the total tolerance between statistical and time errors; the
/// time part is further split into the mesh part and its sampling error.
struct ToleranceBudget {
    double total = 0.0;
    double statistical = 0.0;       // 2/3 TOL
    double time = 0.0;              // 1/3 TOL
    double time_mesh = 0.0;         // 2/9 TOL
    double time_statistical = 0.0;  // 1/9 TOL
};

/// The three parts statistical + time_mesh + time_statistical add back to
/// TOL exactly when summed in that order. Throws ParameterError for TOL <= 0.
ToleranceBudget split_tolerance(double tol);

struct StatParams {
    double c0 = 1.65;
    std::size_t mch = 10;
    std::size_t initial_m = 100;
    std::size_t max_batches = 40;
    /// Average over all batches instead of the last one.
    bool pooled = false;
};

/// Next sample size: M* = min(floor((c0 S / TOL_S)^2), MCH M), at least 1,
/// rounded up to the power of two 2^(floor(log2 M*) + 1).
std::size_t change_M(std::size_t m_in, double std_in, double tol_s, const StatParams& params);

/// Draws `count` fresh samples whose global realization indices start at
/// `first_index`; returns them in index order.
using BatchSampler = std::function<std::vector<double>(std::uint64_t first_index, std::size_t count)>;

struct BatchRecord {
    std::size_t m = 0;
    double mean = 0.0;
    double std = 0.0;
    double error_bound = 0.0;
};

struct MonteCarloResult {
    double estimate = 0.0;
    double std = 0.0;
    double error_bound = 0.0;
    std::size_t final_m = 0;
    std::size_t samples = 0;
    std::vector<BatchRecord> batches;
};

/// Batches of new samples until c0 S / sqrt(M) <= TOL_S. The first batch uses
/// `initial_m` samples and index `first_index`. Throws NonConvergenceError
/// after params.max_batches batches.
MonteCarloResult monte_carlo(const BatchSampler& sampler, double tol_s, const StatParams& params,
                             std::size_t initial_m, std::uint64_t first_index = 0);

}  // namespace jdweak
