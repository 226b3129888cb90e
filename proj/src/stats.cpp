#include "jdweak/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "jdweak/errors.hpp"

namespace jdweak {

void NeumaierSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        compensation_ += (sum_ - t) + v;
    } else {
        compensation_ += (v - t) + sum_;
    }
    sum_ = t;
}

double compensated_sum(std::span<const double> values) {
    NeumaierSum s;
    for (double v : values) s.add(v);
    return s.value();
}

namespace {

SampleStats stats_from_sums(double sum, double sum_sq, std::size_t count) {
    SampleStats out;
    out.count = count;
    const double n = static_cast<double>(count);
    out.mean = sum / n;
    const double radicand = sum_sq / n - out.mean * out.mean;
    out.std = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
    return out;
}

}  // namespace

SampleStats sample_stats(std::span<const double> values) {
    if (values.size() < 2) throw ParameterError("sample statistics need at least two values");
    NeumaierSum s, sq;
    for (double v : values) {
        s.add(v);
        sq.add(v * v);
    }
    return stats_from_sums(s.value(), sq.value(), values.size());
}

double statistical_error_bound(double std, std::size_t m, double c0) {
    if (m == 0) throw ParameterError("sample size must be positive");
    return c0 * std / std::sqrt(static_cast<double>(m));
}

ToleranceBudget split_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ParameterError("TOL must be positive");
    ToleranceBudget b;
    b.total = tol;
    b.statistical = 2.0 * tol / 3.0;
    b.time = tol - b.statistical;
    b.time_mesh = 2.0 * tol / 9.0;
    // statistical + time_mesh lies within a factor two of tol, so this
    // difference is exact and the three parts add back to tol.
    b.time_statistical = tol - (b.statistical + b.time_mesh);
    return b;
}

std::size_t change_M(std::size_t m_in, double std_in, double tol_s, const StatParams& params) {
    if (!(tol_s > 0.0)) throw ParameterError("TOL_S must be positive");
    if (m_in == 0) throw ParameterError("M_in must be positive");
    const double cap = static_cast<double>(params.mch) * static_cast<double>(m_in);
    const double ratio = params.c0 * std_in / tol_s;
    const double wanted = std::floor(std::min(ratio * ratio, cap));
    const auto m_star = static_cast<std::uint64_t>(std::max(wanted, 1.0));
    const int bits = std::bit_width(m_star);
    if (bits >= 63) throw ParameterError("requested sample size overflows");
    return static_cast<std::size_t>(std::uint64_t{1} << bits);
}

MonteCarloResult monte_carlo(const BatchSampler& sampler, double tol_s, const StatParams& params,
                             std::size_t initial_m, std::uint64_t first_index) {
    if (!(tol_s > 0.0)) throw ParameterError("TOL_S must be positive");
    if (initial_m < 2) throw ParameterError("initial M must be at least 2");
    MonteCarloResult out;
    std::size_t m = initial_m;
    std::uint64_t index = first_index;
    NeumaierSum pooled_sum, pooled_sq;
    for (std::size_t batch = 0; batch < params.max_batches; ++batch) {
        const std::vector<double> y = sampler(index, m);
        if (y.size() != m) throw ParameterError("sampler returned the wrong number of samples");
        index += m;
        out.samples += m;
        SampleStats st = sample_stats(y);
        if (params.pooled) {
            for (double v : y) {
                pooled_sum.add(v);
                pooled_sq.add(v * v);
            }
            st = stats_from_sums(pooled_sum.value(), pooled_sq.value(), out.samples);
        }
        const double bound = statistical_error_bound(st.std, st.count, params.c0);
        out.batches.push_back({m, st.mean, st.std, bound});
        out.estimate = st.mean;
        out.std = st.std;
        out.error_bound = bound;
        out.final_m = m;
        if (bound <= tol_s) return out;
        m = change_M(m, st.std, tol_s, params);
    }
    throw NonConvergenceError("Monte Carlo did not reach TOL_S = " + std::to_string(tol_s) + " within " +
                              std::to_string(params.max_batches) + " batches (last E_S = " +
                              std::to_string(out.error_bound) + ")");
}

}  // namespace jdweak
