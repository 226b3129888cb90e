#include "jdweak/experiments.hpp"

#include <algorithm>

#include "jdweak/errors.hpp"
#include "jdweak/jumps.hpp"
#include "jdweak/kernels.hpp"
#include "jdweak/realization.hpp"
#include "jdweak/stats.hpp"

namespace jdweak {

SimulationSummary simulate_fixed(const JumpDiffusionModel& model, std::size_t n, std::size_t m, double c0,
                                 const RunOptions& options) {
    if (m < 2) throw ParameterError("M must be at least 2");
    const Simulator sim(model, options.seeds);
    const auto mesh = uniform_mesh(model.horizon, n);
    std::vector<double> payoff(m), steps(m), jumps(m);
    for_each_index(m, options.workers, [&](std::size_t i) {
        const EulerPath path = sim.path_on_mesh(mesh, i);
        payoff[i] = model.payoff(path.terminal());
        steps[i] = static_cast<double>(path.step_count());
        jumps[i] = static_cast<double>(path.grid.jump_count());
    });

    SimulationSummary out;
    out.n = n;
    out.m = m;
    const SampleStats g = sample_stats(payoff);
    out.mean = g.mean;
    out.std = g.std;
    out.statistical = statistical_error_bound(g.std, m, c0);
    out.exact = model.exact_answer;
    if (out.exact) out.computational_error = *out.exact - g.mean;
    out.mean_steps = compensated_sum(steps) / static_cast<double>(m);
    out.mean_jumps = compensated_sum(jumps) / static_cast<double>(m);
    for (double s : steps) out.work += static_cast<std::uint64_t>(s);
    return out;
}

EfficiencyResult efficiency_study(const JumpDiffusionModel& model, std::size_t n, std::size_t m, double c0,
                                  const RunOptions& options) {
    if (m < 2) throw ParameterError("M must be at least 2");
    model.require_derivatives(dual_order(options.density));
    const Simulator sim(model, options.seeds);
    const auto mesh = uniform_mesh(model.horizon, n);
    std::vector<double> payoff(m), error(m);
    for_each_index(m, options.workers, [&](std::size_t i) {
        const MeshSample s = sample_on_mesh(sim, mesh, i, options.density, 0.0);
        payoff[i] = s.payoff;
        error[i] = s.signed_error;
    });

    EfficiencyResult out;
    out.n = n;
    out.m = m;
    out.density = options.density;
    const SampleStats g = sample_stats(payoff);
    const SampleStats e = sample_stats(error);
    out.mean_payoff = g.mean;
    out.time_error = e.mean;
    out.statistical = statistical_error_bound(g.std, m, c0);
    out.time_statistical = statistical_error_bound(e.std, m, c0);
    out.exact = model.exact_answer;
    if (out.exact) {
        const double ec = *out.exact - g.mean;
        out.computational_error = ec;
        if (ec != 0.0) {
            const double spread = out.statistical + out.time_statistical;
            const double a = (out.time_error - spread) / ec;
            const double b = (out.time_error + spread) / ec;
            out.lower = std::min(a, b);
            out.upper = std::max(a, b);
        }
        if (out.time_error != 0.0) out.efficiency_index = ec / out.time_error;
    }
    return out;
}

}  // namespace jdweak
