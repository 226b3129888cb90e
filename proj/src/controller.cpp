#include "jdweak/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jdweak/density.hpp"
#include "jdweak/duals.hpp"
#include "jdweak/errors.hpp"
#include "jdweak/euler.hpp"
#include "jdweak/kernels.hpp"

namespace jdweak {

namespace {

constexpr double kRefinementConstant = 0.55;

}  // namespace

ThresholdScale parse_threshold_scale(const std::string& name) {
    if (name == "split") return ThresholdScale::split;
    if (name == "total") return ThresholdScale::total;
    throw ParameterError("unknown threshold scale '" + name + "' (expected split or total)");
}

std::string to_string(ThresholdScale scale) { return scale == ThresholdScale::total ? "total" : "split"; }

void validate(const AdaptParams& p) {
    const double factor = 2.0 / kRefinementConstant;
    if (!(p.d1 > 0.0) || !(p.D1 > factor * p.d1)) {
        throw ParameterError("need d1 > 0 and D1 > (2/c) d1 with c = 0.55");
    }
    if (!(p.s1 > 0.0) || !(p.S1 > factor * p.s1)) {
        throw ParameterError("need s1 > 0 and S1 > (2/c) s1 with c = 0.55");
    }
    if (p.initial_n == 0) throw ParameterError("initial mesh needs at least one step");
    if (p.max_iterations == 0) throw ParameterError("iteration cap must be positive");
    if (!(p.min_step_fraction > 0.0)) throw ParameterError("minimum step fraction must be positive");
}

void validate(const StatParams& p) {
    if (!(p.c0 >= 1.65)) throw ParameterError("c0 must be at least 1.65");
    if (p.mch < 2) throw ParameterError("MCH must be at least 2");
    if (p.initial_m < 2) throw ParameterError("initial M must be at least 2");
    if (p.max_batches == 0) throw ParameterError("batch cap must be positive");
}

std::vector<double> refine_deterministic(std::span<const double> mesh, std::span<const double> rbar,
                                         double tol_tt, double d1) {
    if (mesh.size() < 2 || rbar.size() != mesh.size() - 1) {
        throw ParameterError("one averaged indicator per mesh step expected");
    }
    const double threshold = d1 * tol_tt / static_cast<double>(rbar.size());
    std::vector<double> out;
    out.reserve(2 * mesh.size());
    out.push_back(mesh[0]);
    for (std::size_t n = 0; n < rbar.size(); ++n) {
        if (rbar[n] >= threshold) out.push_back(mesh[n] + 0.5 * (mesh[n + 1] - mesh[n]));
        out.push_back(mesh[n + 1]);
    }
    return out;
}

bool stopping_deterministic(std::span<const double> rbar, std::size_t n, double tol_tt, double D1) {
    if (n == 0) throw ParameterError("mesh size must be positive");
    const double limit = D1 * tol_tt / static_cast<double>(n);
    return std::all_of(rbar.begin(), rbar.end(), [limit](double r) { return r < limit; });
}

namespace {

void check_tol(double tol) {
    if (!(tol > 0.0 && tol < 1.0)) throw ParameterError("TOL must lie in (0, 1)");
}

std::optional<double> error_against(const JumpDiffusionModel& model, double estimate) {
    if (!model.exact_answer) return std::nullopt;
    return *model.exact_answer - estimate;
}

}  // namespace

AdaptiveRunReport algorithm_D(const JumpDiffusionModel& model, double tol, const StatParams& stat,
                              const AdaptParams& adapt, const RunOptions& options) {
    check_tol(tol);
    validate(stat);
    validate(adapt);
    model.require_derivatives(dual_order(options.density));

    AdaptiveRunReport report;
    report.algorithm = "D";
    report.model = model.name;
    report.tol = tol;
    report.budget = split_tolerance(tol);
    report.stat = stat;
    report.adapt = adapt;
    report.options = options;
    report.exact = model.exact_answer;
    const ToleranceBudget& budget = report.budget;

    const double threshold_tol = adapt.threshold == ThresholdScale::total ? tol : budget.time_mesh;
    const Simulator sim(model, options.seeds);
    std::vector<double> mesh = uniform_mesh(model.horizon, adapt.initial_n);
    std::size_t m_t = stat.initial_m;
    std::uint64_t next_index = 0;
    bool converged = false;

    for (std::size_t k = 1; k <= adapt.max_iterations; ++k) {
        const std::size_t n = mesh.size() - 1;
        report.mesh_history.push_back(mesh);
        report.m_history.push_back(m_t);

        std::vector<MeshSample> samples(m_t);
        const std::uint64_t first = next_index;
        for_each_index(m_t, options.workers, [&](std::size_t i) {
            samples[i] = sample_on_mesh(sim, mesh, first + i, options.density, tol);
        });
        next_index += m_t;

        std::vector<NeumaierSum> rsum(n);
        std::vector<double> payoff(m_t), rtotal(m_t), signed_error(m_t);
        for (std::size_t i = 0; i < m_t; ++i) {
            const MeshSample& s = samples[i];
            for (std::size_t j = 0; j < n; ++j) rsum[j].add(s.indicators[j]);
            payoff[i] = s.payoff;
            rtotal[i] = s.indicator_total;
            signed_error[i] = s.signed_error;
            report.work.total_steps += s.steps;
        }
        report.work.realizations += m_t;
        std::vector<double> rbar(n);
        for (std::size_t j = 0; j < n; ++j) rbar[j] = rsum[j].value() / static_cast<double>(m_t);

        const SampleStats g = sample_stats(payoff);
        const SampleStats r = sample_stats(rtotal);
        const double e_ts = statistical_error_bound(r.std, m_t, stat.c0);
        const bool mesh_ok = stopping_deterministic(rbar, n, threshold_tol, adapt.D1);

        IterationRecord row;
        row.iteration = k;
        row.n = n;
        row.m = m_t;
        row.mean_payoff = g.mean;
        row.computational_error = error_against(model, g.mean);
        row.time_error = compensated_sum(signed_error) / static_cast<double>(m_t);
        row.indicator_sum = r.mean;
        row.time_statistical = e_ts;
        row.statistical = statistical_error_bound(g.std, m_t, stat.c0);
        row.max_indicator = *std::max_element(rbar.begin(), rbar.end());
        report.indicator_sum = r.mean;
        report.time_statistical = e_ts;

        if (mesh_ok && e_ts <= budget.time_statistical) {
            row.action = "accept mesh";
            report.iterations.push_back(row);
            converged = true;
            break;
        }
        if (!mesh_ok) {
            mesh = refine_deterministic(mesh, rbar, threshold_tol, adapt.d1);
            row.action = "refine";
        } else {
            m_t = change_M(m_t, r.std, budget.time_statistical, stat);
            row.action = "grow M";
        }
        report.iterations.push_back(row);
    }
    if (!converged) {
        const auto& last = report.iterations.back();
        throw NonConvergenceError("Algorithm D did not converge in " + std::to_string(adapt.max_iterations) +
                                  " iterations (N = " + std::to_string(last.n) +
                                  ", M = " + std::to_string(last.m) +
                                  ", E_TS = " + std::to_string(*last.time_statistical) + ")");
    }

    std::uint64_t final_steps = 0;
    const BatchSampler sampler = [&](std::uint64_t first, std::size_t count) {
        std::vector<double> y(count);
        std::vector<std::size_t> steps(count);
        for_each_index(count, options.workers, [&](std::size_t i) {
            y[i] = payoff_on_mesh(sim, mesh, first + i, &steps[i]);
        });
        final_steps = 0;
        for (std::size_t s : steps) final_steps += s;
        report.work.total_steps += final_steps;
        report.work.realizations += count;
        return y;
    };
    const MonteCarloResult mc = monte_carlo(sampler, budget.statistical, stat, m_t, next_index);

    std::size_t row_index = report.iterations.size();
    for (const BatchRecord& b : mc.batches) {
        IterationRecord row;
        row.iteration = ++row_index;
        row.n = mesh.size() - 1;
        row.m = b.m;
        row.mean_payoff = b.mean;
        row.computational_error = error_against(model, b.mean);
        row.statistical = b.error_bound;
        row.action = "monte carlo";
        row.final_phase = true;
        report.iterations.push_back(row);
    }
    report.estimate = mc.estimate;
    report.statistical = mc.error_bound;
    report.final_m = mc.final_m;
    report.computational_error = error_against(model, mc.estimate);
    report.work.final_steps = final_steps;
    return report;
}

ControlResult control_time_error(const JumpDiffusionModel& model, const JumpRealization& jumps,
                                 std::span<const double> initial_mesh, RandomStream& wiener, double tol,
                                 double tol_t, double nbar, const AdaptParams& adapt) {
    check_tol(tol);
    if (!(nbar > 0.0)) throw ParameterError("average step count must be positive");
    const std::size_t l0 = model.wiener_dim;
    AugmentedGrid grid = build_augmented_grid(initial_mesh, jumps.times);
    std::vector<double> dw = sample_wiener_increments(grid, l0, wiener);
    const double refine_at = adapt.s1 * tol_t / nbar;
    const double stop_below = adapt.S1 * tol_t / nbar;
    const double min_step = adapt.min_step_fraction * model.horizon;

    ControlResult out;
    out.jumps = jumps.count();
    for (std::size_t level = 0;; ++level) {
        const EulerPath path = euler_path(model, grid, dw, jumps);
        out.payoff = model.payoff(path.terminal());
        out.steps = path.step_count();
        out.levels = level;
        out.work += path.step_count();

        const DualWeights duals = backward_duals(model, path, 3);
        const auto density = cutoff_density_S(rho_tilde(model, path, duals), tol);
        const auto ind = error_indicators(density, step_lengths(grid));
        if (ind.max() < stop_below) return out;

        std::vector<std::size_t> marked;
        for (std::size_t n = 0; n < ind.size(); ++n) {
            if (ind.indicator[n] >= refine_at) marked.push_back(n);
        }
        try {
            RefinedMesh refined = brownian_bridge_refine(grid, dw, l0, marked, wiener, min_step);
            grid = std::move(refined.grid);
            dw = std::move(refined.increments);
        } catch (const RefinementDepthError&) {
            out.floor_hit = true;
            return out;
        }
    }
}

AdaptiveRunReport algorithm_S(const JumpDiffusionModel& model, double tol, const StatParams& stat,
                              const AdaptParams& adapt, const RunOptions& options) {
    check_tol(tol);
    validate(stat);
    validate(adapt);
    model.require_derivatives(3);

    AdaptiveRunReport report;
    report.algorithm = "S";
    report.model = model.name;
    report.tol = tol;
    report.budget = split_tolerance(tol);
    report.stat = stat;
    report.adapt = adapt;
    report.options = options;
    report.options.density = DensityMode::rhotilde;
    report.exact = model.exact_answer;
    const ToleranceBudget& budget = report.budget;

    const double threshold_tol = adapt.threshold == ThresholdScale::total ? tol : budget.time;
    const Simulator sim(model, options.seeds);
    const std::vector<double> mesh = uniform_mesh(model.horizon, adapt.initial_n);
    report.mesh_history.push_back(mesh);
    double nbar = static_cast<double>(adapt.initial_n);
    std::size_t m = stat.initial_m;
    std::uint64_t next_index = 0;

    for (std::size_t batch = 1; batch <= stat.max_batches; ++batch) {
        report.m_history.push_back(m);
        std::vector<ControlResult> results(m);
        const std::uint64_t first = next_index;
        for_each_index(m, options.workers, [&](std::size_t i) {
            const JumpRealization jr = sim.jumps(first + i);
            RandomStream w = sim.wiener_stream(first + i);
            results[i] = control_time_error(model, jr, mesh, w, tol, threshold_tol, nbar, adapt);
        });
        next_index += m;

        std::vector<double> payoff(m), steps(m);
        StochasticBatch row;
        row.batch = batch;
        row.m = m;
        row.nbar_used = nbar;
        row.min_steps = results[0].steps;
        std::uint64_t final_steps = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const ControlResult& c = results[i];
            payoff[i] = c.payoff;
            steps[i] = static_cast<double>(c.steps);
            row.min_steps = std::min(row.min_steps, c.steps);
            row.max_steps = std::max(row.max_steps, c.steps);
            row.max_jumps = std::max(row.max_jumps, c.jumps);
            row.floor_hits += c.floor_hit ? 1 : 0;
            final_steps += c.steps;
            report.work.total_steps += c.work;
        }
        report.work.realizations += m;
        const SampleStats g = sample_stats(payoff);
        const SampleStats na = sample_stats(steps);
        row.mean_payoff = g.mean;
        row.std_payoff = g.std;
        row.statistical = statistical_error_bound(g.std, m, stat.c0);
        row.mean_steps = na.mean;
        row.std_steps = na.std;
        report.batches.push_back(row);

        report.estimate = g.mean;
        report.statistical = row.statistical;
        report.final_m = m;
        report.work.final_steps = final_steps;
        if (row.statistical <= budget.statistical) {
            report.computational_error = error_against(model, g.mean);
            return report;
        }
        m = change_M(m, g.std, budget.statistical, stat);
        nbar = na.mean;
    }
    throw NonConvergenceError("Algorithm S did not reach TOL_S within " + std::to_string(stat.max_batches) +
                              " batches (last E_S = " + std::to_string(report.statistical) + ")");
}

}  // namespace jdweak
