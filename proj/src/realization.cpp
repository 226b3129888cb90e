#include "jdweak/realization.hpp"

#include "jdweak/density.hpp"
#include "jdweak/duals.hpp"
#include "jdweak/errors.hpp"

namespace jdweak {

DensityMode parse_density_mode(const std::string& name) {
    if (name == "rhodef") return DensityMode::rhodef;
    if (name == "rhotilde") return DensityMode::rhotilde;
    throw ParameterError("unknown density mode '" + name + "' (expected rhodef or rhotilde)");
}

std::string to_string(DensityMode mode) {
    return mode == DensityMode::rhodef ? "rhodef" : "rhotilde";
}

int dual_order(DensityMode mode) { return mode == DensityMode::rhodef ? 2 : 3; }

Simulator::Simulator(JumpDiffusionModel model, Seeds seeds)
    : model_((model.validate(), std::move(model))), lambda_(model_), seeds_(seeds) {}

RandomStream Simulator::wiener_stream(std::uint64_t index) const {
    return RandomStream(static_cast<std::uint64_t>(seeds_.wiener), index, StreamId::wiener);
}

JumpRealization Simulator::jumps(std::uint64_t index) const {
    RandomStream times(static_cast<std::uint64_t>(seeds_.jumps), index, StreamId::jump_times);
    RandomStream marks(static_cast<std::uint64_t>(seeds_.marks), index, StreamId::marks);
    JumpRealization out = sample_jump_times(model_, lambda_, times);
    sample_marks(model_, out, marks);
    return out;
}

EulerPath Simulator::path_on_mesh(std::span<const double> mesh, std::uint64_t index) const {
    const JumpRealization jr = jumps(index);
    AugmentedGrid grid = build_augmented_grid(mesh, jr.times);
    RandomStream w = wiener_stream(index);
    const auto dw = sample_wiener_increments(grid, model_.wiener_dim, w);
    return euler_path(model_, std::move(grid), dw, jr);
}

MeshSample sample_on_mesh(const Simulator& sim, std::span<const double> mesh, std::uint64_t index,
                          DensityMode mode, double clamp_tol) {
    const JumpDiffusionModel& model = sim.model();
    const EulerPath path = sim.path_on_mesh(mesh, index);
    const DualWeights duals = backward_duals(model, path, dual_order(mode));

    MeshSample out;
    out.payoff = model.payoff(path.terminal());
    out.steps = path.step_count();
    out.jumps = path.grid.jump_count();

    std::vector<double> per_interval;
    if (mode == DensityMode::rhodef) {
        per_interval = rho_det(model, path, duals);
        out.signed_error = signed_error_sum(per_interval, interval_lengths(path.grid));
    } else {
        const auto rho = rho_tilde(model, path, duals);
        out.signed_error = signed_error_sum(rho, step_lengths(path.grid));
        if (clamp_tol > 0.0) per_interval = aggregate_by_interval(path.grid, rho);
    }
    if (clamp_tol > 0.0) {
        for (double& v : per_interval) v = clamp_density(v, clamp_tol);
        const auto ind = error_indicators(per_interval, interval_lengths(path.grid));
        out.indicators = ind.indicator;
        out.indicator_total = ind.total;
    }
    return out;
}

double payoff_on_mesh(const Simulator& sim, std::span<const double> mesh, std::uint64_t index,
                      std::size_t* steps) {
    const EulerPath path = sim.path_on_mesh(mesh, index);
    if (steps) *steps = path.step_count();
    return sim.model().payoff(path.terminal());
}

}  // namespace jdweak
