#include "jdweak/euler.hpp"

#include <cmath>
#include <iomanip>
#include <string>

#include "jdweak/errors.hpp"

namespace jdweak {

EulerPath euler_path(const JumpDiffusionModel& model, AugmentedGrid grid,
                     std::span<const double> increments, const JumpRealization& jumps) {
    const std::size_t d = model.dim;
    const std::size_t l0 = model.wiener_dim;
    const std::size_t steps = grid.step_count();
    if (increments.size() != steps * l0) {
        throw ParameterError("increment count does not match the grid");
    }
    if (grid.jump_count() != jumps.count()) {
        throw ParameterError("grid jump flags do not match the jump realization");
    }

    EulerPath path;
    path.dim = d;
    path.wiener_dim = l0;
    path.mark_dim = model.mark_dim;
    path.increments.assign(increments.begin(), increments.end());
    path.marks = jumps.marks;
    path.values.assign((steps + 1) * d, 0.0);
    path.left_values.assign((steps + 1) * d, 0.0);
    std::copy(model.initial_state.begin(), model.initial_state.end(), path.values.begin());
    std::copy(model.initial_state.begin(), model.initial_state.end(), path.left_values.begin());

    std::vector<double> a(d), b(d * l0), c(d);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = grid.nodes[n];
        const double dt = grid.nodes[n + 1] - t;
        std::span<const double> x(path.values.data() + n * d, d);
        double* left = path.left_values.data() + (n + 1) * d;
        double* next = path.values.data() + (n + 1) * d;

        model.drift(t, x, a);
        model.diffusion(t, x, b);
        const double* dw = increments.data() + n * l0;
        for (std::size_t i = 0; i < d; ++i) {
            double v = x[i] + a[i] * dt;
            for (std::size_t l = 0; l < l0; ++l) v += b[i * l0 + l] * dw[l];
            left[i] = v;
        }

        const int k = grid.jump_of_node[n + 1];
        if (k >= 0) {
            model.jump(grid.nodes[n + 1], std::span<const double>(left, d),
                       jumps.mark(static_cast<std::size_t>(k)), c);
            for (std::size_t i = 0; i < d; ++i) next[i] = left[i] + c[i];
        } else {
            std::copy(left, left + d, next);
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(next[i]) || !std::isfinite(left[i])) {
                throw DivergenceError("Euler path diverged at step " + std::to_string(n), n);
            }
        }
    }
    path.grid = std::move(grid);
    return path;
}

std::vector<double> sample_wiener_increments(const AugmentedGrid& grid, std::size_t wiener_dim,
                                             RandomStream& rng) {
    std::vector<double> dw(grid.step_count() * wiener_dim);
    const double quantum = increment_quantum(grid.nodes.back());
    for (std::size_t n = 0; n < grid.step_count(); ++n) {
        const double scale = std::sqrt(grid.step(n));
        for (std::size_t l = 0; l < wiener_dim; ++l) {
            dw[n * wiener_dim + l] = quantize_increment(scale * rng.normal(), quantum);
        }
    }
    return dw;
}

double increment_quantum(double horizon) {
    const int scale = static_cast<int>(std::ceil(std::log2(std::max(1.0, std::sqrt(horizon)))));
    return std::ldexp(1.0, scale - 46);
}

double quantize_increment(double value, double quantum) {
    return quantum * std::nearbyint(value / quantum);
}

std::pair<double, double> split_increment(double w, double xi, double quantum) {
    const double first = quantize_increment(0.5 * w + xi, quantum);
    return {first, w - first};
}

RefinedMesh brownian_bridge_refine(const AugmentedGrid& grid, std::span<const double> increments,
                                   std::size_t wiener_dim, std::span<const std::size_t> steps,
                                   RandomStream& rng, double min_step) {
    const std::size_t old_steps = grid.step_count();
    if (increments.size() != old_steps * wiener_dim) {
        throw ParameterError("increment count does not match the grid");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] >= old_steps || (i > 0 && steps[i] <= steps[i - 1])) {
            throw ParameterError("refinement steps must be sorted, unique and in range");
        }
        if (0.5 * grid.step(steps[i]) < min_step) {
            throw RefinementDepthError("refining step " + std::to_string(steps[i]) +
                                       " would go below the minimum step");
        }
    }

    RefinedMesh out;
    AugmentedGrid& g = out.grid;
    const std::size_t new_steps = old_steps + steps.size();
    g.nodes.reserve(new_steps + 1);
    g.jump_of_node.reserve(new_steps + 1);
    out.increments.reserve(new_steps * wiener_dim);

    // Every non-jump node of the refined mesh is treated as deterministic;
    // jump nodes keep their flag.
    const double quantum = increment_quantum(grid.nodes.back());
    std::size_t next_refined = 0;
    auto push_node = [&](double t, int jump) {
        if (jump < 0 || g.nodes.empty()) g.deterministic_index.push_back(g.nodes.size());
        g.nodes.push_back(t);
        g.jump_of_node.push_back(jump);
    };
    push_node(grid.nodes[0], -1);
    for (std::size_t n = 0; n < old_steps; ++n) {
        const double* w = increments.data() + n * wiener_dim;
        if (next_refined < steps.size() && steps[next_refined] == n) {
            ++next_refined;
            const double dt = grid.step(n);
            const double mid = grid.nodes[n] + 0.5 * dt;
            const double sd = 0.5 * std::sqrt(dt);
            std::vector<double> second(wiener_dim);
            for (std::size_t l = 0; l < wiener_dim; ++l) {
                const auto [a, b] = split_increment(w[l], sd * rng.normal(), quantum);
                out.increments.push_back(a);
                second[l] = b;
            }
            push_node(mid, -1);
            out.increments.insert(out.increments.end(), second.begin(), second.end());
        } else {
            out.increments.insert(out.increments.end(), w, w + wiener_dim);
        }
        push_node(grid.nodes[n + 1], grid.jump_of_node[n + 1]);
    }
    // The terminal node is always deterministic.
    if (g.deterministic_index.back() != g.nodes.size() - 1) {
        g.deterministic_index.push_back(g.nodes.size() - 1);
    }

    g.interval_of_step.resize(new_steps);
    std::size_t interval = 0;
    for (std::size_t n = 0; n < new_steps; ++n) {
        while (interval + 1 < g.deterministic_index.size() - 1 && g.deterministic_index[interval + 1] <= n) {
            ++interval;
        }
        g.interval_of_step[n] = interval;
    }
    return out;
}

void write_path_csv(std::ostream& out, const EulerPath& path) {
    out << "node,t,jump";
    for (std::size_t i = 0; i < path.dim; ++i) out << ",left_x" << i + 1;
    for (std::size_t i = 0; i < path.dim; ++i) out << ",x" << i + 1;
    out << '\n' << std::setprecision(17);
    for (std::size_t n = 0; n <= path.step_count(); ++n) {
        out << n << ',' << path.grid.nodes[n] << ',' << (path.grid.is_jump(n) ? 1 : 0);
        for (double v : path.left_value(n)) out << ',' << v;
        for (double v : path.value(n)) out << ',' << v;
        out << '\n';
    }
}

}  // namespace jdweak
