#include "jdweak/density.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "jdweak/errors.hpp"

namespace jdweak {

namespace {

void check_tol(double tol) {
    if (!(tol > 0.0 && tol < 1.0)) throw ParameterError("TOL must lie in (0, 1)");
}

void check_duals(const EulerPath& path, const DualWeights& duals, int order) {
    if (duals.order < order) {
        throw CapabilityError("density needs duals of order " + std::to_string(order) + ", got " +
                              std::to_string(duals.order));
    }
    if (duals.dim != path.dim || duals.phi.size() != (path.step_count() + 1) * path.dim) {
        throw ParameterError("dual weights do not match the path");
    }
}

}  // namespace

std::vector<double> rho_det(const JumpDiffusionModel& model, const EulerPath& path,
                            const DualWeights& duals) {
    check_duals(path, duals, 2);
    const std::size_t d = model.dim;
    const AugmentedGrid& grid = path.grid;
    std::vector<double> rho(grid.interval_count(), 0.0);

    for (std::size_t n = 0; n < grid.step_count(); ++n) {
        const double t0 = grid.nodes[n], t1 = grid.nodes[n + 1];
        const Coefficients before = eval_coefficients(model, t0, path.value(n));
        const Coefficients after = eval_coefficients(model, t1, path.left_value(n + 1));
        const auto phi = duals.left(n + 1);
        const auto phi1 = duals.first_variation_left(n + 1);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s += (after.drift[i] - before.drift[i]) * phi[i];
            for (std::size_t k = 0; k < d; ++k) {
                s += (after.diffusion_tensor[i * d + k] - before.diffusion_tensor[i * d + k]) * phi1[i * d + k];
            }
        }
        const std::size_t m = grid.interval_of_step[n];
        const double coarse = grid.interval_length(m);
        rho[m] += 0.5 * s * grid.step(n) / (coarse * coarse);
    }
    return rho;
}

std::vector<double> rho_tilde(const JumpDiffusionModel& model, const EulerPath& path,
                              const DualWeights& duals) {
    check_duals(path, duals, 3);
    model.require_derivatives(2);
    const std::size_t d = model.dim;
    const std::size_t steps = path.step_count();
    std::vector<double> rho(steps, 0.0);

    Jet a, b, dd;
    std::vector<double> first(d), second(d * d);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = path.grid.nodes[n];
        const auto x = path.value(n);
        model.drift_jet(t, x, 2, a);
        diffusion_tensor_jet(model, t, x, 2, b, dd);
        const auto phi = duals.left(n + 1);
        const auto phi1 = duals.first_variation_left(n + 1);
        const auto phi2 = duals.second_variation_left(n + 1);
        auto dv = [&](std::size_t i, std::size_t j) { return dd.value[i * d + j]; };

        double total = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double s = a.dt[k];
            for (std::size_t j = 0; j < d; ++j) {
                s += a.grad(k, j) * a.value[j];
                for (std::size_t i = 0; i < d; ++i) s += a.hess(k, i, j) * dv(i, j);
            }
            total += s * phi[k];
        }
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t m = 0; m < d; ++m) {
                const std::size_t o = k * d + m;
                double s = dd.dt[o];
                for (std::size_t j = 0; j < d; ++j) {
                    s += dd.grad(o, j) * a.value[j] + 2.0 * a.grad(k, j) * dv(j, m);
                    for (std::size_t i = 0; i < d; ++i) s += dd.hess(o, i, j) * dv(i, j);
                }
                total += s * phi1[o];
            }
        }
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t m = 0; m < d; ++m) {
                const std::size_t o = k * d + m;
                for (std::size_t r = 0; r < d; ++r) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < d; ++j) s += dd.grad(o, j) * dv(j, r);
                    total += 2.0 * s * phi2[o * d + r];
                }
            }
        }
        rho[n] = 0.5 * total;
    }
    return rho;
}

double signed_error_sum(std::span<const double> density, std::span<const double> steps) {
    if (density.size() != steps.size()) throw ParameterError("density and step counts differ");
    double s = 0.0;
    for (std::size_t n = 0; n < density.size(); ++n) s += density[n] * steps[n] * steps[n];
    return s;
}

std::vector<double> aggregate_by_interval(const AugmentedGrid& grid, std::span<const double> step_density) {
    if (step_density.size() != grid.step_count()) throw ParameterError("one density per step expected");
    std::vector<double> out(grid.interval_count(), 0.0);
    for (std::size_t n = 0; n < grid.step_count(); ++n) {
        const double dt = grid.step(n);
        out[grid.interval_of_step[n]] += dt * dt * step_density[n];
    }
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double h = grid.interval_length(m);
        out[m] /= h * h;
    }
    return out;
}

double clamp_density(double rho, double tol) {
    check_tol(tol);
    return std::min(std::max(std::abs(rho), std::pow(tol, 1.0 / 9.0)), 1.0 / tol);
}

std::vector<double> cutoff_density_S(std::span<const double> rho, double tol) {
    check_tol(tol);
    std::vector<double> out(rho.size());
    std::transform(rho.begin(), rho.end(), out.begin(), [tol](double r) { return clamp_density(r, tol); });
    return out;
}

std::vector<double> cutoff_density_D(const AugmentedGrid& grid, std::span<const double> step_density,
                                     double tol) {
    check_tol(tol);
    auto out = aggregate_by_interval(grid, step_density);
    for (double& v : out) v = clamp_density(v, tol);
    return out;
}

double ErrorIndicators::max() const {
    return indicator.empty() ? 0.0 : *std::max_element(indicator.begin(), indicator.end());
}

ErrorIndicators error_indicators(std::span<const double> density, std::span<const double> steps) {
    if (density.size() != steps.size()) throw ParameterError("density and step counts differ");
    ErrorIndicators out;
    out.density.assign(density.begin(), density.end());
    out.step.assign(steps.begin(), steps.end());
    out.indicator.resize(density.size());
    for (std::size_t n = 0; n < density.size(); ++n) {
        out.indicator[n] = density[n] * steps[n] * steps[n];
        out.total += out.indicator[n];
    }
    return out;
}

std::vector<double> step_lengths(const AugmentedGrid& grid) {
    std::vector<double> out(grid.step_count());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = grid.step(n);
    return out;
}

std::vector<double> interval_lengths(const AugmentedGrid& grid) {
    std::vector<double> out(grid.interval_count());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = grid.interval_length(m);
    return out;
}

void write_indicator_csv(std::ostream& out, std::span<const double> starts, const ErrorIndicators& ind) {
    if (starts.size() < ind.size()) throw ParameterError("one start time per indicator expected");
    out << "index,t,step,density,indicator\n" << std::setprecision(17);
    for (std::size_t n = 0; n < ind.size(); ++n) {
        out << n << ',' << starts[n] << ',' << ind.step[n] << ',' << ind.density[n] << ','
            << ind.indicator[n] << '\n';
    }
}

}  // namespace jdweak
