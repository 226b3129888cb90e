#include "jdweak/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jdweak/errors.hpp"

namespace jdweak {

IntensityIntegral::IntensityIntegral(IntensityFn intensity, double horizon, std::size_t panels)
    : intensity_(std::move(intensity)), horizon_(horizon) {
    if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
    if (panels == 0) throw ParameterError("intensity table needs at least one panel");
    edges_.resize(panels + 1);
    cumulative_.resize(panels + 1);
    cumulative_[0] = 0.0;
    for (std::size_t p = 0; p <= panels; ++p) edges_[p] = horizon * static_cast<double>(p) / panels;
    edges_.back() = horizon;
    for (std::size_t p = 0; p < panels; ++p) {
        const double piece = integrate(edges_[p], edges_[p + 1]);
        cumulative_[p + 1] = cumulative_[p] + piece;
        if (!(cumulative_[p + 1] >= cumulative_[p])) {
            throw NumericError("cumulative intensity is not monotone");
        }
    }
}

IntensityIntegral::IntensityIntegral(const JumpDiffusionModel& model, std::size_t panels)
    : IntensityIntegral(model.intensity, model.horizon, panels) {}

double IntensityIntegral::checked_intensity(double t) const {
    const double v = intensity_(t);
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ModelError("jump intensity must be finite and nonnegative (t = " + std::to_string(t) + ")");
    }
    return v;
}

double IntensityIntegral::integrate(double a, double b) const {
    if (b <= a) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    auto f = [this](double s) { return checked_intensity(s); };
    return gauss_kronrod<double, 21>::integrate(f, a, b, 8, 1e-13);
}

double IntensityIntegral::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= horizon_) return cumulative_.back();
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    const std::size_t p = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return cumulative_[p] + integrate(edges_[p], t);
}

double IntensityIntegral::inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (s > cumulative_.back()) throw ParameterError("inverse intensity requested beyond Lambda(T)");
    // First panel whose cumulative value reaches s.
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t hi_index = static_cast<std::size_t>(it - cumulative_.begin());
    double lo = edges_[hi_index - 1];
    double hi = edges_[hi_index];
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double residual = (*this)(t) - s;
        if (residual > 0.0) hi = t; else lo = t;
        const double slope = checked_intensity(t);
        double next = slope > 0.0 ? t - residual / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * (1.0 + horizon_) || hi - lo <= 1e-15 * (1.0 + horizon_)) {
            return next;
        }
        t = next;
    }
    throw NumericError("inverse cumulative intensity did not converge");
}

namespace {

template <class NextExponential>
std::vector<double> jump_times_impl(const JumpDiffusionModel& model, const IntensityIntegral& lambda,
                                    NextExponential&& next) {
    std::vector<double> times;
    const double total = lambda.total();
    const double T = lambda.horizon();
    double partial = 0.0;
    for (;;) {
        partial += next();
        if (partial > total) break;
        double tau = model.inverse_cumulative_intensity ? model.inverse_cumulative_intensity(partial)
                                                        : lambda.inverse(partial);
        if (!(tau < T)) break;
        if (!times.empty() && tau <= times.back()) {
            tau = std::nextafter(times.back(), std::numeric_limits<double>::infinity());
        }
        times.push_back(tau);
    }
    return times;
}

}  // namespace

std::vector<double> jump_times_from_exponentials(const JumpDiffusionModel& model,
                                                 const IntensityIntegral& lambda,
                                                 std::span<const double> exponentials) {
    std::size_t used = 0;
    return jump_times_impl(model, lambda, [&] {
        if (used == exponentials.size()) {
            throw ParameterError("exponential draws exhausted before exceeding Lambda(T)");
        }
        return exponentials[used++];
    });
}

JumpRealization sample_jump_times(const JumpDiffusionModel& model, const IntensityIntegral& lambda,
                                  RandomStream& rng) {
    JumpRealization out;
    out.mark_dim = model.mark_dim;
    if (lambda.total() > 0.0) {
        out.times = jump_times_impl(model, lambda, [&] { return rng.exponential(); });
    }
    return out;
}

void sample_marks(const JumpDiffusionModel& model, JumpRealization& jumps, RandomStream& rng) {
    jumps.mark_dim = model.mark_dim;
    jumps.marks.assign(jumps.times.size() * model.mark_dim, 0.0);
    for (std::size_t k = 0; k < jumps.times.size(); ++k) {
        model.mark_sampler(jumps.times[k], rng,
                           std::span<double>(jumps.marks).subspan(k * model.mark_dim, model.mark_dim));
    }
}

std::size_t AugmentedGrid::jump_count() const {
    return static_cast<std::size_t>(
        std::count_if(jump_of_node.begin(), jump_of_node.end(), [](int k) { return k >= 0; }));
}

AugmentedGrid build_augmented_grid(std::span<const double> mesh, std::span<const double> jump_times) {
    if (mesh.size() < 2 || mesh.front() != 0.0) {
        throw ParameterError("deterministic mesh must start at 0 and have at least one step");
    }
    for (std::size_t i = 1; i < mesh.size(); ++i) {
        if (!(mesh[i] > mesh[i - 1])) throw ParameterError("deterministic mesh must be strictly increasing");
    }
    const double T = mesh.back();
    const double merge = kCollisionTolerance * T;

    AugmentedGrid grid;
    grid.nodes.reserve(mesh.size() + jump_times.size());
    grid.jump_of_node.reserve(mesh.size() + jump_times.size());
    grid.deterministic_index.reserve(mesh.size());

    std::size_t m = 0, k = 0;
    while (m < mesh.size() || k < jump_times.size()) {
        const bool take_mesh =
            k == jump_times.size() || (m < mesh.size() && mesh[m] <= jump_times[k] + merge);
        if (take_mesh) {
            grid.deterministic_index.push_back(grid.nodes.size());
            grid.nodes.push_back(mesh[m]);
            int flag = -1;
            if (m > 0 && k < jump_times.size() && std::abs(jump_times[k] - mesh[m]) <= merge) {
                flag = static_cast<int>(k++);
            }
            grid.jump_of_node.push_back(flag);
            ++m;
        } else {
            if (!(jump_times[k] > 0.0 && jump_times[k] < T)) {
                throw ParameterError("jump times must lie in (0, T)");
            }
            grid.nodes.push_back(jump_times[k]);
            grid.jump_of_node.push_back(static_cast<int>(k++));
        }
    }

    grid.interval_of_step.resize(grid.nodes.size() - 1);
    std::size_t interval = 0;
    for (std::size_t n = 0; n + 1 < grid.nodes.size(); ++n) {
        while (interval + 1 < grid.deterministic_index.size() - 1 &&
               grid.deterministic_index[interval + 1] <= n) {
            ++interval;
        }
        grid.interval_of_step[n] = interval;
    }
    return grid;
}

std::vector<double> uniform_mesh(double horizon, std::size_t steps) {
    if (steps == 0) throw ParameterError("mesh needs at least one step");
    std::vector<double> mesh(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) mesh[n] = horizon * static_cast<double>(n) / steps;
    mesh.back() = horizon;
    return mesh;
}

}  // namespace jdweak
