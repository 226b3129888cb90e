#include "jdweak/duals.hpp"

#include <algorithm>

#include "jdweak/errors.hpp"

namespace jdweak {

LocalDerivatives LocalDerivatives::identity(std::size_t dim, int order) {
    LocalDerivatives out;
    out.dim = dim;
    out.order = order;
    out.jac.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) out.jac[i * dim + i] = 1.0;
    if (order >= 2) out.hess.assign(dim * dim * dim, 0.0);
    if (order >= 3) out.third.assign(dim * dim * dim * dim, 0.0);
    return out;
}

namespace {

void check_order(int order) {
    if (order < 1 || order > 3) throw ParameterError("dual order must be 1, 2 or 3");
}

// Adds jet blocks (all outputs, scaled) into the local derivative arrays.
void add_scaled(LocalDerivatives& out, const Jet& jet, double scale) {
    for (std::size_t k = 0; k < out.jac.size(); ++k) out.jac[k] += scale * jet.d1[k];
    for (std::size_t k = 0; k < out.hess.size(); ++k) out.hess[k] += scale * jet.d2[k];
    for (std::size_t k = 0; k < out.third.size(); ++k) out.third[k] += scale * jet.d3[k];
}

}  // namespace

LocalDerivatives time_step_derivatives(const JumpDiffusionModel& model, double t, StateView x,
                                       double dt, std::span<const double> dw, int order) {
    check_order(order);
    model.require_derivatives(order);
    const std::size_t d = model.dim;
    const std::size_t l0 = model.wiener_dim;
    LocalDerivatives out = LocalDerivatives::identity(d, order);

    Jet a;
    model.drift_jet(t, x, order, a);
    add_scaled(out, a, dt);

    Jet b;
    model.diffusion_jet(t, x, order, b);
    // b has outputs j*l0 + l; fold the Wiener sum into output j.
    const std::size_t w1 = d, w2 = d * d, w3 = d * d * d;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t l = 0; l < l0; ++l) {
            const double s = dw[l];
            if (s == 0.0) continue;
            const std::size_t o = j * l0 + l;
            for (std::size_t k = 0; k < w1; ++k) out.jac[j * w1 + k] += s * b.d1[o * w1 + k];
            if (order >= 2) {
                for (std::size_t k = 0; k < w2; ++k) out.hess[j * w2 + k] += s * b.d2[o * w2 + k];
            }
            if (order >= 3) {
                for (std::size_t k = 0; k < w3; ++k) out.third[j * w3 + k] += s * b.d3[o * w3 + k];
            }
        }
    }
    return out;
}

LocalDerivatives jump_derivatives(const JumpDiffusionModel& model, double t, StateView x,
                                  StateView z, int order) {
    check_order(order);
    model.require_derivatives(order);
    LocalDerivatives out = LocalDerivatives::identity(model.dim, order);
    Jet c;
    model.jump_jet(t, x, z, order, c);
    add_scaled(out, c, 1.0);
    return out;
}

void pull_back_duals(const LocalDerivatives& local, std::span<const double> psi,
                     std::span<const double> psi1, std::span<const double> psi2,
                     std::span<double> phi, std::span<double> phi1, std::span<double> phi2) {
    const std::size_t d = local.dim;
    const bool second = !phi1.empty();
    const bool third = !phi2.empty();

    // phi_i = J_ji psi_j
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += local.d1(j, i) * psi[j];
        phi[i] = s;
    }
    if (!second) return;

    // u[i][p] = J_ji psi'_jp; phi'_ik = u[i][p] J_pk + H_jik psi_j
    std::vector<double> u(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t p = 0; p < d; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += local.d1(j, i) * psi1[j * d + p];
            u[i * d + p] = s;
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double s = 0.0;
            for (std::size_t p = 0; p < d; ++p) s += u[i * d + p] * local.d1(p, k);
            for (std::size_t j = 0; j < d; ++j) s += local.d2(j, i, k) * psi[j];
            phi1[i * d + k] = s;
        }
    if (!third) return;

    // Triple jacobian term, contracted one index at a time.
    std::vector<double> v1(d * d * d, 0.0), v2(d * d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = 0; q < d; ++q) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += local.d1(j, i) * psi2[(j * d + p) * d + q];
                v1[(i * d + p) * d + q] = s;
            }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t q = 0; q < d; ++q) {
                double s = 0.0;
                for (std::size_t p = 0; p < d; ++p) s += v1[(i * d + p) * d + q] * local.d1(p, k);
                v2[(i * d + k) * d + q] = s;
            }
    // w[i][k][p] = H_jik psi'_jp
    std::vector<double> w(d * d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t p = 0; p < d; ++p) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += local.d2(j, i, k) * psi1[j * d + p];
                w[(i * d + k) * d + p] = s;
            }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t m = 0; m < d; ++m) {
                double s = 0.0;
                for (std::size_t q = 0; q < d; ++q) s += v2[(i * d + k) * d + q] * local.d1(q, m);
                for (std::size_t p = 0; p < d; ++p) {
                    s += w[(i * d + m) * d + p] * local.d1(p, k);  // H_jim psi'_jp J_pk
                    s += w[(i * d + k) * d + p] * local.d1(p, m);  // H_jik psi'_jp J_pm
                    s += u[i * d + p] * local.d2(p, k, m);         // J_ji psi'_jp H_pkm
                }
                for (std::size_t j = 0; j < d; ++j) s += local.d3(j, i, k, m) * psi[j];
                phi2[(i * d + k) * d + m] = s;
            }
}

DualWeights backward_duals(const JumpDiffusionModel& model, const EulerPath& path, int order) {
    check_order(order);
    model.require_derivatives(order);
    const std::size_t d = model.dim;
    if (path.dim != d) throw ParameterError("path dimension does not match the model");
    const std::size_t nodes = path.step_count() + 1;
    const std::size_t w1 = d, w2 = d * d, w3 = d * d * d;

    DualWeights out;
    out.dim = d;
    out.order = order;
    out.phi.assign(nodes * w1, 0.0);
    out.left_phi.assign(nodes * w1, 0.0);
    if (order >= 2) {
        out.phi1.assign(nodes * w2, 0.0);
        out.left_phi1.assign(nodes * w2, 0.0);
    }
    if (order >= 3) {
        out.phi2.assign(nodes * w3, 0.0);
        out.left_phi2.assign(nodes * w3, 0.0);
    }

    auto block = [](std::vector<double>& v, std::size_t n, std::size_t w) {
        return v.empty() ? std::span<double>() : std::span<double>(v).subspan(n * w, w);
    };
    auto cblock = [](const std::vector<double>& v, std::size_t n, std::size_t w) {
        return v.empty() ? std::span<const double>() : std::span<const double>(v).subspan(n * w, w);
    };

    const std::size_t last = nodes - 1;
    Jet g;
    model.payoff_jet(path.value(last), order, g);
    std::copy(g.d1.begin(), g.d1.end(), block(out.phi, last, w1).begin());
    if (order >= 2) std::copy(g.d2.begin(), g.d2.end(), block(out.phi1, last, w2).begin());
    if (order >= 3) std::copy(g.d3.begin(), g.d3.end(), block(out.phi2, last, w3).begin());

    for (std::size_t n = last; n-- > 0;) {
        const std::size_t next = n + 1;
        // Left limit at t_{n+1}: jump map or pass-through.
        if (path.grid.is_jump(next)) {
            const auto local = jump_derivatives(model, path.grid.nodes[next], path.left_value(next),
                                                path.mark_at(next), order);
            pull_back_duals(local, cblock(out.phi, next, w1), cblock(out.phi1, next, w2),
                            cblock(out.phi2, next, w3), block(out.left_phi, next, w1),
                            block(out.left_phi1, next, w2), block(out.left_phi2, next, w3));
        } else {
            auto copy = [&](std::vector<double>& dst, const std::vector<double>& src, std::size_t w) {
                if (src.empty()) return;
                std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(next * w), w,
                            dst.begin() + static_cast<std::ptrdiff_t>(next * w));
            };
            copy(out.left_phi, out.phi, w1);
            copy(out.left_phi1, out.phi1, w2);
            copy(out.left_phi2, out.phi2, w3);
        }
        // Node t_n: Euler step map.
        const auto local = time_step_derivatives(model, path.grid.nodes[n], path.value(n),
                                                 path.grid.step(n), path.increment(n), order);
        pull_back_duals(local, cblock(out.left_phi, next, w1), cblock(out.left_phi1, next, w2),
                        cblock(out.left_phi2, next, w3), block(out.phi, n, w1), block(out.phi1, n, w2),
                        block(out.phi2, n, w3));
    }
    // Slot 0 has no left limit; mirror the node values.
    std::copy_n(out.phi.begin(), w1, out.left_phi.begin());
    if (order >= 2) std::copy_n(out.phi1.begin(), w2, out.left_phi1.begin());
    if (order >= 3) std::copy_n(out.phi2.begin(), w3, out.left_phi2.begin());
    return out;
}

}  // namespace jdweak
