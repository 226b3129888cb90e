#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jdweak/euler.hpp"
#include "jdweak/model.hpp"

namespace jdweak {

/// Derivatives of one local Euler map F: x -> F(x) (a time step A-hat, a jump
/// map c-hat, or the identity at a non-jump left limit).
///
/// Layout follows Jet with output index first: jac[j*d + i] = d_i F_j,
/// hess[(j*d + i)*d + k] = d_ik F_j, third[((j*d + i)*d + k)*d + m].
struct LocalDerivatives {
    std::size_t dim = 0;
    int order = 0;
    std::vector<double> jac;
    std::vector<double> hess;
    std::vector<double> third;

    double d1(std::size_t j, std::size_t i) const { return jac[j * dim + i]; }
    double d2(std::size_t j, std::size_t i, std::size_t k) const { return hess[(j * dim + i) * dim + k]; }
    double d3(std::size_t j, std::size_t i, std::size_t k, std::size_t m) const {
        return third[((j * dim + i) * dim + k) * dim + m];
    }

    /// The identity map's derivatives (jacobian = I, higher orders zero).
    static LocalDerivatives identity(std::size_t dim, int order);
};

/// A_j(x) = x_j + dt a_j(t, x) + sum_l dW^l b_j^l(t, x), derivatives up to
/// `order`. Throws CapabilityError if the model lacks them.
LocalDerivatives time_step_derivatives(const JumpDiffusionModel& model, double t, StateView x,
                                       double dt, std::span<const double> dw, int order);

/// c-hat_j(x) = x_j + c_j(t, x, z).
LocalDerivatives jump_derivatives(const JumpDiffusionModel& model, double t, StateView x,
                                  StateView z, int order);

/// Discrete dual weights phi (d), phi' (d x d) and phi'' (d x d x d) at every
/// node t_n and every left limit t_n- of one realization.
///
/// Arrays are indexed by node n = 0..N_A; left-limit slot 0 is unused.
struct DualWeights {
    std::size_t dim = 0;
    int order = 0;
    std::vector<double> phi;
    std::vector<double> phi1;
    std::vector<double> phi2;
    std::vector<double> left_phi;
    std::vector<double> left_phi1;
    std::vector<double> left_phi2;

    std::span<const double> at(std::size_t n) const { return slice(phi, n, dim); }
    std::span<const double> first_variation_at(std::size_t n) const { return slice(phi1, n, dim * dim); }
    std::span<const double> second_variation_at(std::size_t n) const {
        return slice(phi2, n, dim * dim * dim);
    }
    std::span<const double> left(std::size_t n) const { return slice(left_phi, n, dim); }
    std::span<const double> first_variation_left(std::size_t n) const {
        return slice(left_phi1, n, dim * dim);
    }
    std::span<const double> second_variation_left(std::size_t n) const {
        return slice(left_phi2, n, dim * dim * dim);
    }

private:
    static std::span<const double> slice(const std::vector<double>& v, std::size_t n, std::size_t w) {
        return std::span<const double>(v).subspan(n * w, w);
    }
};

/// Backward dual recursion over a stored path. order = 1 computes phi only,
/// 2 adds phi', 3 adds phi''. Cost is linear in the number of steps.
DualWeights backward_duals(const JumpDiffusionModel& model, const EulerPath& path, int order);

/// One backward step through a local map: given (psi, psi', psi'') at the
/// image point, returns the weights at the source point.
void pull_back_duals(const LocalDerivatives& local, std::span<const double> psi,
                     std::span<const double> psi1, std::span<const double> psi2,
                     std::span<double> phi, std::span<double> phi1, std::span<double> phi2);

}  // namespace jdweak
