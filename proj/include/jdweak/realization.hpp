#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jdweak/euler.hpp"
#include "jdweak/jumps.hpp"
#include "jdweak/model.hpp"
#include "jdweak/rng.hpp"

namespace jdweak {

/// Seeds of the three per-realization streams.
struct Seeds {
    std::int64_t wiener = -7;
    std::int64_t marks = -101;
    std::int64_t jumps = -20;
};

enum class DensityMode { rhodef, rhotilde };

DensityMode parse_density_mode(const std::string& name);
std::string to_string(DensityMode mode);
/// Dual order the density needs.
int dual_order(DensityMode mode);

/// Read-only state shared by all realizations of a run: the model, its
/// cumulative intensity table and the seeds. Realization `index` always
/// draws from the same three streams, whatever thread evaluates it.
class Simulator {
public:
    Simulator(JumpDiffusionModel model, Seeds seeds);

    const JumpDiffusionModel& model() const noexcept { return model_; }
    const IntensityIntegral& intensity() const noexcept { return lambda_; }
    const Seeds& seeds() const noexcept { return seeds_; }

    RandomStream wiener_stream(std::uint64_t index) const;
    /// Jump times and marks of realization `index`.
    JumpRealization jumps(std::uint64_t index) const;
    /// Euler path on `mesh` augmented with the realization's jumps.
    EulerPath path_on_mesh(std::span<const double> mesh, std::uint64_t index) const;

private:
    JumpDiffusionModel model_;
    IntensityIntegral lambda_;
    Seeds seeds_;
};

/// One realization on a fixed deterministic mesh, with its error indicators.
struct MeshSample {
    double payoff = 0.0;
    /// Signed, un-clamped sum of density * step^2 over the path.
    double signed_error = 0.0;
    /// Clamped per-coarse-interval indicators rho_D * dt~^2 (empty if no
    /// clamp tolerance was given).
    std::vector<double> indicators;
    double indicator_total = 0.0;
    std::size_t steps = 0;
    std::size_t jumps = 0;
};

/// Simulates realization `index` on `mesh`, runs the dual sweep and
/// evaluates the chosen density. `clamp_tol` in (0, 1) also fills the
/// clamped indicators; pass 0 to skip them.
MeshSample sample_on_mesh(const Simulator& sim, std::span<const double> mesh, std::uint64_t index,
                          DensityMode mode, double clamp_tol);

/// Payoff only, no duals.
double payoff_on_mesh(const Simulator& sim, std::span<const double> mesh, std::uint64_t index,
                      std::size_t* steps = nullptr);

}  // namespace jdweak
