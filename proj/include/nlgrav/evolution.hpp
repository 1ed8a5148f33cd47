#pragma once

#include <cstddef>
#include <vector>

#include "nlgrav/groundstate.hpp"

namespace nlgrav {

struct EvolutionConfig {
    double dt = 0.01;
    std::size_t steps = 1000;
    std::size_t observables_stride = 1;

    /// Upper bound on dt / h^2 (unit mass).
    static constexpr double c_stab = 50.0;

    void validate(const RadialGrid& grid) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> widths;      // sqrt(2/3 <r^2>)
    std::vector<double> norms;
    std::vector<double> energies_F;  // T + W/2
};

/// Integrates i dpsi/dt = (-laplacian/2 + Phi[psi]) psi with Strang splitting:
/// Crank-Nicolson kinetic half step, potential refreshed from the current
/// density and applied as a phase, second kinetic half step. Samples are taken
/// at step 0 and every `observables_stride` steps (and at the final step).
/// Throws NumericalError when the norm drifts by more than 1e-6 in one step.
Trajectory evolve(const RadialState& initial, const GravityKernel& k, const EvolutionConfig& cfg);
Trajectory evolve(const RadialState& initial, const PhysicalParams& p, const EvolutionConfig& cfg);

/// max |width(t) - width(0)| / width(0) over an evolution of `cfg.steps` steps.
double stationarity_check(const RadialState& state, const GravityKernel& k, const EvolutionConfig& cfg);

/// Width of a freely spreading Gaussian, sigma0 sqrt(1 + (t / sigma0^2)^2).
double free_gaussian_width(double sigma0, double t);

}  // namespace nlgrav
