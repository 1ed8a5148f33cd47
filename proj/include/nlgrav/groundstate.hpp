#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nlgrav/kernels.hpp"
#include "nlgrav/units.hpp"

namespace nlgrav {

/// Uniform radial grid r_i = (i + 1) h, i = 0..nodes-1. The reduced wave
/// function u = r R vanishes at r = 0 and at r_max = (nodes + 1) h.
struct RadialGrid {
    double spacing = 0.0;
    std::size_t nodes = 0;

    double r(std::size_t i) const { return static_cast<double>(i + 1) * spacing; }
    double r_max() const { return static_cast<double>(nodes + 1) * spacing; }

    static RadialGrid with_extent(double r_max, std::size_t nodes);
    void validate() const;
};

/// Spherically symmetric real state psi(x) = R(r) sampled as u_i = r_i R(r_i).
struct RadialState {
    RadialGrid grid;
    std::vector<double> u;
    double norm = 0.0;                // 4 pi h sum u_i^2
    double chemical_potential = 0.0;  // epsilon, set by the solver

    double R(std::size_t i) const { return u[i] / grid.r(i); }
};

double state_norm(const RadialGrid& grid, std::span<const double> u);
void normalize(RadialState& state);

/// Discretely normalized exp(-r^2/2 sigma^2) on the grid.
RadialState gaussian_state(const RadialGrid& grid, double sigma);

/// sqrt(2/3 <r^2>), equal to sigma for the Gaussian packet.
double rms_width(const RadialGrid& grid, std::span<const double> u);
inline double rms_width(const RadialState& s) { return rms_width(s.grid, s.u); }

/// |R(r_last)| / max |R|.
double tail_ratio(const RadialState& s);

/// Number of sign changes of R across the grid (ignoring exact zeros).
std::size_t sign_changes(const RadialState& s);

/// Hartree potential Phi(r) = Int K(|x - x'|) |psi(x')|^2 d^3x' through the
/// two-shell reduction Phi(r_i) = sum_j 4 pi h u_j^2 Kbar(r_i, r_j), where Kbar
/// is the kernel's closed-form shell average. Newtonian uses the O(N)
/// interior/exterior split; the other models precompute the symmetric matrix.
class HartreeOperator {
public:
    HartreeOperator(const GravityKernel& kernel, const RadialGrid& grid);

    std::vector<double> potential(std::span<const double> u) const;
    void potential(std::span<const double> u, std::span<double> out) const;

    /// Phi at an arbitrary radius r >= 0 (r = 0 included).
    double potential_at(std::span<const double> u, double r) const;

    const GravityKernel& kernel() const { return kernel_; }
    const RadialGrid& grid() const { return grid_; }

private:
    GravityKernel kernel_;
    RadialGrid grid_;
    std::vector<double> matrix_;
};

/// Throws DomainError unless the state is normalized to 1e-8.
std::vector<double> self_consistent_potential(const RadialState& state, const GravityKernel& k);

struct FunctionalParts {
    double kinetic = 0.0;      // T
    double interaction = 0.0;  // W = <Phi[psi]>
    double functional() const { return kinetic + 0.5 * interaction; }   // F
    double expectation() const { return kinetic + interaction; }       // E
};

FunctionalParts evaluate_functional(const RadialGrid& grid, std::span<const double> u,
                                    std::span<const double> phi);

/// (-laplacian/2 + Phi) u on the grid, second-order central differences.
std::vector<double> apply_hamiltonian(const RadialGrid& grid, std::span<const double> u,
                                      std::span<const double> phi);

struct GroundStateConfig {
    std::size_t nodes = 1200;
    std::optional<double> r_max;           // default: extent_widths * initial width
    std::optional<double> initial_width;   // default: variational width for F
    double extent_widths = 12.0;
    double tolerance = 1e-9;               // on || H psi - eps psi ||
    std::size_t max_iterations = 20000;
    double decay_threshold = 1e-8;         // required tail_ratio
    std::size_t max_expansions = 6;
    double expansion_factor = 1.5;
    double min_cells_per_width = 5.0;
    double weak_binding_cap = 50.0;        // idg: r_max <= cap * 2/beta
    double dt_safety = 0.9;
    std::size_t max_nodes = 6000;
};

struct SolverReport {
    bool converged = false;
    bool domain_adequate = false;
    bool weakly_bound = false;
    double residual = 0.0;
    double energy_functional = 0.0;          // F = T + W/2
    double energy_expectation = 0.0;    // E = T + W
    double kinetic = 0.0;
    double interaction = 0.0;
    double chemical_potential = 0.0;
    double virial_ratio = 0.0;               // W / (-4 T), 1 for 1/r kernels
    double width = 0.0;
    double initial_width = 0.0;
    double tail_ratio = 0.0;
    std::size_t iterations = 0;
    std::size_t rejected_steps = 0;
    std::size_t expansions = 0;
    double final_step = 0.0;
    std::vector<double> residual_history;     // every iteration
    std::vector<double> functional_history;   // F after every accepted step
};

struct GroundState {
    RadialState state;
    SolverReport report;
};

/// Minimizes F[psi] = T + W/2 at unit norm by semi-implicit imaginary-time
/// steps (I + dt H[psi_n]) psi_{n+1} = psi_n followed by renormalization.
/// Steps that raise F are halved; accepted steps grow dt by 1.1 up to
/// dt_safety / |min Phi|. The domain grows until the tail criterion holds.
GroundState solve_ground_state(const GravityKernel& k, const GroundStateConfig& cfg = {});
GroundState solve_ground_state(const PhysicalParams& p, const GroundStateConfig& cfg = {});

struct GapResult {
    double gap = 0.0;                  // F[best Gaussian] - F[solver state]
    double gaussian_sigma = 0.0;
    double gaussian_functional = 0.0;
    double solver_functional = 0.0;
};

/// Compares the solver state with the best Gaussian on the same grid and the
/// same discrete functional.
GapResult gaussian_functional_gap(const GroundState& gs, const GravityKernel& k);
GapResult gaussian_functional_gap(const PhysicalParams& p, const GroundStateConfig& cfg = {});

}  // namespace nlgrav
