#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlgrav/kernels.hpp"
#include "nlgrav/units.hpp"

namespace nlgrav {

/// Which energy the Gaussian width extremizes.
///   expectation: E = T + W, the expectation value of the one-body Hamiltonian
///                (the convention of the tabulated spreads).
///   functional:  F = T + W/2, whose Euler-Lagrange equation is the nonlinear
///                Schroedinger equation itself.
enum class EnergyConvention { expectation, functional };

std::string_view to_string(EnergyConvention c);

// --- Gaussian pair interaction ------------------------------------------------
// For the normalized packet exp(-r^2/2s^2)/(pi^{3/4} s^{3/2}) the separation of
// two independent draws is N(0, s^2) per axis, so W(s) = <K(|x - x'|)> reduces to
//   W(s) = sqrt(2/pi)/s * Int_0^inf u exp(-u^2/2) [r K](s u) du.

/// Closed form for newtonian and idg, adaptive quadrature for yukawa.
double gaussian_pair_energy(const GravityKernel& k, double s);
double gaussian_pair_energy_derivative(const GravityKernel& k, double s);
double gaussian_pair_energy_second_derivative(const GravityKernel& k, double s);

/// One-dimensional relative-separation quadrature (any model).
double gaussian_pair_energy_quadrature(const GravityKernel& k, double s);
double gaussian_pair_energy_derivative_quadrature(const GravityKernel& k, double s);
double gaussian_pair_energy_second_derivative_quadrature(const GravityKernel& k, double s);

/// Closed form of the Yukawa pair energy through the scaled complementary error
/// function. Fast path only; quadrature remains authoritative.
double yukawa_pair_energy_closed_form(double mu, double s, double strength = 1.0);

/// exp(x^2) erfc(x) for x >= 0.
double erfcx(double x);

// --- Ansatz energies (dimensionless, coupling 1) -------------------------------

double energy_idg(double sigma, double beta);
double energy_newton(double sigma);
double energy_yukawa(double sigma, double mu);

/// Kinetic 3/(4 s^2) plus (1 or 1/2) W(s).
double ansatz_energy(const GravityKernel& k, double s,
                     EnergyConvention c = EnergyConvention::expectation);

/// s^3 E'(s) / (3/2): zero at a stationary width, -1 as s -> 0.
double scaled_stationarity(const GravityKernel& k, double s,
                           EnergyConvention c = EnergyConvention::expectation);

// --- Minimization ---------------------------------------------------------------

enum class Regime { newtonian_limit, crossover, deep_nonlocal };

std::string_view to_string(Regime r);

/// beta*sigma (or mu*sigma) above this multiple of the threshold 2 counts as
/// newtonian_limit; between 2 and 2*kRegimeBand it is crossover.
inline constexpr double kRegimeBand = 10.0;

Regime classify_regime(const GravityKernel& k, double s);

struct ScaledMinimum {
    double s = 0.0;
    double energy = 0.0;
    double residual = 0.0;        // |scaled_stationarity| at s
    std::array<double, 2> bracket{};
    std::size_t iterations = 0;   // polishing iterations
    std::size_t stationary_points = 0;
};

struct MinimizeOptions {
    EnergyConvention convention = EnergyConvention::expectation;
    double scan_half_width_decades = 12.0;
    double scan_step_decades = 0.05;
    double bracket_rel_width = 1e-14;
    std::size_t max_polish_iterations = 200;
};

/// Global minimizer of the Gaussian ansatz energy over s in (0, inf): log-grid
/// scan for sign changes of the scaled derivative, safeguarded Newton/bisection
/// polish of each bracket, lowest energy wins. Throws NumericalError with the
/// scanned profile when no minimum is bracketed.
ScaledMinimum minimize_scaled(const GravityKernel& k, const MinimizeOptions& opt = {});

/// Rough width scale used to center the scan.
double reference_width(const GravityKernel& k, EnergyConvention c);

struct SpreadResult {
    GravityModel model = GravityModel::newtonian;
    double mass_kg = 0.0;
    std::optional<double> ms_ev;
    std::optional<double> yukawa_mu_inv_m;
    double sigma_m = 0.0;
    double sigma_natural = 0.0;     // in units of the chosen length unit
    double energy_natural = 0.0;
    double scale_product = 0.0;     // beta*s (idg) or mu*s (yukawa), 0 for newtonian
    Regime regime = Regime::newtonian_limit;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::array<double, 2> bracket_m{};
};

struct SpreadOptions {
    MinimizeOptions minimize{};
    std::optional<double> length_unit_m;  // defaults to l0
};

SpreadResult minimize_spread(const PhysicalParams& p, const SpreadOptions& opt = {});

/// (3/2) sqrt(pi/2) hbar^2/(G m^3), meters.
double sigma_newton_closed_form(const PhysicalParams& p);

/// (3 sqrt(pi))^{1/4} l0^{1/4} (hbar c/M_s)^{3/4}, meters. Valid for M_s sigma < 2.
double sigma_idg_asymptotic(const PhysicalParams& p);

struct SweepRow {
    std::size_t index = 0;
    PhysicalParams params;
    std::optional<SpreadResult> result;
    std::string error;
};

/// One row per mass with the template's model and scales. Rows are solved
/// independently (on `threads` workers) and returned in input order; a failing
/// row records its error and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<double>& masses_kg, const PhysicalParams& templ,
                            const SpreadOptions& opt = {}, unsigned threads = 1);

/// Same, for an explicit list of parameter sets.
std::vector<SweepRow> sweep(const std::vector<PhysicalParams>& params, const SpreadOptions& opt = {},
                            unsigned threads = 1);

}  // namespace nlgrav
