#pragma once

#include <cstddef>
#include <vector>

#include "nlgrav/units.hpp"

namespace nlgrav {

/// Dimensionless pair-potential kernel K(r) per unit mass squared, so that
/// K(r) -> -strength / r at large separation for every model:
///   newtonian  -1/r
///   idg        -erf(beta r / 2) / r      (finite at the origin: -beta/sqrt(pi))
///   yukawa     -(1 + exp(-mu r)/3) / r
struct GravityKernel {
    GravityModel model = GravityModel::newtonian;
    double beta = 0.0;
    double mu = 0.0;
    double strength = 1.0;

    static GravityKernel newtonian(double strength = 1.0);
    static GravityKernel idg(double beta, double strength = 1.0);
    static GravityKernel yukawa(double mu, double strength = 1.0);

    void validate() const;

    /// K(r). Throws SingularInputError at r = 0 unless the model is idg.
    double operator()(double r) const;

    // Regular combinations, finite at r = 0 for all models. Quadratures use
    // these so that the 1/r singularity is cancelled analytically.
    double r_times_kernel(double r) const;        // r K(r)
    double r2_times_derivative(double r) const;   // r^2 K'(r)
    double r3_times_second(double r) const;       // r^3 K''(r)

    /// Average of K(|x - x'|) over the sphere |x'| = rp at fixed |x| = r.
    /// For newtonian this is -1/max(r, rp).
    double shell_average(double r, double rp) const;

    /// Internal length scale of the modification (2/beta, 1/mu), 0 for newtonian.
    double modification_length() const;
};

double kernel_eval(const GravityKernel& k, double r);

GravityKernel make_kernel(const PhysicalParams& p, const NaturalScales& s);

struct FormFactorDiagnostics {
    double k_max = 0.0;           // truncation wavenumber
    std::size_t panels = 0;       // half-period panels integrated
    std::size_t evaluations = 0;
    double error_estimate = 0.0;  // absolute, on the returned potential
};

/// Position-space IDG kernel obtained by numerically inverting the
/// momentum-space Green function -4 pi exp(-k^2/beta^2) / k^2 (radial sine
/// transform, truncated where the Gaussian factor drops below 1e-30). Uses
/// only sin and exp, so it serves as an independent check on the erf form.
double kernel_from_form_factor(double beta, double r, FormFactorDiagnostics* diag = nullptr);

/// Potential at the origin generated by the normalized Gaussian density
/// pi^{-3/2} sigma^{-3} exp(-r^2/sigma^2), by radial quadrature against K.
double potential_at_origin(const GravityKernel& k, double sigma);

/// Quadrature breakpoints on [0, upper] (in units of `scale`) that resolve
/// the kernel's internal length scale.
std::vector<double> kernel_breakpoints(const GravityKernel& k, double scale, double upper);

}  // namespace nlgrav
