#include "nlgrav/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/quadrature.hpp"

namespace nlgrav {

using constants::sqrt_pi;

GravityKernel GravityKernel::newtonian(double strength) {
    return {GravityModel::newtonian, 0.0, 0.0, strength};
}

GravityKernel GravityKernel::idg(double beta, double strength) {
    return {GravityModel::idg, beta, 0.0, strength};
}

GravityKernel GravityKernel::yukawa(double mu, double strength) {
    return {GravityModel::yukawa, 0.0, mu, strength};
}

void GravityKernel::validate() const {
    if (!std::isfinite(strength) || strength < 0.0) {
        throw DomainError("kernel strength must be finite and non-negative");
    }
    if (model == GravityModel::idg && !(std::isfinite(beta) && beta > 0.0)) {
        throw DomainError("idg kernel requires beta > 0");
    }
    if (model == GravityModel::yukawa && !(std::isfinite(mu) && mu > 0.0)) {
        throw DomainError("yukawa kernel requires mu > 0");
    }
}

double GravityKernel::modification_length() const {
    switch (model) {
        case GravityModel::idg: return 2.0 / beta;
        case GravityModel::yukawa: return 1.0 / mu;
        case GravityModel::newtonian: break;
    }
    return 0.0;
}

double GravityKernel::operator()(double r) const {
    if (r < 0.0 || std::isnan(r)) throw DomainError("kernel radius must be >= 0");
    if (r == 0.0) {
        if (model == GravityModel::idg) return -strength * beta / sqrt_pi;
        throw SingularInputError(std::string(to_string(model)) +
                                 " kernel is singular at r = 0; regularize before evaluating");
    }
    return r_times_kernel(r) / r;
}

double GravityKernel::r_times_kernel(double r) const {
    switch (model) {
        case GravityModel::newtonian: return -strength;
        case GravityModel::idg: return -strength * std::erf(0.5 * beta * r);
        case GravityModel::yukawa: return -strength * (1.0 + std::exp(-mu * r) / 3.0);
    }
    return 0.0;
}

namespace {

// Taylor series of r^2 K' and r^3 K'' (both O(x^3)) are used below this argument.
constexpr double kIdgSeriesCutoff = 0.1;

// erf(x) - 2x exp(-x^2)/sqrt(pi) = (2/sqrt(pi)) sum_{n>=1} (-1)^{n+1} 2n x^{2n+1} / ((2n+1) n!)
double idg_first_series(double x) {
    const double x2 = x * x;
    double power = x;  // x^{2n+1} / n!
    double sum = 0.0;
    for (int n = 1; n < 30; ++n) {
        power *= -x2 / n;
        const double term = -power * 2.0 * n / (2.0 * n + 1.0);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / sqrt_pi * sum;
}

// -2 erf(x) + 4x(1 + x^2) exp(-x^2)/sqrt(pi) = (2/sqrt(pi)) sum_{n>=1} (-1)^n 2n(1 - 2n) x^{2n+1} / ((2n+1) n!)
double idg_second_series(double x) {
    const double x2 = x * x;
    double power = x;
    double sum = 0.0;
    for (int n = 1; n < 30; ++n) {
        power *= -x2 / n;
        const double term = power * 2.0 * n * (1.0 - 2.0 * n) / (2.0 * n + 1.0);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return 2.0 / sqrt_pi * sum;
}

}  // namespace

double GravityKernel::r2_times_derivative(double r) const {
    switch (model) {
        case GravityModel::newtonian: return strength;
        case GravityModel::idg: {
            const double x = 0.5 * beta * r;
            if (x < kIdgSeriesCutoff) return strength * idg_first_series(x);
            return strength * (std::erf(x) - 2.0 * x / sqrt_pi * std::exp(-x * x));
        }
        case GravityModel::yukawa: {
            const double e = std::exp(-mu * r);
            return strength * (1.0 + e / 3.0 + mu * r * e / 3.0);
        }
    }
    return 0.0;
}

double GravityKernel::r3_times_second(double r) const {
    switch (model) {
        case GravityModel::newtonian: return -2.0 * strength;
        case GravityModel::idg: {
            const double x = 0.5 * beta * r;
            if (x < kIdgSeriesCutoff) return strength * idg_second_series(x);
            const double g = std::exp(-x * x) / sqrt_pi;
            return strength * (-2.0 * std::erf(x) + 4.0 * x * g + 4.0 * x * x * x * g);
        }
        case GravityModel::yukawa: {
            const double e = std::exp(-mu * r);
            const double mr = mu * r;
            return strength * (-2.0 * (1.0 + e / 3.0) - 2.0 * mr * e / 3.0 - mr * mr * e / 3.0);
        }
    }
    return 0.0;
}

namespace {

// Antiderivative of erf(a s), shifted so that it vanishes at s = 0.
double erf_antiderivative(double a, double s) {
    return s * std::erf(a * s) + std::expm1(-a * a * s * s) / (a * sqrt_pi);
}

}  // namespace

double GravityKernel::shell_average(double r, double rp) const {
    if (r < 0.0 || rp < 0.0) throw DomainError("shell radii must be >= 0");
    const double hi = std::max(r, rp);
    const double lo = std::min(r, rp);
    if (lo == 0.0) return (*this)(hi);
    if (lo < 1e-6 * hi) {
        // Shell much smaller than the separation: average equals the point value
        // up to O((lo/hi)^2).
        return (*this)(hi);
    }
    switch (model) {
        case GravityModel::newtonian: return -strength / hi;
        case GravityModel::idg: {
            const double a = 0.5 * beta;
            const double span = erf_antiderivative(a, r + rp) - erf_antiderivative(a, hi - lo);
            return -strength * span / (2.0 * r * rp);
        }
        case GravityModel::yukawa: {
            const double extra =
                std::exp(-mu * (hi - lo)) * std::expm1(-2.0 * mu * lo) / (6.0 * mu * r * rp);
            return strength * (-1.0 / hi + extra);
        }
    }
    return 0.0;
}

double kernel_eval(const GravityKernel& k, double r) { return k(r); }

GravityKernel make_kernel(const PhysicalParams& p, const NaturalScales& s) {
    switch (p.model) {
        case GravityModel::newtonian: return GravityKernel::newtonian(s.coupling);
        case GravityModel::idg: return GravityKernel::idg(s.beta, s.coupling);
        case GravityModel::yukawa: return GravityKernel::yukawa(s.mu, s.coupling);
    }
    throw DomainError("unknown gravity model");
}

double kernel_from_form_factor(double beta, double r, FormFactorDiagnostics* diag) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be > 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be > 0");

    // exp(-k^2/beta^2) < 1e-30 beyond k_max.
    const double k_max = beta * std::sqrt(30.0 * std::log(10.0));
    // Phi(r) = -(2/pi)/r * Int_0^{k_max r} sin(x)/x exp(-(x/(beta r))^2) dx.
    const double width = beta * r;
    const double x_max = k_max * r;
    auto integrand = [width](double x) {
        const double sinc = (x < 1e-4) ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        const double q = x / width;
        return sinc * std::exp(-q * q);
    };

    constexpr double max_panels = 1e7;
    const double panel_count = std::ceil(x_max / constants::pi);
    if (panel_count > max_panels) {
        std::ostringstream os;
        os << "beta*r=" << width << " requires " << panel_count << " panels (limit " << max_panels << ")";
        throw NumericalError("form-factor inversion: oscillatory range too long", os.str());
    }

    quad::Options opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 1e-14;
    double sum = 0.0;
    double err = 0.0;
    std::size_t evaluations = 0;
    const auto panels = static_cast<std::size_t>(panel_count);
    for (std::size_t n = 0; n < panels; ++n) {
        const double a = static_cast<double>(n) * constants::pi;
        const double b = std::min(a + constants::pi, x_max);
        if (b <= a) break;
        quad::Result res;
        try {
            res = quad::integrate(integrand, a, b, opt);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "panel " << n << " [" << a << ", " << b << "], beta=" << beta << ", r=" << r << ": "
               << e.diagnostics();
            throw NumericalError("form-factor inversion did not converge", os.str());
        }
        sum += res.value;
        err += res.error;
        evaluations += res.evaluations;
    }
    const double scale = 2.0 / (constants::pi * r);
    if (diag) {
        diag->k_max = k_max;
        diag->panels = panels;
        diag->evaluations = evaluations;
        diag->error_estimate = scale * err;
    }
    return -scale * sum;
}

std::vector<double> kernel_breakpoints(const GravityKernel& k, double scale, double upper) {
    std::vector<double> pts{0.0, upper};
    const double length = k.modification_length();
    if (length > 0.0) {
        const double u = length / scale;
        for (double f : {0.01, 0.1, 1.0, 10.0}) {
            const double p = f * u;
            if (p > 1e-12 * upper && p < upper) pts.push_back(p);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

double potential_at_origin(const GravityKernel& k, double sigma) {
    k.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
    // Phi(0) = 4 pi Int r^2 K(r) rho(r) dr with rho = pi^{-3/2} sigma^{-3} e^{-r^2/sigma^2};
    // in u = r/sigma: (4/sqrt(pi))/sigma Int u e^{-u^2} [r K](sigma u) du.
    constexpr double upper = 10.0;  // e^{-100} tail
    const auto pts = kernel_breakpoints(k, sigma, upper);
    auto f = [&](double u) { return u * std::exp(-u * u) * k.r_times_kernel(sigma * u); };
    const auto res = quad::integrate(f, pts, {1e-300, 1e-14, 4000});
    return 4.0 / sqrt_pi / sigma * res.value;
}

}  // namespace nlgrav
