#include "nlgrav/variational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/quadrature.hpp"

namespace nlgrav {

using constants::sqrt_2_over_pi;
using constants::sqrt_pi;

std::string_view to_string(EnergyConvention c) {
    return c == EnergyConvention::expectation ? "expectation" : "functional";
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::newtonian_limit: return "newtonian_limit";
        case Regime::crossover: return "crossover";
        case Regime::deep_nonlocal: return "deep_nonlocal";
    }
    return "unknown";
}

namespace {

void require_width(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("width must be positive and finite");
}

// x / sqrt(2 + x^2) without overflow for large x.
double idg_shape(double x) {
    return x < 1.0 ? x / std::sqrt(2.0 + x * x) : 1.0 / std::sqrt(1.0 + 2.0 / (x * x));
}

constexpr double kPairUpper = 14.0;  // exp(-u^2/2) < 1e-42 beyond

// sqrt(2/pi)/s^n * Int u exp(-u^2/2) g(s u) du
template <class G>
double pair_quadrature(const GravityKernel& k, double s, int power, G&& g) {
    const auto pts = kernel_breakpoints(k, s, kPairUpper);
    auto f = [&](double u) { return u * std::exp(-0.5 * u * u) * g(s * u); };
    const auto res = quad::integrate(f, pts, {1e-300, 1e-14, 4000});
    return sqrt_2_over_pi / std::pow(s, power) * res.value;
}

}  // namespace

double gaussian_pair_energy_quadrature(const GravityKernel& k, double s) {
    k.validate();
    require_width(s);
    return pair_quadrature(k, s, 1, [&](double r) { return k.r_times_kernel(r); });
}

double gaussian_pair_energy_derivative_quadrature(const GravityKernel& k, double s) {
    k.validate();
    require_width(s);
    return pair_quadrature(k, s, 2, [&](double r) { return k.r2_times_derivative(r); });
}

double gaussian_pair_energy_second_derivative_quadrature(const GravityKernel& k, double s) {
    k.validate();
    require_width(s);
    return pair_quadrature(k, s, 3, [&](double r) { return k.r3_times_second(r); });
}

double gaussian_pair_energy(const GravityKernel& k, double s) {
    require_width(s);
    switch (k.model) {
        case GravityModel::newtonian: return -k.strength * sqrt_2_over_pi / s;
        case GravityModel::idg:
            k.validate();
            return -k.strength * sqrt_2_over_pi * idg_shape(k.beta * s) / s;
        case GravityModel::yukawa: return gaussian_pair_energy_quadrature(k, s);
    }
    return 0.0;
}

double gaussian_pair_energy_derivative(const GravityKernel& k, double s) {
    require_width(s);
    switch (k.model) {
        case GravityModel::newtonian: return k.strength * sqrt_2_over_pi / (s * s);
        case GravityModel::idg: {
            k.validate();
            const double f = idg_shape(k.beta * s);
            return k.strength * sqrt_2_over_pi * f * f * f / (s * s);
        }
        case GravityModel::yukawa: return gaussian_pair_energy_derivative_quadrature(k, s);
    }
    return 0.0;
}

double gaussian_pair_energy_second_derivative(const GravityKernel& k, double s) {
    require_width(s);
    switch (k.model) {
        case GravityModel::newtonian: return -2.0 * k.strength * sqrt_2_over_pi / (s * s * s);
        case GravityModel::idg: {
            k.validate();
            const double x = k.beta * s;
            const double f = idg_shape(x);
            const double f3 = f * f * f;
            // d/ds [f^3 / s^2] with f^3 = x^3/(2+x^2)^{3/2}
            const double bracket = -2.0 * f3 + 6.0 * f3 / (2.0 + x * x);
            return k.strength * sqrt_2_over_pi * bracket / (s * s * s);
        }
        case GravityModel::yukawa: return gaussian_pair_energy_second_derivative_quadrature(k, s);
    }
    return 0.0;
}

double erfcx(double x) {
    if (x < 0.0 || std::isnan(x)) throw DomainError("erfcx implemented for x >= 0 only");
    if (x < 26.0) return std::exp(x * x) * std::erfc(x);
    // Continued fraction erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    double t = x;
    for (int k = 60; k >= 1; --k) t = x + 0.5 * k / t;
    return 1.0 / (sqrt_pi * t);
}

double yukawa_pair_energy_closed_form(double mu, double s, double strength) {
    if (!(mu > 0.0)) throw DomainError("mu must be > 0");
    require_width(s);
    // <exp(-mu r)/r> = sqrt(2/pi)/s * Q(c), Q(c) = 1 - c sqrt(pi/2) erfcx(c/sqrt 2), c = mu s
    const double c = mu * s;
    double q;
    if (c > 14.0) {
        // Asymptotic series Q = 1/c^2 - 3/c^4 + 15/c^6 - ...
        const double inv = 1.0 / (c * c);
        double term = inv;
        q = 0.0;
        for (int n = 1; n <= 12; ++n) {
            q += term;
            term *= -(2.0 * n + 1.0) * inv;
        }
    } else {
        q = 1.0 - c * std::sqrt(constants::pi / 2.0) * erfcx(c / std::sqrt(2.0));
    }
    return -strength * sqrt_2_over_pi / s * (1.0 + q / 3.0);
}

double energy_newton(double sigma) {
    return ansatz_energy(GravityKernel::newtonian(), sigma);
}

double energy_idg(double sigma, double beta) {
    return ansatz_energy(GravityKernel::idg(beta), sigma);
}

double energy_yukawa(double sigma, double mu) {
    return ansatz_energy(GravityKernel::yukawa(mu), sigma);
}

namespace {

double convention_weight(EnergyConvention c) {
    return c == EnergyConvention::expectation ? 1.0 : 0.5;
}

}  // namespace

double ansatz_energy(const GravityKernel& k, double s, EnergyConvention c) {
    require_width(s);
    return 0.75 / (s * s) + convention_weight(c) * gaussian_pair_energy(k, s);
}

double scaled_stationarity(const GravityKernel& k, double s, EnergyConvention c) {
    require_width(s);
    const double w = convention_weight(c);
    return -1.0 + w * s * s * s * gaussian_pair_energy_derivative(k, s) / 1.5;
}

Regime classify_regime(const GravityKernel& k, double s) {
    switch (k.model) {
        case GravityModel::newtonian: return Regime::newtonian_limit;
        case GravityModel::idg: {
            const double x = k.beta * s;
            if (x < 2.0) return Regime::deep_nonlocal;
            return x > 2.0 * kRegimeBand ? Regime::newtonian_limit : Regime::crossover;
        }
        case GravityModel::yukawa:
            return k.mu * s > 2.0 * kRegimeBand ? Regime::newtonian_limit : Regime::crossover;
    }
    return Regime::crossover;
}

double reference_width(const GravityKernel& k, EnergyConvention c) {
    k.validate();
    const double coupling = convention_weight(c) * k.strength;
    if (!(coupling > 0.0)) throw DomainError("no gravitational binding: kernel strength is zero");
    const double newton = 1.5 / (sqrt_2_over_pi * coupling);
    switch (k.model) {
        case GravityModel::newtonian: return newton;
        case GravityModel::idg: {
            const double deep = std::pow(3.0 * sqrt_pi / (coupling * k.beta * k.beta * k.beta), 0.25);
            return std::max(newton, deep);
        }
        case GravityModel::yukawa: return 0.75 * newton;
    }
    return newton;
}

namespace {

struct Polished {
    double s;
    double residual;
    std::array<double, 2> bracket;
    std::size_t iterations;
};

// g(s_lo) < 0 < g(s_hi); g increases through the root.
Polished polish_root(const GravityKernel& k, double s_lo, double s_hi, const MinimizeOptions& opt) {
    const double w = convention_weight(opt.convention);
    auto g = [&](double s) { return scaled_stationarity(k, s, opt.convention); };
    auto dg = [&](double s) {
        return w / 1.5 *
               (3.0 * s * s * gaussian_pair_energy_derivative(k, s) +
                s * s * s * gaussian_pair_energy_second_derivative(k, s));
    };

    double lo = s_lo, hi = s_hi;
    double s = std::sqrt(lo * hi);
    std::size_t it = 0;
    for (; it < opt.max_polish_iterations; ++it) {
        const double gs = g(s);
        if (gs < 0.0) lo = s; else hi = s;
        if (gs == 0.0) {
            lo = hi = s;
            break;
        }
        if ((hi - lo) <= opt.bracket_rel_width * s) break;

        const double slope = dg(s);
        double next = (slope > 0.0) ? s - gs / slope : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);

        if (std::abs(next - s) < 0.25 * opt.bracket_rel_width * s) {
            // Newton has converged from one side: close the bracket around it.
            const double delta = 0.5 * opt.bracket_rel_width * next;
            const double a = std::max(lo, next - delta);
            const double b = std::min(hi, next + delta);
            if (g(a) < 0.0) lo = a;
            if (g(b) > 0.0) hi = b;
            s = next;
            if ((hi - lo) <= opt.bracket_rel_width * s) {
                ++it;
                break;
            }
            next = 0.5 * (lo + hi);
        }
        s = next;
    }
    // Report the bracket end with the smaller residual.
    const double g_lo = std::abs(g(lo));
    const double g_hi = std::abs(g(hi));
    const double g_mid = std::abs(g(s));
    double best = s, best_res = g_mid;
    if (g_lo < best_res) { best = lo; best_res = g_lo; }
    if (g_hi < best_res) { best = hi; best_res = g_hi; }
    return {best, best_res, {lo, hi}, it};
}

}  // namespace

ScaledMinimum minimize_scaled(const GravityKernel& k, const MinimizeOptions& opt) {
    k.validate();
    const double center = std::log10(reference_width(k, opt.convention));
    const auto steps = static_cast<std::size_t>(
        std::llround(2.0 * opt.scan_half_width_decades / opt.scan_step_decades));
    std::vector<double> s_grid(steps + 1), g_grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double e = center - opt.scan_half_width_decades + static_cast<double>(i) * opt.scan_step_decades;
        s_grid[i] = std::pow(10.0, e);
        g_grid[i] = scaled_stationarity(k, s_grid[i], opt.convention);
    }

    ScaledMinimum best;
    bool found = false;
    for (std::size_t i = 0; i < steps; ++i) {
        if (!(g_grid[i] < 0.0 && g_grid[i + 1] >= 0.0)) continue;
        const auto p = polish_root(k, s_grid[i], s_grid[i + 1], opt);
        const double e = ansatz_energy(k, p.s, opt.convention);
        ++best.stationary_points;
        if (!found || e < best.energy) {
            best.s = p.s;
            best.energy = e;
            best.residual = p.residual;
            best.bracket = p.bracket;
            best.iterations = p.iterations;
            found = true;
        }
    }
    if (!found) {
        std::ostringstream os;
        os.precision(6);
        os << "model=" << to_string(k.model) << " beta=" << k.beta << " mu=" << k.mu
           << " strength=" << k.strength << "; scanned (s, E):";
        for (std::size_t i = 0; i <= steps; i += 40) {
            os << " (" << s_grid[i] << ", " << ansatz_energy(k, s_grid[i], opt.convention) << ")";
        }
        throw NumericalError("no bracketed energy minimum in scan range", os.str());
    }
    return best;
}

SpreadResult minimize_spread(const PhysicalParams& p, const SpreadOptions& opt) {
    const auto scales = natural_scales(p, opt.length_unit_m);
    const auto kernel = make_kernel(p, scales);
    const auto m = minimize_scaled(kernel, opt.minimize);

    SpreadResult r;
    r.model = p.model;
    r.mass_kg = p.mass_kg;
    r.ms_ev = p.ms_ev;
    r.yukawa_mu_inv_m = p.yukawa_mu_inv_m;
    r.sigma_natural = m.s;
    r.sigma_m = length_to_si(m.s, scales);
    r.energy_natural = m.energy;
    r.residual = m.residual;
    r.iterations = m.iterations;
    r.bracket_m = {length_to_si(m.bracket[0], scales), length_to_si(m.bracket[1], scales)};
    r.regime = classify_regime(kernel, m.s);
    if (p.model == GravityModel::idg) r.scale_product = kernel.beta * m.s;
    if (p.model == GravityModel::yukawa) r.scale_product = kernel.mu * m.s;
    return r;
}

double sigma_newton_closed_form(const PhysicalParams& p) {
    auto q = p;
    q.model = GravityModel::newtonian;
    const auto s = natural_scales(q);
    return 1.5 * std::sqrt(constants::pi / 2.0) * s.l0_m;
}

double sigma_idg_asymptotic(const PhysicalParams& p) {
    if (!p.ms_ev) throw DomainError("asymptotic IDG spread requires M_s");
    const auto s = natural_scales(p);
    const double lambda = s.nonlocality_length_m();
    return std::pow(3.0 * sqrt_pi, 0.25) * std::pow(s.l0_m, 0.25) * std::pow(lambda, 0.75);
}

std::vector<SweepRow> sweep(const std::vector<PhysicalParams>& params, const SpreadOptions& opt,
                            unsigned threads) {
    if (params.empty()) throw DomainError("sweep needs at least one parameter set");
    std::vector<SweepRow> rows(params.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto& row = rows[i];
            row.index = i;
            row.params = params[i];
            try {
                row.result = minimize_spread(params[i], opt);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

std::vector<SweepRow> sweep(const std::vector<double>& masses_kg, const PhysicalParams& templ,
                            const SpreadOptions& opt, unsigned threads) {
    if (masses_kg.empty()) throw DomainError("sweep needs a nonempty mass list");
    std::vector<PhysicalParams> params;
    params.reserve(masses_kg.size());
    for (double m : masses_kg) {
        auto p = templ;
        p.mass_kg = m;
        params.push_back(p);
    }
    return sweep(params, opt, threads);
}

}  // namespace nlgrav
