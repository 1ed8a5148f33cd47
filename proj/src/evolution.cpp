#include "nlgrav/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"

namespace nlgrav {

using cplx = std::complex<double>;

void EvolutionConfig::validate(const RadialGrid& grid) const {
    grid.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
    if (observables_stride == 0) throw DomainError("observables stride must be >= 1");
    const double bound = c_stab * grid.spacing * grid.spacing;
    if (dt >= bound) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds stability bound c_stab*h^2 = " << bound;
        throw DomainError(os.str());
    }
}

double free_gaussian_width(double sigma0, double t) {
    const double q = t / (sigma0 * sigma0);
    return sigma0 * std::sqrt(1.0 + q * q);
}

namespace {

// Crank-Nicolson propagator for exp(-i tau T), T = -D2/2 with Dirichlet ends.
// The LU factors of (I + i tau T / 2) are computed once.
class KineticPropagator {
public:
    KineticPropagator(const RadialGrid& grid, double tau) : n_(grid.nodes) {
        const double c = 0.5 / (grid.spacing * grid.spacing);
        diag_rhs_ = cplx(1.0, -0.5 * tau * 2.0 * c);
        off_rhs_ = cplx(0.0, 0.5 * tau * c);
        const cplx diag(1.0, 0.5 * tau * 2.0 * c);
        off_ = cplx(0.0, -0.5 * tau * c);
        gamma_.resize(n_);
        inv_denom_.resize(n_);
        cplx denom = diag;
        inv_denom_[0] = 1.0 / denom;
        gamma_[0] = off_ * inv_denom_[0];
        for (std::size_t i = 1; i < n_; ++i) {
            denom = diag - off_ * gamma_[i - 1];
            inv_denom_[i] = 1.0 / denom;
            gamma_[i] = off_ * inv_denom_[i];
        }
        rhs_.resize(n_);
    }

    void apply(std::vector<cplx>& u) {
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx left = i > 0 ? u[i - 1] : cplx{};
            const cplx right = i + 1 < n_ ? u[i + 1] : cplx{};
            rhs_[i] = diag_rhs_ * u[i] + off_rhs_ * (left + right);
        }
        u[0] = rhs_[0] * inv_denom_[0];
        for (std::size_t i = 1; i < n_; ++i) u[i] = (rhs_[i] - off_ * u[i - 1]) * inv_denom_[i];
        for (std::size_t i = n_ - 1; i-- > 0;) u[i] -= gamma_[i] * u[i + 1];
    }

private:
    std::size_t n_;
    cplx diag_rhs_, off_rhs_, off_;
    std::vector<cplx> gamma_, inv_denom_, rhs_;
};

double complex_norm(const RadialGrid& grid, const std::vector<cplx>& u) {
    double s = 0.0;
    for (const auto& v : u) s += std::norm(v);
    return 4.0 * constants::pi * grid.spacing * s;
}

double complex_width(const RadialGrid& grid, const std::vector<cplx>& u) {
    double m2 = 0.0, n = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = grid.r(i);
        const double p = std::norm(u[i]);
        m2 += r * r * p;
        n += p;
    }
    return std::sqrt(2.0 / 3.0 * m2 / n);
}

void density_amplitude(const std::vector<cplx>& u, std::vector<double>& amp) {
    for (std::size_t i = 0; i < u.size(); ++i) amp[i] = std::abs(u[i]);
}

double complex_functional(const RadialGrid& grid, const std::vector<cplx>& u,
                          const std::vector<double>& phi) {
    double grad = 0.0;
    cplx prev{};
    for (const auto& v : u) {
        grad += std::norm(v - prev);
        prev = v;
    }
    grad += std::norm(prev);
    double inter = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) inter += std::norm(u[i]) * phi[i];
    const double kinetic = 2.0 * constants::pi / grid.spacing * grad;
    const double interaction = 4.0 * constants::pi * grid.spacing * inter;
    return kinetic + 0.5 * interaction;
}

}  // namespace

Trajectory evolve(const RadialState& initial, const GravityKernel& k, const EvolutionConfig& cfg) {
    const auto& grid = initial.grid;
    cfg.validate(grid);
    k.validate();
    if (initial.u.size() != grid.nodes) throw DomainError("state size does not match grid");
    if (std::abs(state_norm(grid, initial.u) - 1.0) > 1e-8) {
        throw DomainError("evolution requires a normalized initial state");
    }

    const bool gravity = k.strength > 0.0;
    std::optional<HartreeOperator> op;
    if (gravity) op.emplace(k, grid);
    KineticPropagator half(grid, 0.5 * cfg.dt);

    std::vector<cplx> u(initial.u.begin(), initial.u.end());
    std::vector<double> amp(grid.nodes), phi(grid.nodes, 0.0);

    Trajectory tr;
    auto sample = [&](std::size_t step) {
        density_amplitude(u, amp);
        if (gravity) op->potential(amp, phi);
        tr.times.push_back(static_cast<double>(step) * cfg.dt);
        tr.widths.push_back(complex_width(grid, u));
        tr.norms.push_back(complex_norm(grid, u));
        tr.energies_F.push_back(complex_functional(grid, u, phi));
    };
    sample(0);

    double last_norm = tr.norms.front();
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        half.apply(u);
        if (gravity) {
            density_amplitude(u, amp);
            op->potential(amp, phi);
            for (std::size_t i = 0; i < grid.nodes; ++i) u[i] *= std::polar(1.0, -phi[i] * cfg.dt);
        }
        half.apply(u);

        const double nrm = complex_norm(grid, u);
        if (!std::isfinite(nrm) || std::abs(nrm - last_norm) > 1e-6) {
            std::ostringstream os;
            os << "step " << step << ": norm " << last_norm << " -> " << nrm << " (dt=" << cfg.dt
               << ", h=" << grid.spacing << ")";
            throw NumericalError("evolution became unstable", os.str());
        }
        last_norm = nrm;
        if (step % cfg.observables_stride == 0 || step == cfg.steps) sample(step);
    }
    return tr;
}

Trajectory evolve(const RadialState& initial, const PhysicalParams& p, const EvolutionConfig& cfg) {
    return evolve(initial, make_kernel(p, natural_scales(p)), cfg);
}

double stationarity_check(const RadialState& state, const GravityKernel& k, const EvolutionConfig& cfg) {
    if (cfg.steps == 0) return 0.0;
    const auto tr = evolve(state, k, cfg);
    const double w0 = tr.widths.front();
    double dev = 0.0;
    for (double w : tr.widths) dev = std::max(dev, std::abs(w - w0) / w0);
    return dev;
}

}  // namespace nlgrav
