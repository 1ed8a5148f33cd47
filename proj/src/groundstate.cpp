#include "nlgrav/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/variational.hpp"

namespace nlgrav {

using constants::pi;

RadialGrid RadialGrid::with_extent(double r_max, std::size_t nodes) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("r_max must be positive");
    if (nodes < 8) throw DomainError("radial grid needs at least 8 nodes");
    return {r_max / static_cast<double>(nodes + 1), nodes};
}

void RadialGrid::validate() const {
    if (!(spacing > 0.0) || !std::isfinite(spacing) || nodes < 8) {
        throw DomainError("invalid radial grid");
    }
}

double state_norm(const RadialGrid& grid, std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return 4.0 * pi * grid.spacing * s;
}

void normalize(RadialState& state) {
    const double n = state_norm(state.grid, state.u);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a null state");
    const double f = 1.0 / std::sqrt(n);
    for (double& v : state.u) v *= f;
    state.norm = state_norm(state.grid, state.u);
}

RadialState gaussian_state(const RadialGrid& grid, double sigma) {
    grid.validate();
    if (!(sigma > 0.0)) throw DomainError("Gaussian width must be positive");
    RadialState s;
    s.grid = grid;
    s.u.resize(grid.nodes);
    for (std::size_t i = 0; i < grid.nodes; ++i) {
        const double r = grid.r(i);
        s.u[i] = r * std::exp(-0.5 * r * r / (sigma * sigma));
    }
    normalize(s);
    return s;
}

double rms_width(const RadialGrid& grid, std::span<const double> u) {
    double m2 = 0.0, n = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = grid.r(i);
        m2 += r * r * u[i] * u[i];
        n += u[i] * u[i];
    }
    return std::sqrt(2.0 / 3.0 * m2 / n);
}

double tail_ratio(const RadialState& s) {
    double peak = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) peak = std::max(peak, std::abs(s.R(i)));
    return peak > 0.0 ? std::abs(s.R(s.u.size() - 1)) / peak : 0.0;
}

std::size_t sign_changes(const RadialState& s) {
    std::size_t changes = 0;
    double last = 0.0;
    for (double v : s.u) {
        if (v == 0.0) continue;
        if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++changes;
        last = v;
    }
    return changes;
}

HartreeOperator::HartreeOperator(const GravityKernel& kernel, const RadialGrid& grid)
    : kernel_(kernel), grid_(grid) {
    kernel_.validate();
    grid_.validate();
    if (kernel_.model == GravityModel::newtonian) return;
    const std::size_t n = grid_.nodes;
    matrix_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = kernel_.shell_average(grid_.r(i), grid_.r(j));
            matrix_[i * n + j] = k;
            matrix_[j * n + i] = k;
        }
    }
}

std::vector<double> HartreeOperator::potential(std::span<const double> u) const {
    std::vector<double> out(u.size());
    potential(u, out);
    return out;
}

void HartreeOperator::potential(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = grid_.nodes;
    if (u.size() != n || out.size() != n) throw DomainError("state size does not match grid");
    const double w = 4.0 * pi * grid_.spacing;
    if (kernel_.model == GravityModel::newtonian) {
        // Phi_i = -g [ (1/r_i) sum_{j<=i} m_j + sum_{j>i} m_j / r_j ]
        double exterior = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            out[i] = exterior;
            exterior += w * u[i] * u[i] / grid_.r(i);
        }
        double interior = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            interior += w * u[i] * u[i];
            out[i] = -kernel_.strength * (interior / grid_.r(i) + out[i]);
        }
        return;
    }
    std::vector<double> mass(n);
    for (std::size_t j = 0; j < n; ++j) mass[j] = w * u[j] * u[j];
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = matrix_.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * mass[j];
        out[i] = acc;
    }
}

double HartreeOperator::potential_at(std::span<const double> u, double r) const {
    if (u.size() != grid_.nodes) throw DomainError("state size does not match grid");
    if (r < 0.0) throw DomainError("radius must be >= 0");
    const double w = 4.0 * pi * grid_.spacing;
    double acc = 0.0;
    for (std::size_t j = 0; j < grid_.nodes; ++j) {
        acc += w * u[j] * u[j] * kernel_.shell_average(r, grid_.r(j));
    }
    return acc;
}

std::vector<double> self_consistent_potential(const RadialState& state, const GravityKernel& k) {
    if (std::abs(state_norm(state.grid, state.u) - 1.0) > 1e-8) {
        throw DomainError("self-consistent potential requires a normalized state");
    }
    return HartreeOperator(k, state.grid).potential(state.u);
}

FunctionalParts evaluate_functional(const RadialGrid& grid, std::span<const double> u,
                                    std::span<const double> phi) {
    const std::size_t n = u.size();
    const double h = grid.spacing;
    double grad = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = u[i] - prev;
        grad += d * d;
        prev = u[i];
    }
    grad += prev * prev;
    double inter = 0.0;
    for (std::size_t i = 0; i < n; ++i) inter += u[i] * u[i] * phi[i];
    return {2.0 * pi / h * grad, 4.0 * pi * h * inter};
}

std::vector<double> apply_hamiltonian(const RadialGrid& grid, std::span<const double> u,
                                      std::span<const double> phi) {
    const std::size_t n = u.size();
    const double c = 0.5 / (grid.spacing * grid.spacing);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = -c * (right - 2.0 * u[i] + left) + phi[i] * u[i];
    }
    return out;
}

namespace {

// Solves (I + dt H) v = rhs for the tridiagonal H = -D2/2 + diag(phi).
void implicit_step(const RadialGrid& grid, std::span<const double> phi, double dt,
                   std::span<const double> rhs, std::span<double> v, std::vector<double>& scratch) {
    const std::size_t n = rhs.size();
    const double c = 0.5 / (grid.spacing * grid.spacing);
    const double off = -dt * c;
    scratch.resize(n);
    // Thomas algorithm with constant off-diagonals.
    double denom = 1.0 + dt * (2.0 * c + phi[0]);
    scratch[0] = off / denom;
    v[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = 1.0 + dt * (2.0 * c + phi[i]) - off * scratch[i - 1];
        scratch[i] = off / denom;
        v[i] = (rhs[i] - off * v[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) v[i] -= scratch[i] * v[i + 1];
}

struct Diagnostics {
    double residual;
    double epsilon;
};

Diagnostics residual_of(const RadialGrid& grid, std::span<const double> u, std::span<const double> phi) {
    const auto hu = apply_hamiltonian(grid, u, phi);
    const double w = 4.0 * pi * grid.spacing;
    double eps = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) eps += w * u[i] * hu[i];
    double res = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = hu[i] - eps * u[i];
        res += d * d;
    }
    return {std::sqrt(w * res), eps};
}

RadialState regrid(const RadialState& s, const RadialGrid& grid) {
    RadialState out;
    out.grid = grid;
    out.u.assign(grid.nodes, 0.0);
    for (std::size_t i = 0; i < grid.nodes; ++i) {
        const double x = grid.r(i) / s.grid.spacing - 1.0;
        if (x < 0.0) {
            out.u[i] = s.u.front() * grid.r(i) / s.grid.r(0);
            continue;
        }
        const auto j = static_cast<std::size_t>(x);
        if (j + 1 >= s.u.size()) {
            out.u[i] = j < s.u.size() ? s.u[j] * (1.0 - (x - static_cast<double>(j))) : 0.0;
            continue;
        }
        const double f = x - static_cast<double>(j);
        out.u[i] = (1.0 - f) * s.u[j] + f * s.u[j + 1];
    }
    normalize(out);
    return out;
}

// Runs imaginary-time iterations on a fixed grid. Returns true when converged.
bool relax(RadialState& state, const HartreeOperator& op, const GroundStateConfig& cfg,
           SolverReport& rep) {
    const auto& grid = state.grid;
    const std::size_t n = grid.nodes;
    std::vector<double> phi = op.potential(state.u);
    auto parts = evaluate_functional(grid, state.u, phi);
    if (rep.functional_history.empty()) rep.functional_history.push_back(parts.functional());

    std::vector<double> trial(n), trial_phi(n), scratch;
    double dt = 0.0;
    while (rep.iterations < cfg.max_iterations) {
        const auto d = residual_of(grid, state.u, phi);
        rep.residual = d.residual;
        state.chemical_potential = d.epsilon;
        rep.residual_history.push_back(d.residual);
        if (d.residual < cfg.tolerance) return true;
        ++rep.iterations;

        const double depth = -*std::min_element(phi.begin(), phi.end());
        const double dt_max = depth > 0.0 ? cfg.dt_safety / depth : 1e12;
        if (dt == 0.0 || dt > dt_max) dt = dt_max;

        const double floor = dt_max * 1e-12;
        while (true) {
            implicit_step(grid, phi, dt, state.u, trial, scratch);
            const double nrm = state_norm(grid, trial);
            const double f = 1.0 / std::sqrt(nrm);
            for (double& v : trial) v *= f;
            op.potential(trial, trial_phi);
            const auto trial_parts = evaluate_functional(grid, trial, trial_phi);
            const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(parts.kinetic) + std::abs(parts.interaction));
            if (trial_parts.functional() <= parts.functional() + slack) {
                state.u.swap(trial);
                phi.swap(trial_phi);
                parts = trial_parts;
                rep.functional_history.push_back(parts.functional());
                dt = std::min(1.1 * dt, dt_max);
                break;
            }
            ++rep.rejected_steps;
            dt *= 0.5;
            if (dt < floor) {
                std::ostringstream os;
                os << "iteration " << rep.iterations << " residual " << d.residual << " F "
                   << parts.functional();
                throw NumericalError("imaginary-time step underflow", os.str());
            }
        }
        rep.final_step = dt;
    }
    const auto d = residual_of(grid, state.u, phi);
    rep.residual = d.residual;
    state.chemical_potential = d.epsilon;
    return d.residual < cfg.tolerance;
}

}  // namespace

GroundState solve_ground_state(const GravityKernel& k, const GroundStateConfig& cfg) {
    k.validate();
    if (cfg.nodes > cfg.max_nodes) throw DomainError("requested node count exceeds max_nodes");
    const double sigma0 = cfg.initial_width.value_or(
        minimize_scaled(k, {.convention = EnergyConvention::functional}).s);
    if (!(sigma0 > 0.0)) throw DomainError("initial width must be positive");
    const double r_max = cfg.r_max.value_or(cfg.extent_widths * sigma0);
    auto grid = RadialGrid::with_extent(r_max, cfg.nodes);
    if (sigma0 < cfg.min_cells_per_width * grid.spacing) {
        std::ostringstream os;
        os << "initial width " << sigma0 << " spans " << sigma0 / grid.spacing
           << " cells; at least " << cfg.min_cells_per_width << " required";
        throw ResolutionError(os.str());
    }

    GroundState gs;
    gs.report.initial_width = sigma0;
    gs.state = gaussian_state(grid, sigma0);

    while (true) {
        HartreeOperator op(k, gs.state.grid);
        gs.report.converged = relax(gs.state, op, cfg, gs.report);
        if (!gs.report.converged) break;

        gs.report.tail_ratio = tail_ratio(gs.state);
        if (gs.report.tail_ratio < cfg.decay_threshold) {
            gs.report.domain_adequate = true;
            break;
        }
        if (gs.report.expansions >= cfg.max_expansions) break;
        const double new_extent = gs.state.grid.r_max() * cfg.expansion_factor;
        if (k.model == GravityModel::idg && new_extent > cfg.weak_binding_cap * 2.0 / k.beta) {
            gs.report.weakly_bound = true;
            break;
        }
        const auto nodes = static_cast<std::size_t>(
            std::ceil(new_extent / gs.state.grid.spacing)) - 1;
        if (nodes > cfg.max_nodes) break;
        gs.state = regrid(gs.state, {gs.state.grid.spacing, nodes});
        ++gs.report.expansions;
    }

    const auto& grid_f = gs.state.grid;
    HartreeOperator op(k, grid_f);
    const auto phi = op.potential(gs.state.u);
    const auto parts = evaluate_functional(grid_f, gs.state.u, phi);
    const auto d = residual_of(grid_f, gs.state.u, phi);
    auto& rep = gs.report;
    rep.residual = d.residual;
    rep.chemical_potential = d.epsilon;
    rep.converged = rep.converged && d.residual < cfg.tolerance;
    gs.state.chemical_potential = d.epsilon;
    gs.state.norm = state_norm(grid_f, gs.state.u);
    rep.kinetic = parts.kinetic;
    rep.interaction = parts.interaction;
    rep.energy_functional = parts.functional();
    rep.energy_expectation = parts.expectation();
    rep.virial_ratio = parts.kinetic != 0.0 ? parts.interaction / (-4.0 * parts.kinetic) : 0.0;
    rep.width = rms_width(gs.state);
    rep.tail_ratio = tail_ratio(gs.state);
    if (rep.width < cfg.min_cells_per_width * grid_f.spacing) {
        std::ostringstream os;
        os << "state collapsed to width " << rep.width << " (" << rep.width / grid_f.spacing
           << " cells)";
        throw ResolutionError(os.str());
    }
    return gs;
}

GroundState solve_ground_state(const PhysicalParams& p, const GroundStateConfig& cfg) {
    const auto scales = natural_scales(p);
    return solve_ground_state(make_kernel(p, scales), cfg);
}

GapResult gaussian_functional_gap(const GroundState& gs, const GravityKernel& k) {
    const auto& grid = gs.state.grid;
    HartreeOperator op(k, grid);
    auto functional_at = [&](double log_sigma) {
        const auto g = gaussian_state(grid, std::exp(log_sigma));
        const auto phi = op.potential(g.u);
        return evaluate_functional(grid, g.u, phi).functional();
    };

    // Golden-section search in log(sigma) around the solver width.
    double a = std::log(gs.report.width / 3.0);
    double b = std::log(gs.report.width * 3.0);
    const double min_log = std::log(2.0 * grid.spacing);
    const double max_log = std::log(grid.r_max() / 3.0);
    a = std::max(a, min_log);
    b = std::min(b, max_log);
    if (!(b > a)) throw NumericalError("no room on the grid for the Gaussian width search");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = functional_at(c), fd = functional_at(d);
    while (b - a > 1e-9) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = functional_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = functional_at(d);
        }
    }
    GapResult r;
    const double best = 0.5 * (a + b);
    r.gaussian_sigma = std::exp(best);
    r.gaussian_functional = functional_at(best);
    r.solver_functional = gs.report.energy_functional;
    r.gap = r.gaussian_functional - r.solver_functional;
    return r;
}

GapResult gaussian_functional_gap(const PhysicalParams& p, const GroundStateConfig& cfg) {
    const auto scales = natural_scales(p);
    const auto k = make_kernel(p, scales);
    const auto gs = solve_ground_state(k, cfg);
    if (!gs.report.converged) {
        std::ostringstream os;
        os << "residual " << gs.report.residual << " after " << gs.report.iterations << " iterations";
        throw NumericalError("ground-state solver did not converge", os.str());
    }
    return gaussian_functional_gap(gs, k);
}

}  // namespace nlgrav
