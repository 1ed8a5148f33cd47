#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/groundstate.hpp"
#include "nlgrav/kernels.hpp"
#include "nlgrav/variational.hpp"

using namespace nlgrav;

namespace {

const GroundState& newton_ground() {
    static const GroundState gs = solve_ground_state(GravityKernel::newtonian());
    return gs;
}

}  // namespace

TEST_CASE("grid geometry") {
    const auto g = RadialGrid::with_extent(10.0, 99);
    CHECK(g.spacing == doctest::Approx(0.1));
    CHECK(g.r(0) == doctest::Approx(0.1));
    CHECK(g.r_max() == doctest::Approx(10.0));
    CHECK_THROWS_AS(RadialGrid::with_extent(10.0, 3), DomainError);
    CHECK_THROWS_AS(RadialGrid::with_extent(-1.0, 100), DomainError);
}

TEST_CASE("gaussian state moments") {
    const auto s = gaussian_state(RadialGrid::with_extent(30.0, 3000), 2.0);
    CHECK(s.norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(state_norm(s.grid, s.u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rms_width(s) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(sign_changes(s) == 0);
    CHECK(tail_ratio(s) < 1e-20);
}

TEST_CASE("hartree potential of a gaussian at the origin") {
    const auto s = gaussian_state(RadialGrid::with_extent(20.0, 2000), 1.3);
    for (const auto& k : {GravityKernel::idg(0.7), GravityKernel::idg(6.0)}) {
        const HartreeOperator op(k, s.grid);
        CHECK(op.potential_at(s.u, 0.0) == doctest::Approx(potential_at_origin(k, 1.3)).epsilon(1e-8));
    }
    // A 1/r kernel leaves a kink at the origin, so the radial sum is second order only.
    for (const auto& k : {GravityKernel::newtonian(), GravityKernel::yukawa(0.9)}) {
        const HartreeOperator op(k, s.grid);
        const double h = s.grid.spacing;
        CHECK(std::abs(op.potential_at(s.u, 0.0) / potential_at_origin(k, 1.3) - 1.0) < h * h);
    }
}

TEST_CASE("shell theorem for the newtonian potential") {
    const auto grid = RadialGrid::with_extent(10.0, 999);
    const HartreeOperator op(GravityKernel::newtonian(), grid);

    RadialState point{grid, std::vector<double>(grid.nodes, 0.0)};
    point.u[0] = 1.0;
    normalize(point);
    const auto phi = op.potential(point.u);
    for (std::size_t i = 1; i < grid.nodes; i += 97) CHECK(phi[i] == doctest::Approx(-1.0 / grid.r(i)).epsilon(1e-12));

    RadialState shell{grid, std::vector<double>(grid.nodes, 0.0)};
    shell.u[500] = 1.0;
    normalize(shell);
    const auto inside = op.potential(shell.u);
    for (std::size_t i = 0; i <= 500; i += 50) CHECK(inside[i] == doctest::Approx(-1.0 / grid.r(500)).epsilon(1e-12));
    CHECK(inside[800] == doctest::Approx(-1.0 / grid.r(800)).epsilon(1e-12));
}

TEST_CASE("newtonian matrix-free path matches the general shell sum") {
    const auto s = gaussian_state(RadialGrid::with_extent(15.0, 400), 2.0);
    const HartreeOperator fast(GravityKernel::newtonian(), s.grid);
    const HartreeOperator big_beta(GravityKernel::idg(1e9), s.grid);
    const auto a = fast.potential(s.u);
    const auto b = big_beta.potential(s.u);
    for (std::size_t i = 0; i < a.size(); i += 13) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("self-consistent potential requires a normalized state") {
    auto s = gaussian_state(RadialGrid::with_extent(15.0, 400), 2.0);
    for (auto& v : s.u) v *= 1.01;
    CHECK_THROWS_AS(self_consistent_potential(s, GravityKernel::newtonian()), DomainError);
}

TEST_CASE("newtonian ground state") {
    const auto& gs = newton_ground();
    const auto& r = gs.report;
    CHECK(r.converged);
    CHECK(r.residual < 1e-8);
    CHECK(r.domain_adequate);
    CHECK(r.tail_ratio < 1e-8);
    CHECK(std::abs(r.virial_ratio - 1.0) < 1e-3);
    CHECK(r.interaction == doctest::Approx(-4.0 * r.kinetic).epsilon(1e-3));
    // Ground-state energy of the unit Schroedinger-Newton problem, about -0.0543.
    CHECK(r.energy_functional == doctest::Approx(-0.05426).epsilon(2e-3));
    CHECK(r.energy_expectation == doctest::Approx(r.kinetic + r.interaction));
    CHECK(sign_changes(gs.state) == 0);
    CHECK(state_norm(gs.state.grid, gs.state.u) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("chemical potential is consistent with the residual") {
    const auto& gs = newton_ground();
    const auto k = GravityKernel::newtonian();
    const auto phi = self_consistent_potential(gs.state, k);
    const auto hu = apply_hamiltonian(gs.state.grid, gs.state.u, phi);
    double num = 0.0;
    for (std::size_t i = 0; i < hu.size(); ++i) num += gs.state.u[i] * hu[i];
    const double eps = num / (state_norm(gs.state.grid, gs.state.u) / (4.0 * constants::pi * gs.state.grid.spacing));
    CHECK(eps == doctest::Approx(gs.state.chemical_potential).epsilon(1e-10));
    const auto parts = evaluate_functional(gs.state.grid, gs.state.u, phi);
    CHECK(parts.functional() == doctest::Approx(gs.report.energy_functional).epsilon(1e-12));
}

TEST_CASE("descent is monotone") {
    const auto& h = newton_ground().report.functional_history;
    REQUIRE(h.size() > 2);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-14 * std::abs(h[i - 1]));
}

TEST_CASE("gaussian gap is nonnegative") {
    const auto& gs = newton_ground();
    const auto gap = gaussian_functional_gap(gs, GravityKernel::newtonian());
    CHECK(gap.gap >= 0.0);
    CHECK(gap.gap / std::abs(gap.solver_functional) < 0.05);
    for (const auto& k : {GravityKernel::idg(0.2), GravityKernel::yukawa(1.0)}) {
        const auto g = solve_ground_state(k);
        REQUIRE(g.report.converged);
        CHECK(gaussian_functional_gap(g, k).gap >= 0.0);
    }
}

TEST_CASE("grid refinement") {
    const auto& coarse = newton_ground();
    GroundStateConfig fine;
    fine.nodes = 2 * coarse.state.grid.nodes + 1;
    fine.r_max = coarse.state.grid.r_max();
    const auto f = solve_ground_state(GravityKernel::newtonian(), fine);
    REQUIRE(f.report.converged);
    CHECK(std::abs(f.report.energy_functional / coarse.report.energy_functional - 1.0) < 1e-4);
}

TEST_CASE("model ordering of converged widths") {
    const double wn = newton_ground().report.width;
    const double wi = solve_ground_state(GravityKernel::idg(1.0)).report.width;
    const double wy = solve_ground_state(GravityKernel::yukawa(1.0)).report.width;
    CHECK(wi >= wn);
    CHECK(wn >= wy);
}

TEST_CASE("deep non-local ground state stays near the variational width") {
    const auto k = GravityKernel::idg(0.05);
    const auto g = solve_ground_state(k);
    REQUIRE(g.report.converged);
    MinimizeOptions f;
    f.convention = EnergyConvention::functional;
    const double ratio = g.report.width / minimize_scaled(k, f).s;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("physical parameters route through the natural scales") {
    const auto a = solve_ground_state(PhysicalParams::idg(1e-14, 1e9));
    const auto s = natural_scales(PhysicalParams::idg(1e-14, 1e9));
    const auto b = solve_ground_state(GravityKernel::idg(s.beta));
    CHECK(a.report.width == doctest::Approx(b.report.width).epsilon(1e-12));
}

TEST_CASE("under-resolved requests are rejected") {
    GroundStateConfig cfg;
    cfg.nodes = 100;
    cfg.r_max = 1000.0;
    cfg.initial_width = 3.0;
    CHECK_THROWS_AS(solve_ground_state(GravityKernel::newtonian(), cfg), ResolutionError);
}

TEST_CASE("iteration cap reports non-convergence") {
    GroundStateConfig cfg;
    cfg.max_iterations = 3;
    const auto g = solve_ground_state(GravityKernel::newtonian(), cfg);
    CHECK_FALSE(g.report.converged);
    CHECK(g.report.residual_history.size() >= 3);
}
