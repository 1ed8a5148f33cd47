#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nlgrav/errors.hpp"
#include "nlgrav/evolution.hpp"
#include "nlgrav/groundstate.hpp"
#include "nlgrav/variational.hpp"

using namespace nlgrav;

namespace {

GravityKernel without_gravity() {
    auto k = GravityKernel::newtonian();
    k.strength = 0.0;
    return k;
}

double final_width(const RadialState& s, const GravityKernel& k, double dt, double t_end) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.steps = static_cast<std::size_t>(std::llround(t_end / dt));
    cfg.observables_stride = cfg.steps;
    return evolve(s, k, cfg).widths.back();
}

}  // namespace

TEST_CASE("free gaussian law") {
    CHECK(free_gaussian_width(2.0, 0.0) == 2.0);
    CHECK(free_gaussian_width(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("gravity-off packet spreads freely") {
    const auto s = gaussian_state(RadialGrid::with_extent(40.0, 2000), 1.0);
    EvolutionConfig cfg;
    cfg.dt = 0.005;
    cfg.steps = 775;  // width grows from 1 to 4
    const auto tr = evolve(s, without_gravity(), cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        worst = std::max(worst, std::abs(tr.widths[i] / free_gaussian_width(1.0, tr.times[i]) - 1.0));
    }
    CHECK(tr.widths.back() == doctest::Approx(4.0).epsilon(0.01));
    CHECK(worst < 5e-3);
    CHECK(std::abs(tr.norms.back() - tr.norms.front()) < 1e-9);
}

TEST_CASE("deep non-local packet follows the free control") {
    const double beta = 0.05;
    const auto s = gaussian_state(RadialGrid::with_extent(40.0, 1200), 1.0);
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.steps = 380;
    cfg.observables_stride = 10;
    const auto with = evolve(s, GravityKernel::idg(beta), cfg);
    const auto free = evolve(s, without_gravity(), cfg);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < with.times.size(); ++i) {
        if (beta * with.widths[i] >= 0.2) break;
        CHECK(std::abs(with.widths[i] / free.widths[i] - 1.0) < 0.01);
        ++compared;
    }
    CHECK(compared > 10);
}

TEST_CASE("ground state is stationary") {
    const auto k = GravityKernel::newtonian();
    const auto gs = solve_ground_state(k);
    REQUIRE(gs.report.converged);
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.steps = 1000;
    const auto tr = evolve(gs.state, k, cfg);
    double norm_drift = 0.0, f_drift = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        norm_drift = std::max(norm_drift, std::abs(tr.norms[i] - tr.norms[0]));
        f_drift = std::max(f_drift, std::abs(tr.energies_F[i] / tr.energies_F[0] - 1.0));
    }
    CHECK(norm_drift < 1e-9);
    CHECK(f_drift < 1e-6);
    CHECK(stationarity_check(gs.state, k, cfg) < 1e-3);
    cfg.steps = 0;
    CHECK(stationarity_check(gs.state, k, cfg) == 0.0);
}

TEST_CASE("perturbed state breathes") {
    const auto k = GravityKernel::newtonian();
    MinimizeOptions f;
    f.convention = EnergyConvention::functional;
    const double sigma = 1.3 * minimize_scaled(k, f).s;
    const auto s = gaussian_state(RadialGrid::with_extent(15.0 * sigma, 1500), sigma);
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.steps = 1000;
    cfg.observables_stride = 10;
    CHECK(stationarity_check(s, k, cfg) > 1e-2);
}

TEST_CASE("splitting is second order in the time step") {
    const auto k = GravityKernel::idg(1.0);
    const auto s = gaussian_state(RadialGrid::with_extent(50.0, 300), 4.0);
    const double t_end = 20.0;
    const double w1 = final_width(s, k, 0.4, t_end);
    const double w2 = final_width(s, k, 0.2, t_end);
    const double w4 = final_width(s, k, 0.1, t_end);
    const double ratio = std::abs(w1 - w2) / std::abs(w2 - w4);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("configuration checks") {
    const auto s = gaussian_state(RadialGrid::with_extent(10.0, 100), 1.0);
    EvolutionConfig cfg;
    cfg.dt = 1.0;  // above c_stab h^2 = 0.49
    CHECK_THROWS_AS(evolve(s, GravityKernel::newtonian(), cfg), DomainError);
    cfg.dt = 0.01;
    cfg.observables_stride = 0;
    CHECK_THROWS_AS(evolve(s, GravityKernel::newtonian(), cfg), DomainError);
    cfg.observables_stride = 1;
    auto bad = s;
    for (auto& v : bad.u) v *= 2.0;
    CHECK_THROWS_AS(evolve(bad, GravityKernel::newtonian(), cfg), DomainError);
}

TEST_CASE("sampling stride") {
    const auto s = gaussian_state(RadialGrid::with_extent(20.0, 400), 1.0);
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.steps = 25;
    cfg.observables_stride = 10;
    const auto tr = evolve(s, GravityKernel::newtonian(), cfg);
    REQUIRE(tr.times.size() == 4);
    CHECK(tr.times[1] == doctest::Approx(0.1));
    CHECK(tr.times.back() == doctest::Approx(0.25));
}
