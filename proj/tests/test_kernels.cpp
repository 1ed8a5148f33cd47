#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/kernels.hpp"
#include "nlgrav/quadrature.hpp"

using namespace nlgrav;

namespace {

struct ErfRef {
    double x;
    const char* value;
};

// erf at the exact binary value of x, 30 significant digits (mpmath, 40-digit working precision).
const ErfRef kErfTable[] = {
    {1e-12, "1.12837916709551255120067073140e-12"},
    {1e-8, "0.0000000112837916709551255989210176294"},
    {1e-5, "0.0000112837916705790002729896536198"},
    {1e-3, "0.00112837879096923640343756413937"},
    {0.01, "0.0112834155558496171507771353282"},
    {0.05, "0.0563719777970166269553325177985"},
    {0.1, "0.112462916018284898404712251014"},
    {0.2, "0.222702589210478466176453031209"},
    {0.3, "0.328626759459127416189617985318"},
    {0.4, "0.428392355046668476454109627308"},
    {0.5, "0.520499877813046537682746653892"},
    {0.6, "0.603856090847925905082306758574"},
    {0.7, "0.677801193837418442276858154351"},
    {0.8, "0.742100964707660512589787355613"},
    {0.9, "0.796908212422832139664666160340"},
    {1.0, "0.842700792949714869341220635083"},
    {1.1, "0.880205069574081729657259509256"},
    {1.25, "0.922900128256458230136523481197"},
    {1.5, "0.966105146475310727066976261646"},
    {1.75, "0.986671671219182443772211100129"},
    {2.0, "0.995322265018952734162069256367"},
    {2.25, "0.998537283413318848302089203627"},
    {2.5, "0.999593047982555041060435784260"},
    {2.75, "0.999899378077880363163095608025"},
    {3.0, "0.999977909503001414558627223870"},
    {3.5, "0.999999256901627658587254476316"},
    {4.0, "0.999999984582742099719981147840"},
    {4.5, "0.999999999803383955845711252372"},
    {5.0, "0.999999999998462540205571965150"},
    {5.5, "0.999999999999992642152082025602"},
    {5.9, "0.999999999999999928095902164495"},
};

double ulp_distance(double a, double b) {
    const double ulp = std::nextafter(std::abs(b), std::numeric_limits<double>::infinity()) - std::abs(b);
    return std::abs(a - b) / ulp;
}

double angular_average(const GravityKernel& k, double r, double rp) {
    auto f = [&](double c) { return 0.5 * k(std::sqrt(r * r + rp * rp - 2.0 * r * rp * c)); };
    return quad::integrate(f, -1.0, 1.0).value;
}

}  // namespace

TEST_CASE("std::erf against the 30-digit table") {
    for (const auto& e : kErfTable) {
        const double ref = std::strtod(e.value, nullptr);
        INFO("x = " << e.x);
        CHECK(ulp_distance(std::erf(e.x), ref) <= 2.0);
    }
}

TEST_CASE("idg kernel values") {
    const auto k = GravityKernel::idg(1.0);
    CHECK(k(2.0) == doctest::Approx(-0.421350396474857434670610317541).epsilon(1e-15));
    CHECK(k(0.0) == doctest::Approx(-1.0 / constants::sqrt_pi).epsilon(1e-15));
    CHECK(k(1e-9) == doctest::Approx(-1.0 / constants::sqrt_pi).epsilon(1e-12));
    CHECK(k(1e3) == doctest::Approx(-1e-3).epsilon(1e-15));
    CHECK(GravityKernel::idg(1e8)(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("singular kernels reject the origin") {
    CHECK_THROWS_AS(GravityKernel::newtonian()(0.0), SingularInputError);
    CHECK_THROWS_AS(GravityKernel::yukawa(1.0)(0.0), SingularInputError);
    CHECK_THROWS_AS(GravityKernel::idg(1.0)(-1.0), DomainError);
    CHECK_THROWS_AS(GravityKernel::idg(0.0).validate(), DomainError);
    CHECK_THROWS_AS(GravityKernel::yukawa(-2.0).validate(), DomainError);
}

TEST_CASE("yukawa kernel") {
    const auto k = GravityKernel::yukawa(2.0);
    CHECK(k(0.5) == doctest::Approx(-2.0 * (1.0 + std::exp(-1.0) / 3.0)).epsilon(1e-15));
    CHECK(k.r_times_kernel(0.0) == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("model ordering of the kernels") {
    const auto n = GravityKernel::newtonian();
    const auto y = GravityKernel::yukawa(0.7);
    for (double beta : {1e-3, 0.1, 1.0, 30.0}) {
        const auto k = GravityKernel::idg(beta);
        for (double r = 1e-4; r < 1e4; r *= 1.37) {
            CHECK(k(r) >= n(r));
            if (beta * r < 10.0) CHECK(k(r) > n(r));
            CHECK(y(r) <= n(r));
        }
    }
}

TEST_CASE("idg kernel increases monotonically") {
    const auto k = GravityKernel::idg(2.0);
    double prev = k(1e-6);
    for (double r = 2e-6; r < 1e3; r *= 1.05) {
        const double v = k(r);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("derivative combinations against finite differences") {
    for (const auto& k : {GravityKernel::newtonian(), GravityKernel::idg(1.3), GravityKernel::yukawa(0.8)}) {
        for (double r : {0.05, 0.7, 3.0, 20.0}) {
            const double h = 1e-4 * r;
            const double d1 = (k(r + h) - k(r - h)) / (2.0 * h);
            const double d2 = (k(r + h) - 2.0 * k(r) + k(r - h)) / (h * h);
            CHECK(k.r2_times_derivative(r) == doctest::Approx(r * r * d1).epsilon(1e-7));
            CHECK(k.r3_times_second(r) == doctest::Approx(r * r * r * d2).epsilon(1e-5));
            CHECK(k.r_times_kernel(r) == doctest::Approx(r * k(r)).epsilon(1e-15));
        }
    }
}

TEST_CASE("shell averages") {
    CHECK(GravityKernel::idg(0.9).shell_average(0.8, 1.9) == doctest::Approx(-0.39669856903787016826).epsilon(1e-13));
    CHECK(GravityKernel::yukawa(1.3).shell_average(0.8, 1.9) ==
          doctest::Approx(-0.54397874559774192092).epsilon(1e-13));
    CHECK(GravityKernel::newtonian().shell_average(0.8, 1.9) == doctest::Approx(-1.0 / 1.9));
    for (const auto& k : {GravityKernel::idg(0.3), GravityKernel::idg(40.0), GravityKernel::yukawa(5.0)}) {
        for (double r : {0.01, 0.5, 2.0}) {
            for (double rp : {0.02, 0.6, 7.0}) {
                CHECK(k.shell_average(r, rp) == doctest::Approx(angular_average(k, r, rp)).epsilon(1e-10));
                CHECK(k.shell_average(r, rp) == k.shell_average(rp, r));
            }
        }
    }
    CHECK(GravityKernel::idg(2.0).shell_average(0.0, 0.0) == doctest::Approx(-2.0 / constants::sqrt_pi));
    CHECK(GravityKernel::idg(2.0).shell_average(0.0, 1.5) == doctest::Approx(GravityKernel::idg(2.0)(1.5)));
}

TEST_CASE("spectral inversion reproduces the closed form") {
    const double beta = 1.0;
    const auto k = GravityKernel::idg(beta);
    for (double r : {1e-3, 1.0, 1e2}) {
        CHECK(kernel_from_form_factor(beta, r) == doctest::Approx(k(r)).epsilon(1e-6));
    }
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double r = std::pow(10.0, -3.0 + 5.0 * i / 49.0) / beta;
        worst = std::max(worst, std::abs(kernel_from_form_factor(beta, r) / k(r) - 1.0));
    }
    CHECK(worst <= 1e-6);
    CHECK(kernel_from_form_factor(1e6, 1.0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(kernel_from_form_factor(3.0, 1e-7) == doctest::Approx(-3.0 / constants::sqrt_pi).epsilon(1e-9));
    CHECK_THROWS_AS(kernel_from_form_factor(1.0, 0.0), DomainError);
}

TEST_CASE("spectral inversion at other scales") {
    FormFactorDiagnostics d;
    const double v = kernel_from_form_factor(0.03, 5.0, &d);
    CHECK(v == doctest::Approx(GravityKernel::idg(0.03)(5.0)).epsilon(1e-9));
    CHECK(d.panels >= 1);
    CHECK(d.k_max == doctest::Approx(0.03 * std::sqrt(30.0 * std::log(10.0))));
}

TEST_CASE("potential of a gaussian at the origin") {
    // Newtonian: -2 / (sqrt(pi) sigma).
    CHECK(potential_at_origin(GravityKernel::newtonian(), 1.0) == doctest::Approx(-2.0 / constants::sqrt_pi).epsilon(1e-12));
    // idg: -(beta/sqrt(pi)) / sqrt(1 + beta^2 sigma^2 / 4).
    for (double beta : {1e-4, 0.9, 1e3}) {
        for (double sigma : {0.1, 0.7, 5.0}) {
            const double exact = -(beta / constants::sqrt_pi) / std::sqrt(1.0 + beta * beta * sigma * sigma / 4.0);
            CHECK(potential_at_origin(GravityKernel::idg(beta), sigma) == doctest::Approx(exact).epsilon(1e-11));
        }
    }
    CHECK(potential_at_origin(GravityKernel::idg(0.9), 0.7) == doctest::Approx(-0.48431093463427768134).epsilon(1e-12));
    CHECK(potential_at_origin(GravityKernel::yukawa(1.3), 0.7) == doctest::Approx(-1.8721727518442663585).epsilon(1e-12));
    CHECK(potential_at_origin(GravityKernel::idg(1e-6), 1.0) == doctest::Approx(-1e-6 / constants::sqrt_pi).epsilon(1e-10));
    CHECK(potential_at_origin(GravityKernel::idg(1e3), 1.0) ==
          doctest::Approx(potential_at_origin(GravityKernel::newtonian(), 1.0)).epsilon(1e-5));
    CHECK_THROWS_AS(potential_at_origin(GravityKernel::newtonian(), 0.0), DomainError);
}

TEST_CASE("kernel from physical parameters") {
    const auto p = PhysicalParams::idg(1e-14, 1e9);
    const auto s = natural_scales(p);
    const auto k = make_kernel(p, s);
    CHECK(k.model == GravityModel::idg);
    CHECK(k.beta == s.beta);
    CHECK(k.strength == 1.0);
    CHECK(k.modification_length() == doctest::Approx(2.0 / s.beta));
    CHECK(kernel_eval(k, 1.0) == k(1.0));
}
