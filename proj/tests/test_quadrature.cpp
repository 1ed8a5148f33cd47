#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlgrav/constants.hpp"
#include "nlgrav/errors.hpp"
#include "nlgrav/quadrature.hpp"

using namespace nlgrav;

TEST_CASE("polynomials are exact") {
    const auto r = quad::integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("gaussian moment") {
    const auto r = quad::integrate([](double x) { return x * x * std::exp(-x * x); }, 0.0, 40.0);
    CHECK(r.value == doctest::Approx(constants::sqrt_pi / 4.0).epsilon(1e-14));
}

TEST_CASE("endpoint singularity of x^-1/2") {
    quad::Options opt;
    opt.rel_tol = 1e-8;
    const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("breakpoints resolve a narrow peak") {
    auto f = [](double x) { return std::exp(-1e6 * (x - 0.3) * (x - 0.3)); };
    const std::vector<double> pts{0.0, 0.29, 0.31, 1.0};
    const auto r = quad::integrate(f, pts);
    CHECK(r.value == doctest::Approx(constants::sqrt_pi / 1e3).epsilon(1e-12));
}

TEST_CASE("non-integrable input reports a numerical error") {
    quad::Options opt;
    opt.max_intervals = 50;
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opt), NumericalError);
}
