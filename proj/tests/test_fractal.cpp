#include <cmath>
#include <complex>

#include "doctest.h"
#include "restlab/errors.hpp"
#include "restlab/fractal.hpp"

using namespace restlab;

TEST_SUITE_BEGIN("fractal");

TEST_CASE("middle-thirds atoms sit at interval centers") {
    const auto mu = cantor_measure(1, 2, 1.0 / 3.0, 1, /*centered=*/false);
    REQUIRE(mu.size() == 2);
    CHECK(mu.atoms[0][0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(mu.atoms[1][0] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(mu.masses[0] == 0.5);

    const auto c2 = cantor_measure(1, 2, 1.0 / 3.0, 2, /*centered=*/false);
    REQUIRE(c2.size() == 4);
    CHECK(c2.atoms[0][0] == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
    CHECK(c2.atoms[1][0] == doctest::Approx(5.0 / 18.0).epsilon(1e-14));
    CHECK(c2.atoms[2][0] == doctest::Approx(13.0 / 18.0).epsilon(1e-14));
    CHECK(c2.atoms[3][0] == doctest::Approx(17.0 / 18.0).epsilon(1e-14));

    const auto cc = cantor_measure(1, 2, 1.0 / 3.0, 1);  // centered
    CHECK(cc.atoms[0][0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    CHECK(cc.atoms[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("claimed dimension and atom scale") {
    CHECK(cantor_measure(2, 2, 0.25, 8).claimed_alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cantor_measure(3, 2, std::exp2(-1.5), 4).claimed_alpha ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(cantor_measure(1, 2, 1.0 / 3.0, 5).claimed_alpha ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-14));
    CHECK(cantor_measure(1, 2, 0.25, 6).atom_scale == doctest::Approx(std::pow(0.25, 6)));

    // Mixed product: dyadic x dyadic x point has dimension 2.
    const auto plane = product_cantor_measure(
        {AxisRecipe{2, 0.5, 3}, AxisRecipe{2, 0.5, 3}, AxisRecipe{1, 0.5, 0}});
    CHECK(plane.d == 3);
    CHECK(plane.claimed_alpha == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(plane.size() == 64);
}

TEST_CASE("construction rejects bad recipes") {
    CHECK_THROWS_AS(cantor_measure(2, 3, 0.4, 2), precondition_error);  // children overlap
    CHECK_THROWS_AS(cantor_measure(1, 0, 0.3, 2), precondition_error);
    CHECK_THROWS_AS(cantor_measure(1, 2, -0.1, 2), precondition_error);
    CHECK_THROWS_AS(cantor_measure(4, 2, 0.25, 1), precondition_error);
    CHECK_THROWS_AS(cantor_measure(3, 2, 0.25, 7), precondition_error);  // 2^21 atoms
    CHECK_NOTHROW(cantor_measure(1, 2, 0.5, 3));  // touching children allowed
}

TEST_CASE("fourier transform of simple measures") {
    const auto pm = point_mass(2);
    CHECK(fourier(pm, {3.7, -1.2}) == std::complex<double>(1.0, 0.0));

    const auto shifted = point_mass(2, {1.0, 2.0});
    const auto v = fourier(shifted, {0.5, 0.25});
    CHECK(v.real() == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(-std::sin(1.0)).epsilon(1e-14));

    // Two symmetric atoms of mass 1/2 at +-1/3: transform is cos(xi/3).
    const auto two = cantor_measure(1, 2, 1.0 / 3.0, 1);
    for (double xi : {0.0, 1.0, 2.5, -4.0})
        CHECK(fourier(two, {xi}).real() == doctest::Approx(std::cos(xi / 3.0)).epsilon(1e-13));
}

TEST_CASE("product factorization agrees with the direct sum") {
    auto mu = cantor_measure(2, 2, 1.0 / 3.0, 3);
    auto flat = mu;
    flat.factors.clear();  // force the direct path
    for (double x : {0.3, 7.0, -19.5}) {
        for (double y : {0.0, 2.25, 40.0}) {
            const auto a = fourier(mu, {x, y});
            const auto b = fourier(flat, {x, y});
            CHECK(std::abs(a - b) < 1e-12);
        }
    }
}

TEST_CASE("spherical averages of a point mass equal the sphere area") {
    CHECK(spherical_average(point_mass(1), 5.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(spherical_average(point_mass(2), 17.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
    CHECK(spherical_average(point_mass(3), 3.0) == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
}

TEST_CASE("decay fit: point mass has exponent zero") {
    const auto fit = decay_fit(point_mass(2), 1.0, 16.0, 8);
    CHECK(std::abs(fit.fitted_beta) < 1e-6);
    CHECK(fit.residual < 1e-10);
}

TEST_CASE("decay fit: four-corner measure beats the guaranteed rate") {
    // beta_2(1) >= 1/2; the averaged decay of this particular measure is
    // faster off the resonant directions, so the fit lands near 1.
    const auto mu = cantor_measure(2, 2, 0.25, 6);
    const auto fit = decay_fit(mu, 2.0, 64.0, 24);
    CHECK(fit.fitted_beta > 0.5 - 0.15);
    CHECK(fit.fitted_beta < 1.8);
}

TEST_CASE("decay fit: d=3 product measure with dimension 2") {
    const auto mu = cantor_measure(3, 2, std::exp2(-1.5), 5);
    const auto fit = decay_fit(mu, 2.0, 64.0, 24);
    CHECK(fit.fitted_beta > 4.0 / 3.0 - 0.2);
    CHECK(fit.fitted_beta < 3.0);
}

TEST_CASE("decay fit preconditions") {
    const auto mu = cantor_measure(1, 2, 1.0 / 3.0, 4);
    CHECK_THROWS_AS(decay_fit(mu, 1.0, 4.0, 3), precondition_error);
    CHECK_THROWS_AS(decay_fit(mu, 0.5, 8.0, 5), precondition_error);
    // 0.5/atom_scale = 0.5*3^4 = 40.5, so R=64 is out of range.
    CHECK_THROWS_AS(decay_fit(mu, 8.0, 64.0, 5), precondition_error);
    CHECK_NOTHROW(decay_fit(mu, 4.0, 32.0, 5));
}

TEST_CASE("spherical averages are translation invariant") {
    auto mu = cantor_measure(2, 2, 0.25, 4);
    auto shifted = mu;
    for (auto& a : shifted.atoms) {
        a[0] += 0.3;
        a[1] -= 0.7;
    }
    for (auto& f : shifted.factors[0].atoms) f += 0.3;
    for (auto& f : shifted.factors[1].atoms) f -= 0.7;
    for (double R : {3.0, 11.0, 29.0})
        CHECK(spherical_average(mu, R) ==
              doctest::Approx(spherical_average(shifted, R)).epsilon(1e-9));
}

TEST_CASE("energy of a two-atom measure") {
    // Atoms +-1/3 with mass 1/2: energy = 2*(1/4)*(2/3)^(-alpha).
    const auto two = cantor_measure(1, 2, 1.0 / 3.0, 1);
    CHECK(energy(two, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(energy(two, 0.5) == doctest::Approx(0.5 * std::pow(1.5, 0.5)).epsilon(1e-14));
}

TEST_CASE("energy stays bounded below the dimension and grows above it") {
    // Below the dimension the depth-n energies increase toward the finite
    // energy of the limit measure, so the growth ratios shrink toward 1.
    const double e6a = energy(cantor_measure(1, 2, 1.0 / 3.0, 6), 0.5);
    const double e7a = energy(cantor_measure(1, 2, 1.0 / 3.0, 7), 0.5);
    const double e8a = energy(cantor_measure(1, 2, 1.0 / 3.0, 8), 0.5);
    CHECK(e7a / e6a > 1.0);
    CHECK(e8a / e7a > 1.0);
    CHECK(e8a / e7a < e7a / e6a);
    CHECK(e8a / e7a < 1.09);

    // Above dim = log2/log3 the deepest-level pairs dominate: growth factor
    // approaches 3^alpha/2 = 1.34 at alpha = 0.9.
    const double e7b = energy(cantor_measure(1, 2, 1.0 / 3.0, 7), 0.9);
    const double e8b = energy(cantor_measure(1, 2, 1.0 / 3.0, 8), 0.9);
    CHECK(e8b / e7b > 1.1);
    CHECK(e8b / e7b < 1.45);
}

TEST_CASE("mattila integral of a point mass") {
    // Average is exactly the sphere area, so the integrand is polynomial in R
    // and the trapezoid rule is exact for d = 2.
    CHECK(mattila_integral(point_mass(2), 2.0) == doctest::Approx(6.0 * M_PI * M_PI).epsilon(1e-12));
    const double expect3 = 16.0 * M_PI * M_PI * 26.0 / 3.0;
    CHECK(mattila_integral(point_mass(3), 3.0, 4096) == doctest::Approx(expect3).epsilon(1e-6));
    CHECK_THROWS_AS(mattila_integral(point_mass(2), 1.0), precondition_error);
}

TEST_CASE("frostman certificates") {
    // Point mass with alpha = 0: every ball around it has ratio exactly 1.
    const auto pm = frostman_check(point_mass(2), 0.0, 1.001, {1.0, 2.0, 4.0});
    CHECK(pm.pass);
    CHECK(pm.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));

    const double s = std::log(2.0) / std::log(3.0);
    const auto mid = cantor_measure(1, 2, 1.0 / 3.0, 7);
    const auto good = frostman_check(mid, s, 4.0);
    CHECK(good.pass);
    CHECK(good.worst_ratio >= 1.0);  // exact-scale balls achieve ratio 1
    const auto tight = frostman_check(mid, s, 0.9);
    CHECK_FALSE(tight.pass);

    const auto corner = frostman_check(cantor_measure(2, 2, 0.25, 6), 1.0, 4.0);
    CHECK(corner.pass);
    CHECK(corner.evaluations > 100);
}

TEST_CASE("invalid measures are rejected") {
    FractalMeasure bad;
    bad.d = 2;
    bad.atoms = {{0.0, 0.0}};
    bad.masses = {0.5};
    CHECK_THROWS_AS(bad.validate(), precondition_error);
    bad.masses = {1.0};
    CHECK_NOTHROW(bad.validate());
    bad.atoms = {{0.0}};
    CHECK_THROWS_AS(bad.validate(), precondition_error);
}

TEST_SUITE_END();
