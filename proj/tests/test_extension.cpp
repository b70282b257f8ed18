#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "doctest.h"
#include "restlab/errors.hpp"
#include "restlab/extension.hpp"
#include "restlab/fractal.hpp"
#include "restlab/rng.hpp"

using namespace restlab;
using cd = std::complex<double>;

namespace {

// Adaptive Simpson for the one-dimensional oracle integrals.
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = f(0.5 * (a + m));
    double rm = f(0.5 * (m + b));
    double left = simpson_step(f, a, m, fa, lm, fm);
    double right = simpson_step(f, m, b, fm, rm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson_step(f, a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

cd oracle_quadratic_phase(double b) {
    double re = integrate([b](double w) { return std::cos(b * w * w); }, -1.0, 1.0, 1e-12);
    double im = integrate([b](double w) { return std::sin(b * w * w); }, -1.0, 1.0, 1e-12);
    return {re, im};
}

}  // namespace

TEST_SUITE("extension") {

TEST_CASE("constant profile integrates to the interval length at the origin") {
    auto f = profile_constant(2, 512);
    auto out = extend(f, {{0.0, 0.0}});
    CHECK(std::abs(out[0] - cd(2.0, 0.0)) < 1e-12);
}

TEST_CASE("value at the origin equals the plain quadrature sum") {
    for (int d : {2, 3}) {
        auto f = profile_random(d, d == 2 ? 256 : 48, 11u);
        cd direct = 0.0;
        for (const auto& v : f.values) direct += v;
        direct *= std::pow(f.h, d - 1);
        std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
        auto out = extend(f, {origin});
        CHECK(std::abs(out[0] - direct) < 1e-12);
    }
}

TEST_CASE("flat density on the segment gives the separated sine kernel") {
    auto f = profile_constant(2, 1 << 18);
    std::vector<std::vector<double>> pts;
    std::vector<double> xs = {0.5, 1.0, 5.0, 10.0, 25.0, 50.0};
    for (double x : xs) pts.push_back({x, 0.0});
    auto out = extend(f, pts);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cd want(2.0 * std::sin(xs[i]) / xs[i], 0.0);
        CHECK(std::abs(out[i] - want) < 1e-8);
    }
}

TEST_CASE("pure quadratic phase matches the adaptive quadrature oracle") {
    auto f = profile_constant(2, 1 << 18);
    std::vector<double> bs = {1.0, 5.0, 20.0, 50.0};
    std::vector<std::vector<double>> pts;
    for (double b : bs) pts.push_back({0.0, b});
    auto out = extend(f, pts);
    for (std::size_t i = 0; i < bs.size(); ++i) {
        cd want = oracle_quadratic_phase(bs[i]);
        CHECK(std::abs(out[i] - want) < 1e-6);
    }
}

TEST_CASE("evaluation is linear in the density") {
    int m = 512;
    auto f = profile_bump(2, m, {0.2}, 0.5);
    auto g = profile_gaussian(2, m, {-0.3}, 0.3);
    cd a(2.0, 0.0), b(0.0, -0.5);
    auto combo = sample_profile(2, m, [&](const std::vector<double>& w) {
        return a * f.form(w) + b * g.form(w);
    });
    std::vector<std::vector<double>> pts = {{3.0, -2.0}, {0.25, 7.0}, {-8.0, 0.1}};
    auto of = extend(f, pts);
    auto og = extend(g, pts);
    auto oc = extend(combo, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::abs(oc[i] - (a * of[i] + b * og[i])) < 1e-9);
}

TEST_CASE("frequency modulation translates the field") {
    int m = 512;
    auto f = profile_bump(2, m, {0.0}, 0.6);
    std::vector<double> v = {3.0};
    auto fm = profile_modulated(f, v);
    std::vector<std::vector<double>> pts = {{1.0, 2.0}, {-4.0, 0.5}, {0.0, -8.0}};
    std::vector<std::vector<double>> shifted;
    for (auto p : pts) {
        p[0] += v[0];
        shifted.push_back(p);
    }
    auto a = extend(fm, pts);
    auto b = extend(f, shifted);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("field values are stable under frequency-grid refinement") {
    std::vector<std::vector<double>> pts = {{4.0, -9.0}, {-10.0, 3.0}, {0.5, 0.5}};
    auto coarse = profile_gaussian(2, 1 << 16, {0.1}, 0.4);
    auto fine = profile_gaussian(2, 1 << 17, {0.1}, 0.4);
    auto a = extend(coarse, pts);
    auto b = extend(fine, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-6 * std::max(1.0, std::abs(b[i])));
}

TEST_CASE("separable plane evaluation matches the direct sum") {
    auto f = profile_random(3, 64, 5u);
    std::vector<double> x1s = {-4.0, -2.0, 0.0, 1.5, 3.0};
    std::vector<double> x2s = {-3.5, -1.0, 0.5, 2.0, 4.0};
    double x3 = 3.5;
    auto plane = extend_plane3(f, x3, x1s, x2s);
    std::vector<std::vector<double>> pts;
    for (double x1 : x1s)
        for (double x2 : x2s) pts.push_back({x1, x2, x3});
    auto direct = extend(f, pts);
    REQUIRE(plane.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i)
        CHECK(std::abs(plane[i] - direct[i]) < 1e-8);
}

TEST_CASE("coarse frequency grids at distant points are rejected") {
    auto f = profile_constant(2, 64);  // h = 1/32
    CHECK_THROWS_AS((void)extend(f, {{20.0, 0.0}}), precondition_error);
    auto g = profile_constant(3, 32);
    CHECK_THROWS_AS((void)extend_plane3(g, 30.0, {0.0}, {0.0}), precondition_error);
}

TEST_CASE("ball fields carry the lattice and match pointwise evaluation") {
    auto f = profile_bump(2, 64, {0.0}, 0.7);
    auto field = field_on_ball(f, 4.0, 0.5);
    std::size_t expect = 0;
    for (int i = -8; i <= 8; ++i)
        for (int j = -8; j <= 8; ++j)
            if (0.25 * (i * i + j * j) <= 16.0 + 1e-12) ++expect;
    CHECK(field.points.size() == expect);
    CHECK(field.spacing == 0.5);
    for (const auto& p : field.points)
        CHECK(p[0] * p[0] + p[1] * p[1] <= 16.0 + 1e-9);
    std::vector<std::vector<double>> probe(field.points.begin(), field.points.begin() + 5);
    auto direct = extend(f, probe);
    for (std::size_t i = 0; i < probe.size(); ++i)
        CHECK(std::abs(field.values[i] - direct[i]) < 1e-12);
}

TEST_CASE("ball fields can be restricted to the support of a weight") {
    auto f = profile_bump(2, 64, {0.0}, 0.7);
    GridBox grid = make_grid(2, {-5.0, -5.0}, {5.0, 5.0}, 0.5);
    std::vector<double> vals(grid.cells(), 0.0);
    for (std::size_t c = 0; c < grid.cells(); ++c)
        if (grid.center(c)[0] > 0.0) vals[c] = 1.0;
    SampledWeight H(grid, vals, 2.0);
    auto field = field_on_ball(f, 4.0, 0.5, &H);
    auto full = field_on_ball(f, 4.0, 0.5);
    CHECK(field.points.size() < full.points.size());
    CHECK(!field.points.empty());
    for (const auto& p : field.points) CHECK(p[0] >= -1e-12);
}

TEST_CASE("unit weights reproduce the unweighted norm") {
    auto f = profile_bump(2, 64, {0.0}, 0.7);
    auto field = field_on_ball(f, 4.0, 0.5);
    auto H = SampledWeight::uniform(2, 6.0, 0.5);
    double a = weighted_norm(field, H, 2.0);
    double b = unweighted_norm(field, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    auto H0 = SampledWeight::uniform(2, 6.0, 0.5, 0.0);
    CHECK(weighted_norm(field, H0, 2.0) == 0.0);
    auto Hcoarse = SampledWeight::uniform(2, 6.0, 1.0);
    CHECK_THROWS_AS((void)weighted_norm(field, Hcoarse, 2.0), precondition_error);
    CHECK_THROWS_AS((void)weighted_norm(field, H, 0.5), precondition_error);
}

TEST_CASE("weighted norms are stable under field-grid refinement") {
    auto mu = cantor_measure(2, 2, 0.25, 6);
    auto H = weight_from_measure(mu, 32.0, BumpSpec{1.0}, 0.25);
    auto f = profile_cap(2, 256, {0.2}, 0.3);
    auto coarse = field_on_ball(f, 32.0, 0.5, &H);
    auto fine = field_on_ball(f, 32.0, 0.25, &H);
    double a = weighted_norm(coarse, H, 3.0);
    double b = weighted_norm(fine, H, 3.0);
    REQUIRE(b > 0.0);
    CHECK(std::abs(a - b) / b < 0.02);
}

TEST_CASE("circle densities reproduce the Bessel kernel") {
    int n = spherical_node_count(10.0, 2.0);
    auto g = sample_sphere_profile(2, n, [](const std::vector<double>&) { return cd(1.0, 0.0); });
    std::vector<std::vector<double>> pts = {{0.5, 0.0}, {1.2, 1.6}, {-6.0, 8.0}};
    auto out = extend_sphere(g, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = std::hypot(pts[i][0], pts[i][1]);
        double want = 2.0 * M_PI * std::cyl_bessel_j(0.0, r);
        CHECK(std::abs(out[i] - cd(want, 0.0)) < 1e-10);
    }
}

TEST_CASE("sphere densities reproduce the sine kernel") {
    auto g = sample_sphere_profile(3, 2000, [](const std::vector<double>&) { return cd(1.0, 0.0); });
    std::vector<std::vector<double>> pts = {{0.5, 0.0, 0.0}, {0.0, 1.5, 1.0}, {3.0, 0.0, 4.0}};
    auto out = extend_sphere(g, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = std::sqrt(pts[i][0] * pts[i][0] + pts[i][1] * pts[i][1] + pts[i][2] * pts[i][2]);
        double want = 4.0 * M_PI * std::sin(r) / r;
        CHECK(std::abs(out[i] - cd(want, 0.0)) < 0.02 * std::abs(want));
    }
}

TEST_CASE("sphere evaluation demands the node count for the point radius") {
    auto g = sample_sphere_profile(2, 64, [](const std::vector<double>&) { return cd(1.0, 0.0); });
    CHECK_THROWS_AS((void)extend_sphere(g, {{20.0, 0.0}}), precondition_error);
}

TEST_CASE("parabolic change of variables round-trips") {
    ParabolicMap T{{0.3, -0.2}, 4.0};
    std::vector<double> x = {1.7, -2.9, 0.6};
    auto y = T.apply(x);
    auto back = T.inverse(y);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    ParabolicMap S{{0.0}, 2.0};
    auto z = S.apply({3.0, 5.0});
    CHECK(z[0] == doctest::Approx(1.5));
    CHECK(z[1] == doctest::Approx(1.25));
    CHECK(S.amplitude() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("zooming a cap preserves field magnitudes and mass") {
    int m = 1 << 14;
    for (double K : {2.0, 4.0}) {
        auto f = profile_bump(2, m, {0.1}, 0.8 / K);
        double l2f = profile_l2(f);
        auto rp = parabolic_rescale(f, {0.1}, K);
        CHECK(std::abs(profile_l2(rp.g) - l2f) < 1e-8);
        SplitMix64 rng(7u);
        double peak = 0.0;
        for (const auto& v : f.values) peak += std::abs(v);
        peak *= f.h;
        std::vector<std::vector<double>> xs, ys;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x = {16.0 * rng.next_symmetric(), 16.0 * rng.next_symmetric()};
            xs.push_back(x);
            ys.push_back(rp.map.apply(x));
        }
        auto ef = extend(f, xs);
        auto eg = extend(rp.g, ys);
        for (int i = 0; i < 100; ++i)
            CHECK(std::abs(std::abs(ef[i]) - rp.map.amplitude() * std::abs(eg[i])) <
                  1e-6 * peak);
    }
}

TEST_CASE("zooming rejects densities that spill out of the cap") {
    auto f = profile_constant(2, 512);
    CHECK_THROWS_AS((void)parabolic_rescale(f, {0.0}, 2.0), precondition_error);
}

TEST_CASE("square-integrable growth over balls has the classical slope") {
    // Local slopes settle by R = 16; the 8 -> 16 step still carries the
    // band-limited transient, so the fit window starts at 16.
    auto f_for_R = [](double R) { return profile_random(2, static_cast<int>(8 * R), 99u); };
    auto H_for_R = [](double R) { return SampledWeight::uniform(2, R, 0.5); };
    std::vector<double> Rs = {16.0, 32.0, 64.0, 128.0};
    auto res = scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), Rs);
    CHECK(res.exponent == doctest::Approx(0.5));
    CHECK(res.pass);
    CHECK(res.slope <= 0.6);
    CHECK(res.slope > 0.3);
}

TEST_CASE("the fitted slope is stable under x-grid refinement") {
    auto f_for_R = [](double R) { return profile_random(2, static_cast<int>(8 * R), 99u); };
    auto H_for_R = [](double R) { return SampledWeight::uniform(2, R, 0.25); };
    std::vector<double> Rs = {8.0, 16.0, 32.0, 64.0};
    auto coarse = scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), Rs, 0.5);
    auto fine = scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), Rs, 0.25);
    CHECK(std::abs(coarse.slope - fine.slope) < 0.02);
}

TEST_CASE("the growth slope does not move when the cap translates") {
    std::vector<double> Rs = {8.0, 16.0, 32.0, 64.0};
    auto H_for_R = [](double R) { return SampledWeight::uniform(2, R, 0.5); };
    auto run = [&](double c) {
        auto f_for_R = [c](double R) {
            return profile_cap(2, static_cast<int>(8 * R), {c}, 0.2);
        };
        return scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), Rs);
    };
    auto a = run(0.1);
    auto b = run(-0.3);
    CHECK(std::abs(a.slope - b.slope) < 0.05);
}

TEST_CASE("growth experiments validate their inputs") {
    auto f_for_R = [](double) { return profile_random(2, 256, 1u); };
    auto H_for_R = [](double R) { return SampledWeight::uniform(2, R, 0.5); };
    CHECK_THROWS_AS((void)scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), {8.0, 16.0, 32.0}),
                    precondition_error);
    CHECK_THROWS_AS(
        (void)scaling_experiment(f_for_R, H_for_R, 2.0, Rational(2), {8.0, 16.0, 24.0, 32.0}),
        precondition_error);
    CHECK_THROWS_AS(
        (void)scaling_experiment(f_for_R, H_for_R, 4.0, Rational(2), {8.0, 16.0, 32.0, 64.0}),
        precondition_error);
}

}
