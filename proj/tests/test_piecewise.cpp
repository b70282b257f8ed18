#include "doctest.h"
#include "restlab/piecewise.hpp"

using restlab::AffineMap;
using restlab::Piece;
using restlab::PiecewiseExponent;
using restlab::Rational;

namespace {

PiecewiseExponent two_piece() {
    std::vector<Piece> ps;
    ps.push_back({Rational(0), Rational(2), {Rational(2, 3), Rational(0)}});
    ps.push_back({Rational(2), Rational(3), {Rational(0), Rational(4, 3)}});
    return PiecewiseExponent(3, std::move(ps));
}

}  // namespace

TEST_SUITE_BEGIN("piecewise");

TEST_CASE("half-open evaluation: breakpoints belong to the left piece") {
    auto c = two_piece();
    CHECK(c.eval(Rational(2)) == Rational(4, 3));          // from 2a/3
    CHECK(c.eval(Rational(5, 2)) == Rational(4, 3));       // from the flat piece
    CHECK(c.eval(Rational(3)) == Rational(4, 3));
    CHECK(c.eval(Rational(1, 100)) == Rational(1, 150));
    CHECK_THROWS_AS(c.eval(Rational(0)), restlab::precondition_error);   // lo excluded
    CHECK_THROWS_AS(c.eval(Rational(4)), restlab::precondition_error);
    CHECK_THROWS_AS(c.eval(Rational(-1)), restlab::precondition_error);
}

TEST_CASE("validation rejects bad piece lists") {
    std::vector<Piece> gap;
    gap.push_back({Rational(0), Rational(1), {Rational(1), Rational(0)}});
    gap.push_back({Rational(2), Rational(3), {Rational(1), Rational(0)}});
    CHECK_THROWS_AS(PiecewiseExponent(3, gap), restlab::precondition_error);

    std::vector<Piece> empty_interval;
    empty_interval.push_back({Rational(1), Rational(1), {Rational(0), Rational(0)}});
    CHECK_THROWS_AS(PiecewiseExponent(3, empty_interval), restlab::precondition_error);

    CHECK_THROWS_AS(PiecewiseExponent(3, {}), restlab::precondition_error);
    std::vector<Piece> fine;
    fine.push_back({Rational(0), Rational(1), {Rational(0), Rational(0)}});
    CHECK_THROWS_AS(PiecewiseExponent(1, fine), restlab::precondition_error);
}

TEST_CASE("continuity detection is exact") {
    CHECK(two_piece().continuous());
    std::vector<Piece> jump;
    jump.push_back({Rational(0), Rational(1), {Rational(0), Rational(0)}});
    jump.push_back({Rational(1), Rational(2), {Rational(0), Rational(1, 1000000)}});
    CHECK_FALSE(PiecewiseExponent(3, jump).continuous());
}

TEST_CASE("breakpoints lists interior junctions") {
    auto bps = two_piece().breakpoints();
    REQUIRE(bps.size() == 1);
    CHECK(bps[0] == Rational(2));
}

TEST_CASE("piecewise_max splits at interior crossings with exact roots") {
    // f(a) = a on (0,2]; g(a) = 3/2 - a/2: cross at a = 1.
    std::vector<Piece> f{{Rational(0), Rational(2), {Rational(1), Rational(0)}}};
    std::vector<Piece> g{{Rational(0), Rational(2), {Rational(-1, 2), Rational(3, 2)}}};
    auto m = piecewise_max(PiecewiseExponent(3, f), PiecewiseExponent(3, g));
    REQUIRE(m.pieces().size() == 2);
    CHECK(m.pieces()[0].hi == Rational(1));
    CHECK(m.eval(Rational(1, 2)) == Rational(5, 4));   // g wins on the left
    CHECK(m.eval(Rational(3, 2)) == Rational(3, 2));   // f wins on the right
    CHECK(m.continuous());
}

TEST_CASE("piecewise_max merges pieces when one curve dominates") {
    std::vector<Piece> f{{Rational(0), Rational(2), {Rational(1), Rational(0)}}};
    std::vector<Piece> g{{Rational(0), Rational(1), {Rational(0), Rational(-1)}},
                         {Rational(1), Rational(2), {Rational(0), Rational(-2)}}};
    auto m = piecewise_max(PiecewiseExponent(3, f), PiecewiseExponent(3, g));
    CHECK(m.pieces().size() == 1);
    CHECK(m.eval(Rational(2)) == Rational(2));
}

TEST_CASE("decay transform maps gamma curves to beta curves piece by piece") {
    // gamma(a) = a/3 - 2/3 on (0,3], p = 3: beta = 2(a/3 - gamma) = 4/3.
    std::vector<Piece> g{{Rational(0), Rational(3), {Rational(1, 3), Rational(-2, 3)}}};
    auto beta = curve_decay_from_restriction(PiecewiseExponent(3, g), Rational(3));
    CHECK(beta.eval(Rational(1)) == Rational(4, 3));
    CHECK(beta.eval(Rational(3)) == Rational(4, 3));
    CHECK_THROWS_AS(curve_decay_from_restriction(PiecewiseExponent(3, g), Rational(0)),
                    restlab::precondition_error);
}

TEST_SUITE_END();
