#pragma once

#include <string>
#include <vector>

#include "restlab/rational.hpp"

namespace restlab {

// Exact affine law alpha -> slope*alpha + intercept.
struct AffineMap {
    Rational slope;
    Rational intercept;

    Rational operator()(const Rational& alpha) const {
        return slope * alpha + intercept;
    }
    friend bool operator==(const AffineMap& a, const AffineMap& b) {
        return a.slope == b.slope && a.intercept == b.intercept;
    }
};

// One piece of a curve: the half-open interval (lo, hi] and its affine law.
struct Piece {
    Rational lo;
    Rational hi;
    AffineMap map;
};

// Piecewise-affine exponent curve over a half-open domain (lo, hi].
// Pieces are sorted and contiguous; evaluation at an interior junction uses
// the piece that ends there, so every breakpoint belongs to the piece on its
// left.  All arithmetic is exact.
class PiecewiseExponent {
  public:
    PiecewiseExponent(int dimension, std::vector<Piece> pieces);

    int dimension() const { return dimension_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const Rational& domain_lo() const { return pieces_.front().lo; }
    const Rational& domain_hi() const { return pieces_.back().hi; }

    bool contains(const Rational& alpha) const {
        return domain_lo() < alpha && alpha <= domain_hi();
    }

    // Throws precondition_error when alpha is outside (lo, hi].
    Rational eval(const Rational& alpha) const;

    // Interior junction abscissae, in increasing order.
    std::vector<Rational> breakpoints() const;

    // Exact one-sided-limit agreement at every interior junction.
    bool continuous() const;

  private:
    int dimension_;
    std::vector<Piece> pieces_;
};

// Pointwise max of two curves over the same domain.  Crossings interior to a
// piece become new exact breakpoints; adjacent pieces with equal laws are
// merged back together.
PiecewiseExponent piecewise_max(const PiecewiseExponent& a, const PiecewiseExponent& b);

// Transforms a restriction-exponent curve gamma(alpha) into the decay curve
// 2*(alpha/p - gamma(alpha)), piece by piece.
PiecewiseExponent curve_decay_from_restriction(const PiecewiseExponent& gamma, const Rational& p);

}  // namespace restlab
