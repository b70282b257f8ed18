#pragma once

#include <optional>
#include <vector>

#include "restlab/piecewise.hpp"
#include "restlab/rational.hpp"

// Exact arithmetic for the exponent calculus of weighted Fourier extension
// estimates: spherical-average decay curves beta(alpha), weighted restriction
// exponents gamma(alpha), the multilinear recursion that produces them, and
// the distance-set threshold they imply.  Everything here is big-rational;
// no floating point enters any return value.
namespace restlab::exponents {

// Dimensions are capped so callers cannot push the piecewise machinery into
// absurd ranges by accident; the formulas themselves stay exact at any d.
inline constexpr int kMaxDimension = 64;

// Sum of 1/i for lo <= i <= hi; zero when lo > hi.
Rational harmonic_sum(int lo, int hi);

// Holder exponent p_d = 2d/(d-1) used by the broad-norm estimates.
Rational restriction_p(int d);

// The dimension threshold where the top two pieces of the gamma curve meet:
// 2d(d-2-S)/(2d-3-2S) with S the harmonic sum from 4 to d.  Defined for d>=4.
Rational sharp_threshold(int d);

// Best-known spherical-average decay exponent for alpha-dimensional measures
// in the plane (classical; three pieces on (0,2]).
PiecewiseExponent beta2_curve();
Rational beta2(const Rational& alpha);

// Weighted restriction exponent gamma(alpha) on (0, d], d >= 3: the full
// piecewise curve including the refined top piece above the sharp threshold.
PiecewiseExponent gamma0_curve(int d);
Rational gamma0(int d, const Rational& alpha);

// Broad-norm restriction exponent on (0, d], d >= 4: same curve as gamma0
// except the single law of the (d-1, d] band, before the narrow caps are
// folded back in.
PiecewiseExponent gamma_broad_curve(int d);
Rational gamma_broad(int d, const Rational& alpha);

// Spherical-average decay lower bound on (0, d], d >= 3.  For d = 3 the
// dedicated three-piece curve; for d >= 4 the pointwise max of the decay
// curve induced by gamma0 and the linear refined-Strichartz bound
// alpha - 1 + (d-alpha)/(d+1).
PiecewiseExponent beta_lower_curve(int d);
Rational beta_lower(int d, const Rational& alpha);

// Closed form of the m-linear broad exponent gamma_m(alpha), 3 <= m <= d.
// At m = d this coincides with gamma_broad.
Rational gamma_closed(int d, const Rational& alpha, int m);

// Evaluates the m-linear recursion
//   gamma_m = max( 1/4 - d/(4m),
//                  (1/2 - (d-alpha)/(2m))/m + gamma_{m-1} (1 - 1/m) )
// from the trilinear base
//   gamma_3 = max( 1/4 - d/12, min( alpha/18 - 5d/36 + 1/3,
//                                   alpha/12 - d/6 + 1/3 ) ).
Rational gamma_recursion(int d, const Rational& alpha, int m);

// Same recursion from the bilinear base gamma_2 = 1/4 - d/8, valid on the
// band alpha in [d/2, (d+1)/2].  Closed form: 1/4 - d/(4m) for m < d and
// alpha/(2d^2) - 1/(4d) at m = d.
Rational gamma_recursion_bilinear_base(int d, const Rational& alpha, int m);
Rational gamma_bilinear_closed(int d, const Rational& alpha, int m);

// L^2 weighted estimate exponent at tangency degree m:  1/2 - (d-alpha)/(2(m+1)).
Rational linear_refinement_exponent(int d, int m, const Rational& alpha);
// Bilinear variant: -(2d - 2m - alpha)/(4(m+1)).
Rational bilinear_refinement_exponent(int d, int m, const Rational& alpha);

// Distance-set threshold: 9/5 in dimension 3 and
// d/2 + 1/4 + (d+1)/(4(2d+1)(d-1)) for d >= 4.
Rational falconer_threshold(int d);
// Equivalent single-fraction form d(2d^2-1)/(2(2d+1)(d-1)) of the d >= 4 case.
Rational falconer_threshold_product_form(int d);
// Weaker threshold (d^2+d+1)/(2d+1) obtained from the linear L^2 route alone.
Rational falconer_threshold_linear_route(int d);

// Distance-set scheme test: a weighted estimate with exponents (p, gamma)
// closes the scheme at dimension alpha iff gamma <= alpha (1/p + 1/2) - d/2.
bool mattila_criterion(const Rational& alpha, const Rational& p, const Rational& gamma, int d);

// Exact alpha solving the scheme equality for the pairing the proof uses:
// (p, gamma) = (3, 0) in d = 3 and (2d/(d-1), alpha/(2d^2) - 1/(4d)) for d >= 4.
Rational mattila_threshold_solve(int d);

// Narrow-cap closure test: folding the non-broad caps back in requires
// gamma >= (1-d)/2 + (alpha+1)/p.
bool narrow_closure(const Rational& gamma, int d, const Rational& alpha, const Rational& p);

// Decay exponent implied by a weighted restriction estimate: 2(alpha/p - gamma).
Rational decay_from_restriction(const Rational& alpha, const Rational& p, const Rational& gamma);

// Previously known decay bounds, each absent outside its stated alpha range,
// plus the Tomas-Stein weighted-restriction exponent alpha(d-1)/(2d(d+1)).
struct PriorBounds {
    std::optional<Rational> mattila;      // decay bound on (0, d/2]
    std::optional<Rational> erdogan;      // decay bound on [d/2, d/2 + 2/3 + 1/d]
    std::optional<Rational> luca_rogers;  // decay bound on [d/2 + 2/3 + 1/d, d]
    std::optional<Rational> tomas_stein;  // restriction exponent, all alpha in (0, d]
};
PriorBounds prior_bounds(int d, const Rational& alpha);

// Largest decay-type entry of prior_bounds at this alpha, if any applies.
std::optional<Rational> best_prior_decay(int d, const Rational& alpha);

// One row of the comparison table the CLI emits.
struct BoundComparison {
    Rational alpha;
    Rational beta;
    PriorBounds priors;
    std::optional<Rational> best_prior;
    bool strictly_better = false;
    bool mattila_ok = false;
};
BoundComparison compare_bounds(int d, const Rational& alpha);

// Restriction exponent the distance-set proof pairs with p_d at this alpha:
// gamma0 for d = 3, the band formula alpha/(2d^2) - 1/(4d) read as a curve
// value for d >= 4.  Used for the mattila_ok table column.
Rational falconer_route_gamma(int d, const Rational& alpha);
Rational falconer_route_p(int d);

}  // namespace restlab::exponents
