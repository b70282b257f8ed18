#include "restlab/exponents.hpp"

#include <string>

namespace restlab::exponents {

namespace {

Rational R(long long n, long long d = 1) { return Rational(n, d); }

void require_dimension(int d, int lo, const char* who) {
    if (d < lo || d > kMaxDimension)
        throw precondition_error(std::string(who) + ": dimension d = " + std::to_string(d) +
                                 " outside [" + std::to_string(lo) + ", " +
                                 std::to_string(kMaxDimension) + "]");
}

void require_alpha(const Rational& alpha, int d, const char* who) {
    if (!(Rational(0) < alpha) || !(alpha <= Rational(d)))
        throw precondition_error(std::string(who) + ": alpha = " + alpha.str() +
                                 " outside (0, " + std::to_string(d) + "]");
}

}  // namespace

Rational harmonic_sum(int lo, int hi) {
    if (lo < 1)
        throw precondition_error("harmonic_sum: lower index must be >= 1");
    if (hi > kMaxDimension)
        throw precondition_error("harmonic_sum: upper index exceeds dimension cap");
    Rational s(0);
    for (int i = lo; i <= hi; ++i) s += R(1, i);
    return s;
}

Rational restriction_p(int d) {
    require_dimension(d, 2, "restriction_p");
    return R(2 * d, d - 1);
}

Rational sharp_threshold(int d) {
    require_dimension(d, 4, "sharp_threshold");
    Rational s = harmonic_sum(4, d);
    Rational num = Rational(2 * d) * (Rational(d - 2) - s);
    Rational den = Rational(2 * d - 3) - Rational(2) * s;
    return num / den;
}

PiecewiseExponent beta2_curve() {
    std::vector<Piece> ps;
    ps.push_back({R(0), R(1, 2), {R(1), R(0)}});
    ps.push_back({R(1, 2), R(1), {R(0), R(1, 2)}});
    ps.push_back({R(1), R(2), {R(1, 2), R(0)}});
    return PiecewiseExponent(2, std::move(ps));
}

Rational beta2(const Rational& alpha) { return beta2_curve().eval(alpha); }

PiecewiseExponent gamma0_curve(int d) {
    require_dimension(d, 3, "gamma0_curve");
    std::vector<Piece> ps;
    if (d == 3) {
        ps.push_back({R(0), R(2), {R(0), R(0)}});
        ps.push_back({R(2), R(3), {R(1, 3), R(-2, 3)}});
        return PiecewiseExponent(3, std::move(ps));
    }
    const Rational s4 = harmonic_sum(4, d);
    ps.push_back({R(0), R(d, 2), {R(0), R(0)}});
    for (int l = d; l >= 5; --l) {
        Rational sl = harmonic_sum(l, d);
        Rational lo = Rational(d) - R(l, 2);
        Rational hi = lo + R(1, 2);
        AffineMap m{sl / R(2 * d), R(1, 4) - R(l - 1, 4 * d) - sl / R(2)};
        ps.push_back({lo, hi, m});
    }
    ps.push_back({R(d - 2), R(d - 1),
                  {s4 / R(2 * d), R(1, 4) - R(3, 4 * d) - s4 / R(2)}});
    const Rational hash = sharp_threshold(d);
    AffineMap band{(Rational(1) + Rational(2) * s4) / R(4 * d), R(-1, 2 * d) - s4 / R(2)};
    ps.push_back({R(d - 1), hash, band});
    ps.push_back({hash, R(d),
                  {R(d - 1, 2 * d), Rational(d - 1) * Rational(1 - d) / R(2 * d)}});
    return PiecewiseExponent(d, std::move(ps));
}

Rational gamma0(int d, const Rational& alpha) {
    require_alpha(alpha, d, "gamma0");
    return gamma0_curve(d).eval(alpha);
}

PiecewiseExponent gamma_broad_curve(int d) {
    require_dimension(d, 4, "gamma_broad_curve");
    const Rational s4 = harmonic_sum(4, d);
    std::vector<Piece> ps;
    ps.push_back({R(0), R(d, 2), {R(0), R(0)}});
    for (int l = d; l >= 5; --l) {
        Rational sl = harmonic_sum(l, d);
        Rational lo = Rational(d) - R(l, 2);
        AffineMap m{sl / R(2 * d), R(1, 4) - R(l - 1, 4 * d) - sl / R(2)};
        ps.push_back({lo, lo + R(1, 2), m});
    }
    ps.push_back({R(d - 2), R(d - 1),
                  {s4 / R(2 * d), R(1, 4) - R(3, 4 * d) - s4 / R(2)}});
    ps.push_back({R(d - 1), R(d),
                  {(Rational(1) + Rational(2) * s4) / R(4 * d), R(-1, 2 * d) - s4 / R(2)}});
    return PiecewiseExponent(d, std::move(ps));
}

Rational gamma_broad(int d, const Rational& alpha) {
    require_alpha(alpha, d, "gamma_broad");
    return gamma_broad_curve(d).eval(alpha);
}

PiecewiseExponent beta_lower_curve(int d) {
    require_dimension(d, 3, "beta_lower_curve");
    if (d == 3) {
        std::vector<Piece> ps;
        ps.push_back({R(0), R(2), {R(2, 3), R(0)}});
        ps.push_back({R(2), R(19, 9), {R(0), R(4, 3)}});
        ps.push_back({R(19, 9), R(3), {R(3, 4), R(-1, 4)}});
        return PiecewiseExponent(3, std::move(ps));
    }
    PiecewiseExponent induced = curve_decay_from_restriction(gamma0_curve(d), restriction_p(d));
    std::vector<Piece> lin;
    lin.push_back({R(0), R(d), {R(d, d + 1), R(-1, d + 1)}});
    return piecewise_max(induced, PiecewiseExponent(d, std::move(lin)));
}

Rational beta_lower(int d, const Rational& alpha) {
    require_alpha(alpha, d, "beta_lower");
    return beta_lower_curve(d).eval(alpha);
}

Rational gamma_closed(int d, const Rational& alpha, int m) {
    require_dimension(d, 3, "gamma_closed");
    require_alpha(alpha, d, "gamma_closed");
    if (m < 3 || m > d)
        throw precondition_error("gamma_closed: m = " + std::to_string(m) +
                                 " outside [3, d]");
    const Rational D(d);
    if (alpha <= D / R(2)) return R(1, 4) - R(d, 4 * m);
    if (Rational(d - 1) < alpha) {
        if (m == 3) return alpha / R(12) - D / R(6) + R(1, 3);
        Rational s = harmonic_sum(4, m);
        return (Rational(1) + Rational(2) * s) * alpha / R(4 * m) + R(m - 1, 2 * m) -
               (Rational(1) + s) * D / R(2 * m);
    }
    if (Rational(d - 2) < alpha) {
        if (m == 3) return R(1, 4) - D / R(12);
        Rational s = harmonic_sum(4, m);
        return s * alpha / R(2 * m) + R(2 * m - 3, 4 * m) -
               (Rational(1) + Rational(2) * s) * D / R(4 * m);
    }
    // alpha in (d - l/2, d - l/2 + 1/2] for some 5 <= l <= d.
    BigInt lfloor = rational_floor(Rational(2) * (D - alpha));
    int l = lfloor.convert_to<int>() + 1;
    if (l < 5 || l > d)
        throw precondition_error("gamma_closed: no band for alpha = " + alpha.str());
    if (m <= l - 1) return R(1, 4) - D / R(4 * m);
    Rational s = harmonic_sum(l, m);
    return s * alpha / R(2 * m) + R(2 * m - l + 1, 4 * m) -
           (Rational(1) + Rational(2) * s) * D / R(4 * m);
}

namespace {

Rational trilinear_base(int d, const Rational& alpha) {
    const Rational D(d);
    Rational a = R(1, 4) - D / R(12);
    Rational b = restlab::min(alpha / R(18) - Rational(5) * D / R(36) + R(1, 3),
                              alpha / R(12) - D / R(6) + R(1, 3));
    return restlab::max(a, b);
}

Rational recursion_step(int d, const Rational& alpha, int m, const Rational& prev) {
    Rational transverse = R(1, 4) - R(d, 4 * m);
    Rational tangent =
        (R(1, 2) - (Rational(d) - alpha) / R(2 * m)) / Rational(m) +
        prev * R(m - 1, m);
    return restlab::max(transverse, tangent);
}

}  // namespace

Rational gamma_recursion(int d, const Rational& alpha, int m) {
    require_dimension(d, 3, "gamma_recursion");
    require_alpha(alpha, d, "gamma_recursion");
    if (m < 3 || m > d)
        throw precondition_error("gamma_recursion: m = " + std::to_string(m) +
                                 " outside [3, d]");
    Rational g = trilinear_base(d, alpha);
    for (int k = 4; k <= m; ++k) g = recursion_step(d, alpha, k, g);
    return g;
}

Rational gamma_recursion_bilinear_base(int d, const Rational& alpha, int m) {
    require_dimension(d, 3, "gamma_recursion_bilinear_base");
    if (m < 2 || m > d)
        throw precondition_error("gamma_recursion_bilinear_base: m = " + std::to_string(m) +
                                 " outside [2, d]");
    if (alpha < Rational(d) / R(2) || alpha > Rational(d + 1) / R(2))
        throw precondition_error(
            "gamma_recursion_bilinear_base: alpha = " + alpha.str() +
            " outside [d/2, (d+1)/2]");
    Rational g = R(1, 4) - R(d, 8);
    for (int k = 3; k <= m; ++k) g = recursion_step(d, alpha, k, g);
    return g;
}

Rational gamma_bilinear_closed(int d, const Rational& alpha, int m) {
    require_dimension(d, 3, "gamma_bilinear_closed");
    if (m < 2 || m > d)
        throw precondition_error("gamma_bilinear_closed: m outside [2, d]");
    if (m < d) return R(1, 4) - R(d, 4 * m);
    return alpha / R(2 * d * d) - R(1, 4 * d);
}

Rational linear_refinement_exponent(int d, int m, const Rational& alpha) {
    require_dimension(d, 2, "linear_refinement_exponent");
    if (m < 1 || m > d)
        throw precondition_error("linear_refinement_exponent: m outside [1, d]");
    return R(1, 2) - (Rational(d) - alpha) / R(2 * (m + 1));
}

Rational bilinear_refinement_exponent(int d, int m, const Rational& alpha) {
    require_dimension(d, 2, "bilinear_refinement_exponent");
    if (m < 1 || m > d)
        throw precondition_error("bilinear_refinement_exponent: m outside [1, d]");
    return -(Rational(2 * d - 2 * m) - alpha) / R(4 * (m + 1));
}

Rational falconer_threshold(int d) {
    require_dimension(d, 3, "falconer_threshold");
    if (d == 3) return R(9, 5);
    return R(d, 2) + R(1, 4) + R(d + 1) / R(4 * (2 * d + 1) * (d - 1));
}

Rational falconer_threshold_product_form(int d) {
    require_dimension(d, 4, "falconer_threshold_product_form");
    return Rational(d) * Rational(2 * d * d - 1) / R(2 * (2 * d + 1) * (d - 1));
}

Rational falconer_threshold_linear_route(int d) {
    require_dimension(d, 3, "falconer_threshold_linear_route");
    return Rational(d * d + d + 1) / R(2 * d + 1);
}

bool mattila_criterion(const Rational& alpha, const Rational& p, const Rational& gamma, int d) {
    require_dimension(d, 2, "mattila_criterion");
    if (!(Rational(0) < p)) throw precondition_error("mattila_criterion: p must be positive");
    return gamma <= alpha * (Rational(1) / p + R(1, 2)) - R(d, 2);
}

Rational falconer_route_p(int d) {
    require_dimension(d, 3, "falconer_route_p");
    return d == 3 ? Rational(3) : restriction_p(d);
}

Rational falconer_route_gamma(int d, const Rational& alpha) {
    require_dimension(d, 3, "falconer_route_gamma");
    require_alpha(alpha, d, "falconer_route_gamma");
    if (d == 3) return gamma0(3, alpha);
    return alpha / R(2 * d * d) - R(1, 4 * d);
}

Rational mattila_threshold_solve(int d) {
    require_dimension(d, 3, "mattila_threshold_solve");
    // Both sides of the scheme inequality are affine in alpha; intersect them.
    Rational p = falconer_route_p(d);
    Rational lhs_slope = Rational(1) / p + R(1, 2);
    Rational lhs_icept = R(-d, 2);
    Rational g_slope = (d == 3) ? R(0) : Rational(1) / R(2 * d * d);
    Rational g_icept = (d == 3) ? R(0) : R(-1, 4 * d);
    return (g_icept - lhs_icept) / (lhs_slope - g_slope);
}

bool narrow_closure(const Rational& gamma, int d, const Rational& alpha, const Rational& p) {
    require_dimension(d, 2, "narrow_closure");
    if (!(Rational(0) < p)) throw precondition_error("narrow_closure: p must be positive");
    return gamma >= Rational(1 - d) / R(2) + (alpha + Rational(1)) / p;
}

Rational decay_from_restriction(const Rational& alpha, const Rational& p, const Rational& gamma) {
    if (!(Rational(0) < p))
        throw precondition_error("decay_from_restriction: p must be positive");
    return Rational(2) * (alpha / p - gamma);
}

PriorBounds prior_bounds(int d, const Rational& alpha) {
    require_dimension(d, 3, "prior_bounds");
    require_alpha(alpha, d, "prior_bounds");
    PriorBounds out;
    const Rational D(d);
    const Rational half_dm1 = Rational(d - 1) / R(2);
    if (alpha <= half_dm1)
        out.mattila = alpha;
    else if (alpha <= D / R(2))
        out.mattila = half_dm1;
    const Rational erd_hi = D / R(2) + R(2, 3) + R(1, d);
    if (D / R(2) <= alpha && alpha <= erd_hi)
        out.erdogan = alpha - Rational(1) + (D + Rational(2) - Rational(2) * alpha) / R(4);
    if (erd_hi <= alpha) {
        Rational gap = D - alpha;
        out.luca_rogers =
            alpha - Rational(1) + gap * gap / (Rational(d - 1) * (Rational(2 * d - 1) - alpha));
    }
    out.tomas_stein = alpha * Rational(d - 1) / R(2 * d * (d + 1));
    return out;
}

std::optional<Rational> best_prior_decay(int d, const Rational& alpha) {
    PriorBounds pb = prior_bounds(d, alpha);
    std::optional<Rational> best;
    for (const auto& entry : {pb.mattila, pb.erdogan, pb.luca_rogers})
        if (entry && (!best || *entry > *best)) best = entry;
    return best;
}

BoundComparison compare_bounds(int d, const Rational& alpha) {
    BoundComparison row;
    row.alpha = alpha;
    row.beta = beta_lower(d, alpha);
    row.priors = prior_bounds(d, alpha);
    row.best_prior = best_prior_decay(d, alpha);
    row.strictly_better = row.best_prior && row.beta > *row.best_prior;
    row.mattila_ok =
        mattila_criterion(alpha, falconer_route_p(d), falconer_route_gamma(d, alpha), d);
    return row;
}

}  // namespace restlab::exponents
