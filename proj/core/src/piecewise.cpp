#include "restlab/piecewise.hpp"

#include <algorithm>

namespace restlab {

PiecewiseExponent::PiecewiseExponent(int dimension, std::vector<Piece> pieces)
    : dimension_(dimension), pieces_(std::move(pieces)) {
    if (dimension_ < 2)
        throw precondition_error("PiecewiseExponent: dimension must be >= 2");
    if (pieces_.empty())
        throw precondition_error("PiecewiseExponent: no pieces");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (!(pieces_[i].lo < pieces_[i].hi))
            throw precondition_error("PiecewiseExponent: empty piece interval");
        if (i + 1 < pieces_.size() && pieces_[i].hi != pieces_[i + 1].lo)
            throw precondition_error("PiecewiseExponent: pieces not contiguous");
    }
}

Rational PiecewiseExponent::eval(const Rational& alpha) const {
    if (!contains(alpha))
        throw precondition_error("PiecewiseExponent: alpha " + alpha.str() +
                                 " outside domain (" + domain_lo().str() + ", " +
                                 domain_hi().str() + "]");
    for (const Piece& p : pieces_)
        if (p.lo < alpha && alpha <= p.hi) return p.map(alpha);
    throw precondition_error("PiecewiseExponent: no covering piece");  // unreachable
}

std::vector<Rational> PiecewiseExponent::breakpoints() const {
    std::vector<Rational> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) out.push_back(pieces_[i].hi);
    return out;
}

bool PiecewiseExponent::continuous() const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        const Rational& x = pieces_[i].hi;
        if (pieces_[i].map(x) != pieces_[i + 1].map(x)) return false;
    }
    return true;
}

namespace {

// Merges adjacent pieces that share the same affine law.
std::vector<Piece> coalesce(std::vector<Piece> pieces) {
    std::vector<Piece> out;
    for (Piece& p : pieces) {
        if (!out.empty() && out.back().map == p.map && out.back().hi == p.lo)
            out.back().hi = p.hi;
        else
            out.push_back(p);
    }
    return out;
}

}  // namespace

PiecewiseExponent piecewise_max(const PiecewiseExponent& a, const PiecewiseExponent& b) {
    if (a.domain_lo() != b.domain_lo() || a.domain_hi() != b.domain_hi())
        throw precondition_error("piecewise_max: domains differ");
    if (a.dimension() != b.dimension())
        throw precondition_error("piecewise_max: dimensions differ");

    std::vector<Rational> cuts;
    cuts.push_back(a.domain_lo());
    for (const Piece& p : a.pieces()) cuts.push_back(p.hi);
    for (const Piece& p : b.pieces()) cuts.push_back(p.hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto law_on = [](const PiecewiseExponent& c, const Rational& lo, const Rational& hi) {
        for (const Piece& p : c.pieces())
            if (p.lo <= lo && hi <= p.hi) return p.map;
        throw precondition_error("piecewise_max: interval straddles pieces");  // unreachable
    };

    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Rational& lo = cuts[i];
        const Rational& hi = cuts[i + 1];
        AffineMap f = law_on(a, lo, hi);
        AffineMap g = law_on(b, lo, hi);
        Rational flo = f(lo), fhi = f(hi), glo = g(lo), ghi = g(hi);
        if (flo >= glo && fhi >= ghi) {
            out.push_back({lo, hi, f});
        } else if (glo >= flo && ghi >= fhi) {
            out.push_back({lo, hi, g});
        } else {
            // One strict crossing inside; the affine difference has a rational root.
            Rational x = (g.intercept - f.intercept) / (f.slope - g.slope);
            const AffineMap& left = (flo > glo) ? f : g;
            const AffineMap& right = (flo > glo) ? g : f;
            out.push_back({lo, x, left});
            out.push_back({x, hi, right});
        }
    }
    return PiecewiseExponent(a.dimension(), coalesce(std::move(out)));
}

PiecewiseExponent curve_decay_from_restriction(const PiecewiseExponent& gamma,
                                               const Rational& p) {
    if (!(Rational(0) < p))
        throw precondition_error("curve_decay_from_restriction: p must be positive");
    std::vector<Piece> out;
    for (const Piece& q : gamma.pieces()) {
        AffineMap m{Rational(2) / p - Rational(2) * q.map.slope,
                    Rational(-2) * q.map.intercept};
        out.push_back({q.lo, q.hi, m});
    }
    return PiecewiseExponent(gamma.dimension(), coalesce(std::move(out)));
}

}  // namespace restlab
