#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include "restlab/errors.hpp"

namespace restlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Exact rational scalar.  Invariants: stored in lowest terms, denominator
// positive.  Backed by arbitrary-precision integers so harmonic sums and
// threshold formulas stay exact up to dimension 64 and beyond.
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long long n) : v_(n) {}  // NOLINT: implicit by design, 2 means 2/1
    Rational(int n) : v_(n) {}        // NOLINT
    Rational(long long num, long long den) : Rational(BigInt(num), BigInt(den)) {}
    Rational(BigInt num, BigInt den) {
        if (den == 0) throw precondition_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        v_ = BigRat(std::move(num), std::move(den));
    }
    explicit Rational(BigRat v) : v_(std::move(v)) {}

    BigInt num() const { return boost::multiprecision::numerator(v_); }
    BigInt den() const { return boost::multiprecision::denominator(v_); }
    const BigRat& raw() const { return v_; }

    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return den() == 1; }

    double to_double() const { return v_.convert_to<double>(); }

    // "p/q", or just "p" when the value is an integer.
    std::string str() const {
        BigInt n = num(), d = den();
        if (d == 1) return n.str();
        return n.str() + "/" + d.str();
    }

    // Fixed-point decimal with `digits` fractional digits, round half away
    // from zero.  Used for the decimal columns of CSV output.
    std::string decimal(int digits = 12) const {
        BigInt n = num(), d = den();
        bool neg = n < 0;
        if (neg) n = -n;
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(digits));
        BigInt scaled = n * scale;
        BigInt q = scaled / d;
        BigInt r = scaled % d;
        if (2 * r >= d) ++q;
        BigInt ip = q / scale;
        std::string frac = BigInt(q % scale).str();
        if (static_cast<int>(frac.size()) < digits)
            frac.insert(frac.begin(), digits - frac.size(), '0');
        std::string out = (neg && q != 0) ? "-" : "";
        out += ip.str();
        if (digits > 0) out += "." + frac;
        return out;
    }

    // Accepts "p/q", integers, and plain decimals ("1.9" -> 19/10), with an
    // optional leading sign.  Anything else is a usage error.
    static Rational parse(const std::string& text) {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) throw usage_error("Rational: empty string");
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '+' || s[0] == '-') {
            neg = (s[0] == '-');
            i = 1;
        }
        auto digits = [&](std::size_t& pos) {
            std::string out;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                out += s[pos++];
            return out;
        };
        std::string ipart = digits(i);
        if (i < s.size() && s[i] == '/') {
            ++i;
            std::string q = digits(i);
            if (ipart.empty() || q.empty() || i != s.size())
                throw usage_error("Rational: cannot parse '" + text + "'");
            BigInt den(q);
            if (den == 0) throw usage_error("Rational: zero denominator in '" + text + "'");
            Rational r(BigInt(ipart), den);
            return neg ? -r : r;
        }
        std::string fpart;
        if (i < s.size() && s[i] == '.') {
            ++i;
            fpart = digits(i);
        }
        if ((ipart.empty() && fpart.empty()) || i != s.size())
            throw usage_error("Rational: cannot parse '" + text + "'");
        BigInt n(ipart.empty() ? "0" : ipart);
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fpart.size()));
        n *= scale;
        if (!fpart.empty()) n += BigInt(fpart);
        Rational r(n, scale);
        return neg ? -r : r;
    }

    Rational operator-() const { return Rational(BigRat(-v_)); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.v_.is_zero()) throw precondition_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  private:
    BigRat v_;
};

inline Rational abs(const Rational& a) { return a < Rational(0) ? -a : a; }
inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Largest integer <= a, as a BigInt.
inline BigInt rational_floor(const Rational& a) {
    BigInt q = a.num() / a.den();
    if (a.num() < 0 && a.num() % a.den() != 0) --q;
    return q;
}

}  // namespace restlab
