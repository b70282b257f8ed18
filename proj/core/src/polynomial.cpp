#include "restlab/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "restlab/errors.hpp"

namespace restlab {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    char take() {
        skip();
        return s[i++];
    }
};

long long parse_digits(Cursor& c) {
    c.skip();
    std::size_t start = c.i;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
    if (c.i == start) throw usage_error("polynomial: expected digits at '" + c.s.substr(start) + "'");
    return std::stoll(c.s.substr(start, c.i - start));
}

Rational parse_number(Cursor& c) {
    long long whole = parse_digits(c);
    if (c.i < c.s.size() && c.s[c.i] == '/') {
        ++c.i;
        long long den = parse_digits(c);
        if (den == 0) throw usage_error("polynomial: zero denominator");
        return Rational(whole, den);
    }
    if (c.i < c.s.size() && c.s[c.i] == '.') {
        ++c.i;
        std::size_t start = c.i;
        long long frac = parse_digits(c);
        Rational scale = 1;
        for (std::size_t k = 0; k < c.i - start; ++k) scale = scale * Rational(10);
        return Rational(whole) + Rational(frac) / scale;
    }
    return Rational(whole);
}

}  // namespace

Polynomial::Polynomial(int vars, std::vector<Term> terms) : vars_(vars) {
    std::map<std::vector<int>, Rational> acc;
    for (auto& t : terms) {
        t.exps.resize(static_cast<std::size_t>(vars), 0);
        auto it = acc.find(t.exps);
        if (it == acc.end())
            acc.emplace(t.exps, t.coeff);
        else
            it->second = it->second + t.coeff;
    }
    for (auto& [e, coeff] : acc)
        if (!(coeff == Rational(0))) terms_.push_back({coeff, e});
}

Polynomial Polynomial::parse(const std::string& text, int vars) {
    Cursor c{text};
    std::vector<Term> terms;
    int max_var = 0;
    bool first = true;
    while (!c.done()) {
        int sign = 1;
        char p = c.peek();
        if (p == '+' || p == '-') {
            c.take();
            if (p == '-') sign = -1;
        } else if (!first) {
            throw usage_error("polynomial: expected '+' or '-' before '" + text.substr(c.i) + "'");
        }
        first = false;

        Rational coeff(sign);
        std::vector<int> exps;
        bool saw_factor = false;
        while (true) {
            char q = c.peek();
            if (q == '*') {
                c.take();
                q = c.peek();
            } else if (saw_factor && !(std::isdigit(static_cast<unsigned char>(q)) || q == 'x')) {
                break;
            }
            if (std::isdigit(static_cast<unsigned char>(q))) {
                coeff = coeff * parse_number(c);
            } else if (q == 'x') {
                c.take();
                long long idx = parse_digits(c);
                if (idx < 1 || idx > 16) throw usage_error("polynomial: variable index outside x1..x16");
                long long e = 1;
                if (c.peek() == '^') {
                    c.take();
                    e = parse_digits(c);
                    if (e < 0 || e > 64) throw usage_error("polynomial: exponent outside [0, 64]");
                }
                if (static_cast<std::size_t>(idx) > exps.size()) exps.resize(static_cast<std::size_t>(idx), 0);
                exps[static_cast<std::size_t>(idx - 1)] += static_cast<int>(e);
                max_var = std::max(max_var, static_cast<int>(idx));
            } else {
                if (!saw_factor)
                    throw usage_error("polynomial: expected a number or variable at '" + text.substr(c.i) + "'");
                break;
            }
            saw_factor = true;
        }
        terms.push_back({coeff, exps});
    }
    if (terms.empty()) throw usage_error("polynomial: empty expression");
    if (vars == 0) vars = max_var;
    if (max_var > vars)
        throw usage_error("polynomial: uses x" + std::to_string(max_var) + " but only " +
                          std::to_string(vars) + " variables are allowed");
    return Polynomial(vars, std::move(terms));
}

int Polynomial::degree() const {
    int deg = 0;
    for (const auto& t : terms_) {
        int d = 0;
        for (int e : t.exps) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

double Polynomial::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) < vars_)
        throw precondition_error("polynomial: point has fewer coordinates than variables");
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff.to_double();
        for (int j = 0; j < vars_; ++j)
            for (int e = 0; e < t.exps[static_cast<std::size_t>(j)]; ++e) v *= x[static_cast<std::size_t>(j)];
        sum += v;
    }
    return sum;
}

Polynomial Polynomial::partial(int var) const {
    if (var < 0 || var >= vars_) throw precondition_error("polynomial: derivative variable out of range");
    std::vector<Term> out;
    for (const auto& t : terms_) {
        int e = t.exps[static_cast<std::size_t>(var)];
        if (e == 0) continue;
        Term d = t;
        d.coeff = d.coeff * Rational(e);
        d.exps[static_cast<std::size_t>(var)] = e - 1;
        out.push_back(std::move(d));
    }
    return Polynomial(vars_, std::move(out));
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coeff;
        bool neg = c < Rational(0);
        if (neg) c = -c;
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        first = false;
        bool has_var = false;
        for (int e : t.exps) has_var = has_var || e > 0;
        if (!(c == Rational(1)) || !has_var) os << c.str();
        bool lead = !(c == Rational(1)) || !has_var;
        for (int j = 0; j < vars_; ++j) {
            int e = t.exps[static_cast<std::size_t>(j)];
            if (e == 0) continue;
            if (lead) os << "*";
            os << "x" << (j + 1);
            if (e > 1) os << "^" << e;
            lead = true;
        }
    }
    return os.str();
}

}  // namespace restlab
