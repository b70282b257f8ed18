#pragma once

#include <string>
#include <vector>

#include "restlab/rational.hpp"

namespace restlab {

// Sparse multivariate polynomial with rational coefficients in variables
// x1..xn.  Exponent vectors are dense per term.
class Polynomial {
  public:
    struct Term {
        Rational coeff;
        std::vector<int> exps;
    };

    Polynomial() = default;
    Polynomial(int vars, std::vector<Term> terms);

    // Accepts sums of products of rationals (integer, a/b, or decimal) and
    // powers xk^e, with '*' optional: "x3 - x1^2 - x2^2", "3/2*x1*x2 - 1".
    // vars = 0 infers the variable count from the highest index used.
    static Polynomial parse(const std::string& text, int vars = 0);

    int vars() const { return vars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool zero() const { return terms_.empty(); }
    int degree() const;

    double eval(const std::vector<double>& x) const;
    Polynomial partial(int var) const;  // var in [0, vars)

    std::string str() const;

  private:
    int vars_ = 0;
    std::vector<Term> terms_;  // sorted by exponent vector, coefficients nonzero
};

}  // namespace restlab
