#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace mnx {

// Exact rational arithmetic for the studentization algebra. Magnitudes stay
// tiny (factorials of small derivative orders), so int64 is ample.
struct Fraction {
    long long num = 0;
    long long den = 1;

    Fraction() = default;
    Fraction(long long n) : num(n), den(1) {}
    Fraction(long long n, long long d);

    Fraction operator+(const Fraction& o) const;
    Fraction operator-(const Fraction& o) const;
    Fraction operator*(const Fraction& o) const;
    Fraction operator-() const { return {-num, den}; }
    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
    bool is_zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// Polynomial in y with rational coefficients (degree -> coefficient).
using YPoly = std::map<int, Fraction>;

// Bivariate polynomial in (y, x), (ydeg, xdeg) -> coefficient.
using QPolynomial = std::map<std::pair<int, int>, Fraction>;

struct UnsupportedReduction : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Q_{alpha,beta,nu}(y, x) = x^alpha P_{beta,nu}(y, x), where P expands the
// beta-fold x-derivative of g(z/sqrt(x)) into g-derivative orders. Supported
// table: beta <= 2, nu <= beta.
QPolynomial studentize_reduction(int alpha, int beta, int nu);

// Reduction of one symbol term coef * z^{zdeg} (iu)^m (iv)^k under the
// substitution g(z/sqrt(x)): the studentized second-order contribution is
//   E[ c0^{-e/2} * (symbol coefficient) ] * poly(y) * phi(y; 0, 1)
// with e = m + 2k - zdeg.
struct ReducedTerm {
    int c0_half_power = 0; // e
    YPoly poly;
};

ReducedTerm reduce_symbol_term(int m, int k, int z_degree);

std::string ypoly_str(const YPoly& p);

} // namespace mnx
