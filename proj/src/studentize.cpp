#include "mnx/studentize.hpp"

#include <numeric>

namespace mnx {

Fraction::Fraction(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Fraction Fraction::operator+(const Fraction& o) const {
    return Fraction(num * o.den + o.num * den, den * o.den);
}
Fraction Fraction::operator-(const Fraction& o) const {
    return Fraction(num * o.den - o.num * den, den * o.den);
}
Fraction Fraction::operator*(const Fraction& o) const {
    return Fraction(num * o.num, den * o.den);
}

std::string Fraction::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

// A term c * y^p * xt^q * g^{(nu)}(y) where y = z/sqrt(x) and xt = x^{-1/2}.
// Key: (p, q, nu).
using Expansion = std::map<std::tuple<int, int, int>, Fraction>;

void add_to(Expansion& e, int p, int q, int nu, const Fraction& c) {
    if (c.is_zero()) return;
    auto key = std::make_tuple(p, q, nu);
    auto it = e.find(key);
    if (it == e.end())
        e.emplace(key, c);
    else {
        it->second = it->second + c;
        if (it->second.is_zero()) e.erase(it);
    }
}

// d/dz maps y^p xt^q g^{(nu)} to p y^{p-1} xt^{q+1} g^{(nu)} + y^p xt^{q+1} g^{(nu+1)}.
Expansion apply_dz(const Expansion& e) {
    Expansion out;
    for (const auto& [key, c] : e) {
        const auto [p, q, nu] = key;
        if (p > 0) add_to(out, p - 1, q + 1, nu, c * Fraction(p));
        add_to(out, p, q + 1, nu + 1, c);
    }
    return out;
}

// d/dx maps y^p xt^q g^{(nu)} to
//   -(p+q)/2 y^p xt^{q+2} g^{(nu)} - 1/2 y^{p+1} xt^{q+2} g^{(nu+1)}.
Expansion apply_dx(const Expansion& e) {
    Expansion out;
    for (const auto& [key, c] : e) {
        const auto [p, q, nu] = key;
        add_to(out, p, q + 2, nu, c * Fraction(-(p + q), 2));
        add_to(out, p + 1, q + 2, nu + 1, c * Fraction(-1, 2));
    }
    return out;
}

// Expansion of dz^m dx^k g(z/sqrt(x)).
Expansion derivative_expansion(int m, int k) {
    Expansion e;
    add_to(e, 0, 0, 0, Fraction(1));
    for (int i = 0; i < m; ++i) e = apply_dz(e);
    for (int i = 0; i < k; ++i) e = apply_dx(e);
    return e;
}

// d/dy of poly(y) * phi(y;0,1) stays of that form: poly -> poly' - y poly.
YPoly differentiate_against_phi(const YPoly& poly) {
    YPoly out;
    for (const auto& [deg, c] : poly) {
        if (deg > 0) {
            auto it = out.find(deg - 1);
            const Fraction add = c * Fraction(deg);
            if (it == out.end())
                out.emplace(deg - 1, add);
            else
                it->second = it->second + add;
        }
        auto it = out.find(deg + 1);
        if (it == out.end())
            out.emplace(deg + 1, -c);
        else
            it->second = it->second - c;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

void accumulate(YPoly& target, const YPoly& add, const Fraction& scale) {
    for (const auto& [deg, c] : add) {
        auto it = target.find(deg);
        const Fraction v = c * scale;
        if (it == target.end())
            target.emplace(deg, v);
        else {
            it->second = it->second + v;
            if (it->second.is_zero()) target.erase(it);
        }
    }
}

} // namespace

QPolynomial studentize_reduction(int alpha, int beta, int nu) {
    if (beta < 0 || beta > 2 || nu < 0 || nu > beta)
        throw UnsupportedReduction("studentize_reduction: table covers beta <= 2, nu <= beta");
    // (-d/dx)^beta g = (-1)^beta dx^beta g.
    Expansion e = derivative_expansion(0, beta);
    const Fraction sign((beta % 2 == 0) ? 1 : -1);
    QPolynomial q;
    for (const auto& [key, c] : e) {
        const auto [p, xq, enu] = key;
        if (enu != nu) continue;
        q[{p, xq + alpha}] = c * sign;
    }
    return q;
}

ReducedTerm reduce_symbol_term(int m, int k, int z_degree) {
    if (z_degree < 0 || z_degree > 2)
        throw UnsupportedReduction("reduce_symbol_term: z-degree <= 2");
    // int g(z/sqrt(x)) (-dz)^m (-dx)^k { z^zdeg phi(z;0,x) E[D delta_x(c0)] } dz dx
    //   = int (dz^m dx^k g)(z/sqrt(x)) z^zdeg phi(z;0,x) E[D delta_x(c0)] dz dx.
    // Substituting z = y sqrt(x) collapses the x-integral onto x = c0; every
    // monomial carries xt^{m+2k}, and z^zdeg contributes y^zdeg xt^{-zdeg}.
    Expansion e = derivative_expansion(m, k);

    ReducedTerm out;
    out.c0_half_power = m + 2 * k - z_degree;

    // Group by g-derivative order nu; integrate by parts nu times against
    // poly * phi.
    std::map<int, YPoly> by_nu;
    for (const auto& [key, c] : e) {
        const auto [p, q, nu] = key;
        (void)q; // homogeneous: q == m + 2k for every monomial
        YPoly& poly = by_nu[nu];
        auto it = poly.find(p + z_degree);
        if (it == poly.end())
            poly.emplace(p + z_degree, c);
        else
            it->second = it->second + c;
    }
    for (auto& [nu, poly] : by_nu) {
        YPoly reduced = poly;
        for (int i = 0; i < nu; ++i) reduced = differentiate_against_phi(reduced);
        // Each by-parts step contributes (-1), and differentiate_against_phi
        // already encodes d/dy; (-1)^nu * d^nu matches (-d)^nu.
        const Fraction sign((nu % 2 == 0) ? 1 : -1);
        accumulate(out.poly, reduced, sign);
    }
    return out;
}

std::string ypoly_str(const YPoly& p) {
    if (p.empty()) return "0";
    std::string s;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        if (!s.empty()) s += " + ";
        s += it->second.str();
        if (it->first > 0) s += " y^" + std::to_string(it->first);
    }
    return s;
}

} // namespace mnx
