#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mnx/symbols.hpp"

namespace mnx {

// d^order/dz^order of phi(z; mean, variance) via probabilists' Hermite
// polynomials, order <= 6.
double gaussian_derivatives(double z, double mean, double variance, int order);

double normal_cdf(double t);

// Per-path coefficient samples (c0..c3) plus optional full symbol tables for
// the weak-form evaluator.
struct CoeffStore {
    std::vector<double> c0, c1, c2, c3;
    int n = 0;        // target coarse size the samples were generated at
    std::size_t N() const { return c0.size(); }

    void add(const SymbolCoeffs& c) {
        c0.push_back(c.c0);
        c1.push_back(c.c1);
        c2.push_back(c.c2);
        c3.push_back(c.c3);
    }
    void merge(const CoeffStore& other) {
        c0.insert(c0.end(), other.c0.begin(), other.c0.end());
        c1.insert(c1.end(), other.c1.begin(), other.c1.end());
        c2.insert(c2.end(), other.c2.begin(), other.c2.end());
        c3.insert(c3.end(), other.c3.begin(), other.c3.end());
    }
    bool degenerate_reference() const; // c0 law concentrated at a point
};

struct Moments {
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    double se1 = 0.0, se2 = 0.0, se3 = 0.0;
    std::size_t N = 0;
};

// Plain Monte Carlo means of c0^{-1/2} c1, c0^{-5/2} c2, c0^{-3/2} c3.
Moments coefficient_moments(const CoeffStore& store);

// q_n(z) = phi(z;0,1) { 1 + n^{-1/2} [ m1 (z^3 - 3z) + (12 m2 - 2 m3) z ] }.
double studentized_qn(double z, int n, const Moments& m);

// Analytic antiderivative:
// Phi(t) + n^{-1/2} [ -m1 (t^2 - 1) phi(t) - (12 m2 - 2 m3) phi(t) ].
double qn_cdf(double t, int n, const Moments& m);

struct Bandwidths {
    double h0, h1, h2;
};
Bandwidths silverman_bandwidths(const CoeffStore& store);

// (1/N) sum_i cj_i d^order/dx^order K_h(x - c0_i), Gaussian kernel.
double delta_kde(const CoeffStore& store, int j, double x, int deriv_order,
                 double bandwidth);

struct PnValue {
    double value = 0.0;
    bool reliable = true;
};

// p_n(z, x) assembled from kernel estimates of E[cj delta_x(c0)]:
//   phi(z;0,x) E[d_x] + n^{-1/2} ( E[c1 d_x] dz^2{z phi}
//                                  - 16 dx^2 E[c2 d_x] dz phi
//                                  + 4 dx E[c3 d_x] dz phi ).
// Values for x outside the sample support window are flagged unreliable.
PnValue joint_pn_density(double z, double x, int n, const CoeffStore& store,
                         const std::optional<Bandwidths>& bw = std::nullopt);

// Smooth test function with analytic derivative handles up to (dz^3, dx^2).
struct TestFunction {
    std::string name;
    // eval(z, x, dz, dx); derivative orders outside the declared range throw.
    std::function<double(double, double, int, int)> eval;
    int max_dz = 3;
    int max_dx = 2;
};

// Built-in f-family used by the harness: z, z^2, z^3, sin z.
TestFunction test_function(const std::string& name);

// One path's contribution to the weak-form expectation: the conditional
// variance sample, the reference sample, and the symbol table.
struct WeakFormSample {
    double c_inf = 0.0;
    double f_inf = 0.0;
    const RandomSymbol* symbol = nullptr;
};

struct WeakFormStore {
    std::vector<double> c_inf;
    std::vector<double> f_inf;
    std::vector<RandomSymbol> symbols;
    std::size_t N() const { return c_inf.size(); }
};

// Wiener-case store built from coefficient samples (c_inf = f_inf = c0).
WeakFormStore weak_form_store(const CoeffStore& store);

// E[f(Z_n, F_n)] ~= E[ int f(z, F_inf) phi(z; 0, C_inf) dz ]
//   + n^{-1/2} sum_terms E[ coef * int dz^m dx^k f(z, F_inf) z^zdeg phi(z; 0, C_inf) dz ],
// the z-quadrature by Gauss-Hermite. No kernel density estimation involved;
// z-derivatives of f beyond max_dz are moved back onto the Gaussian factor.
double weak_form_expectation(const TestFunction& f, int n, const WeakFormStore& store,
                             int gh_order = 64);

// First-order part alone: E[ int f(z, F_inf) phi(z; 0, C_inf) dz ].
double mixed_normal_expectation(const TestFunction& f, const WeakFormStore& store,
                                int gh_order = 64);

} // namespace mnx
