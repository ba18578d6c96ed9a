#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "mnx/malliavin.hpp"
#include "mnx/model.hpp"
#include "mnx/paths.hpp"

namespace mnx {

// Term index of a random symbol: degree m in (iu), multi-degree k in (iv)
// (scalar reference variables use d1 = 1, but the key stays a multi-index),
// and polynomial degree in z of the coefficient.
struct SymbolKey {
    int m = 0;
    std::vector<int> k;
    int z_degree = 0;

    bool operator<(const SymbolKey& o) const {
        if (m != o.m) return m < o.m;
        if (k != o.k) return k < o.k;
        return z_degree < o.z_degree;
    }
    bool operator==(const SymbolKey& o) const {
        return m == o.m && k == o.k && z_degree == o.z_degree;
    }
    int k_total() const {
        int t = 0;
        for (int v : k) t += v;
        return t;
    }
};

inline SymbolKey key1(int m, int k, int z_degree = 0) { return {m, {k}, z_degree}; }

// Sparse table of a random symbol sum_j c_j z^{zdeg_j} (iu)^{m_j} (iv)^{k_j}.
// Symbols are never evaluated at complex arguments internally; the adjoint
// action and the weak-form evaluator consume degrees and coefficients.
class RandomSymbol {
public:
    void add_term(const SymbolKey& key, double coef) {
        if (coef == 0.0) return;
        terms_[key] += coef;
    }
    void add(const RandomSymbol& other, double scale = 1.0) {
        for (const auto& [k, c] : other.terms_) add_term(k, scale * c);
    }
    RandomSymbol scaled(double s) const {
        RandomSymbol r;
        for (const auto& [k, c] : terms_) r.add_term(k, s * c);
        return r;
    }
    RandomSymbol operator+(const RandomSymbol& o) const {
        RandomSymbol r = *this;
        r.add(o);
        return r;
    }
    RandomSymbol operator-(const RandomSymbol& o) const {
        RandomSymbol r = *this;
        r.add(o, -1.0);
        return r;
    }

    std::complex<double> evaluate(double z, double u, double v) const;

    const std::map<SymbolKey, double>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    double coefficient(const SymbolKey& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? 0.0 : it->second;
    }
    // Drop exact-zero entries accumulated by cancellation.
    void prune(double eps = 0.0) {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = std::abs(it->second) <= eps ? terms_.erase(it) : std::next(it);
    }
    double max_abs_diff(const RandomSymbol& o) const;

private:
    std::map<SymbolKey, double> terms_;
};

// Wiener-case pathwise coefficients:
//   c0 = 2 int a(w)^2, c1 = (2/3) int a^3 / int a^2,
//   c2 = int a(w_t) T1(t)^2 dt, c3 = int a(w_t) T2(t) dt.
// c0 and c1 are fine-grid quadratures; the outer t-integrals of c2 and c3 use
// the coarse nodes, matching the s-quadrature of the anticipative symbol so
// the two routes to the same term agree identically.
struct SymbolCoeffs {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SymbolCoeffs wiener_coefficients(const ModelSpec& spec, const DiffusionPath& dpath,
                                 const TimeGrid& grid);

// sigma = c1 z (iu)^2 + c2 iu (2(iu)^2 + 4(iv))^2 + c3 iu (2(iu)^2 + 4(iv)),
// with the canonical factor expanded by exact integer binomials.
RandomSymbol full_symbol_wiener(const SymbolCoeffs& coeffs);

// The z-linear part c1 z (iu)^2 alone.
RandomSymbol adaptive_symbol_wiener(const SymbolCoeffs& coeffs);

inline RandomSymbol anticipative_symbol_wiener(const SymbolCoeffs& coeffs) {
    RandomSymbol r = full_symbol_wiener(coeffs) - adaptive_symbol_wiener(coeffs);
    r.prune();
    return r;
}

// Diffusion-case processes
//   k_t = 2 c b sigma + c sigma sigma^{[1]} - c^{[1]} sigma^2 / 2
//   h_t = c b^2 + c b^{[1]} sigma - c^{[0]} sigma^2 / 2 - c^{[1]} sigma sigma^{[1]}
// evaluated along the fine grid.
struct KHPaths {
    std::vector<double> k;
    std::vector<double> h;
};

KHPaths diffusion_kh(const ModelSpec& spec, const DiffusionPath& dpath,
                     const TimeGrid& grid);

// (2z/3) int a^3 / int a^2 (iu)^2 + iu (int k dw + int h dt), the pathwise
// integrals as fine-grid Ito sums.
RandomSymbol adaptive_symbol_diffusion(const ModelSpec& spec, const DiffusionPath& dpath,
                                       const BrownianPath& path, const TimeGrid& grid,
                                       const KHPaths& kh);

// Diagonal symbol sigma_{s,s}(iu, iv) assembled from the flow slice at s:
// terms (4,0), (2,1), (0,2) from the squared tail pair and (2,0), (0,1) from
// the second-derivative tails.
RandomSymbol sigma_ss_diffusion(const ModelSpec& spec, const FlowSlice& slice,
                                const DiffusionPath& dpath, const TimeGrid& grid);

// sigma_bar(iu, iv) = int_0^1 iu a(X_s) sigma_{s,s}(iu, iv) ds, coarse-grid
// quadrature in s.
RandomSymbol anticipative_symbol_diffusion(const ModelSpec& spec,
                                           const DerivativeFlow& flow,
                                           const DiffusionPath& dpath,
                                           const TimeGrid& grid);

RandomSymbol full_symbol_diffusion(const ModelSpec& spec, const DiffusionPath& dpath,
                                   const BrownianPath& path, const TimeGrid& grid);

// JSON form: list of {"m": int, "k": [ints], "z_degree": int, "coefficient": double}.
std::string symbol_to_json(const RandomSymbol& sym);
RandomSymbol symbol_from_json(const std::string& text);

} // namespace mnx
