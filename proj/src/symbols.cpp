#include "mnx/symbols.hpp"

#include <cmath>

#include "json.hpp"

namespace mnx {

std::complex<double> RandomSymbol::evaluate(double z, double u, double v) const {
    const std::complex<double> iu(0.0, u);
    const std::complex<double> iv(0.0, v);
    std::complex<double> total = 0.0;
    for (const auto& [key, coef] : terms_) {
        std::complex<double> t = coef * std::pow(z, key.z_degree) * std::pow(iu, key.m);
        for (int kd : key.k) t *= std::pow(iv, kd);
        total += t;
    }
    return total;
}

double RandomSymbol::max_abs_diff(const RandomSymbol& o) const {
    double worst = 0.0;
    for (const auto& [k, c] : terms_) worst = std::max(worst, std::abs(c - o.coefficient(k)));
    for (const auto& [k, c] : o.terms_) worst = std::max(worst, std::abs(c - coefficient(k)));
    return worst;
}

SymbolCoeffs wiener_coefficients(const ModelSpec& spec, const DiffusionPath& dpath,
                                 const TimeGrid& grid) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;

    double s2 = 0.0, s3 = 0.0;
    for (int k = 0; k < K; ++k) {
        const double a = spec.a_derivs(dpath.x_values[k]).a;
        s2 += a * a;
        s3 += a * a * a;
    }
    SymbolCoeffs c;
    c.c0 = 2.0 * s2 * h;
    if (c.c0 <= 0.0) throw DegeneracyError("wiener_coefficients: c0 <= 0");
    c.c1 = (2.0 / 3.0) * s3 / s2;

    const TailIntegrals tails = wiener_tail_integrals(spec, dpath, grid);
    double q2 = 0.0, q3 = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const int fj = grid.coarse_to_fine(j);
        const double a = spec.a_derivs(dpath.x_values[fj]).a;
        q2 += a * tails.T1[fj] * tails.T1[fj];
        q3 += a * tails.T2[fj];
    }
    c.c2 = q2 / grid.n;
    c.c3 = q3 / grid.n;
    return c;
}

namespace {

// Exact expansion of (2(iu)^2 + 4(iv))^p for p = 1, 2.
void add_canonical_power(RandomSymbol& sym, int extra_m, double coef, int p) {
    if (p == 1) {
        sym.add_term(key1(extra_m + 2, 0), 2.0 * coef);
        sym.add_term(key1(extra_m, 1), 4.0 * coef);
    } else if (p == 2) {
        sym.add_term(key1(extra_m + 4, 0), 4.0 * coef);
        sym.add_term(key1(extra_m + 2, 1), 16.0 * coef);
        sym.add_term(key1(extra_m, 2), 16.0 * coef);
    } else {
        throw std::invalid_argument("add_canonical_power: unsupported power");
    }
}

} // namespace

RandomSymbol full_symbol_wiener(const SymbolCoeffs& coeffs) {
    RandomSymbol sym;
    sym.add_term(key1(2, 0, 1), coeffs.c1);
    add_canonical_power(sym, 1, coeffs.c2, 2);
    add_canonical_power(sym, 1, coeffs.c3, 1);
    sym.prune();
    return sym;
}

RandomSymbol adaptive_symbol_wiener(const SymbolCoeffs& coeffs) {
    RandomSymbol sym;
    sym.add_term(key1(2, 0, 1), coeffs.c1);
    return sym;
}

KHPaths diffusion_kh(const ModelSpec& spec, const DiffusionPath& dpath,
                     const TimeGrid& grid) {
    const int K = grid.fine_count();
    KHPaths kh;
    kh.k.resize(K + 1);
    kh.h.resize(K + 1);
    for (int i = 0; i <= K; ++i) {
        const double x = dpath.x_values[i];
        const double c = spec.kernel(x);
        const double b = spec.drift(x);
        const double s = spec.diffusion(x);
        const double s_i1 = spec.sigma_i1(x);
        const double c_i1 = spec.kernel_i1(x);
        const double c_i0 = spec.kernel_i0(x);
        const double b_i1 = spec.drift_i1(x);
        kh.k[i] = 2.0 * c * b * s + c * s * s_i1 - 0.5 * c_i1 * s * s;
        kh.h[i] = c * b * b + c * b_i1 * s - 0.5 * c_i0 * s * s - c_i1 * s * s_i1;
    }
    return kh;
}

RandomSymbol adaptive_symbol_diffusion(const ModelSpec& spec, const DiffusionPath& dpath,
                                       const BrownianPath& path, const TimeGrid& grid,
                                       const KHPaths& kh) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    double s2 = 0.0, s3 = 0.0;
    for (int k = 0; k < K; ++k) {
        const double a = spec.a_derivs(dpath.x_values[k]).a;
        s2 += a * a;
        s3 += a * a * a;
    }
    double ito_sum = 0.0;
    for (int k = 0; k < K; ++k)
        ito_sum += kh.k[k] * path.fine_increments[k] + kh.h[k] * h;

    RandomSymbol sym;
    sym.add_term(key1(2, 0, 1), (2.0 / 3.0) * s3 / s2);
    sym.add_term(key1(1, 0, 0), ito_sum);
    sym.prune();
    return sym;
}

RandomSymbol sigma_ss_diffusion(const ModelSpec& spec, const FlowSlice& slice,
                                const DiffusionPath& dpath, const TimeGrid& grid) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    double A = 0.0;  // int_s^1 alpha'(X) D_sX dt
    double B = 0.0;  // int_s^1 beta'(X) D_sX dt
    double C = 0.0;  // int_s^1 { alpha''(X)(D_sX)^2 + alpha'(X) D_sD_sX } dt
    double D = 0.0;  // int_s^1 { beta''(X)(D_sX)^2 + beta'(X) D_sD_sX } dt
    for (int k = slice.s_index; k < K; ++k) {
        const double x = dpath.x_values[k];
        const double d1 = slice.d1(k);
        const double d2 = slice.d2(k);
        const double a1 = spec.alpha_d1(x);
        const double a2 = spec.alpha_d2(x);
        const double b1 = spec.reference_d1(x);
        const double b2 = spec.reference_d2(x);
        A += a1 * d1;
        B += b1 * d1;
        C += a2 * d1 * d1 + a1 * d2;
        D += b2 * d1 * d1 + b1 * d2;
    }
    A *= h;
    B *= h;
    C *= h;
    D *= h;

    RandomSymbol sym;
    // ((iu)^2 A + (iv) B)^2 + (iu)^2 C + (iv) D
    sym.add_term(key1(4, 0), A * A);
    sym.add_term(key1(2, 1), 2.0 * A * B);
    sym.add_term(key1(0, 2), B * B);
    sym.add_term(key1(2, 0), C);
    sym.add_term(key1(0, 1), D);
    sym.prune();
    return sym;
}

RandomSymbol anticipative_symbol_diffusion(const ModelSpec& spec,
                                           const DerivativeFlow& flow,
                                           const DiffusionPath& dpath,
                                           const TimeGrid& grid) {
    RandomSymbol total;
    for (int j = 0; j < grid.n; ++j) {
        const FlowSlice* slice = flow.slice_at(grid.coarse_to_fine(j));
        if (!slice)
            throw std::invalid_argument(
                "anticipative_symbol_diffusion: flow slice missing at coarse node");
        const double a = spec.a_derivs(dpath.x_values[slice->s_index]).a;
        const RandomSymbol ss = sigma_ss_diffusion(spec, *slice, dpath, grid);
        for (const auto& [key, coef] : ss.terms()) {
            SymbolKey up = key;
            up.m += 1; // outer iu factor
            total.add_term(up, a * coef / grid.n);
        }
    }
    total.prune();
    return total;
}

RandomSymbol full_symbol_diffusion(const ModelSpec& spec, const DiffusionPath& dpath,
                                   const BrownianPath& path, const TimeGrid& grid) {
    std::vector<int> s_indices(grid.n);
    for (int j = 0; j < grid.n; ++j) s_indices[j] = grid.coarse_to_fine(j);
    const DerivativeFlow flow = first_flow(spec, dpath, path, grid, s_indices);
    const KHPaths kh = diffusion_kh(spec, dpath, grid);
    return adaptive_symbol_diffusion(spec, dpath, path, grid, kh) +
           anticipative_symbol_diffusion(spec, flow, dpath, grid);
}

std::string symbol_to_json(const RandomSymbol& sym) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, coef] : sym.terms()) {
        nlohmann::json t;
        t["m"] = key.m;
        t["k"] = key.k;
        t["z_degree"] = key.z_degree;
        t["coefficient"] = coef;
        arr.push_back(t);
    }
    return arr.dump();
}

RandomSymbol symbol_from_json(const std::string& text) {
    RandomSymbol sym;
    const auto arr = nlohmann::json::parse(text);
    for (const auto& t : arr) {
        SymbolKey key;
        key.m = t.at("m").get<int>();
        key.k = t.at("k").get<std::vector<int>>();
        key.z_degree = t.at("z_degree").get<int>();
        sym.add_term(key, t.at("coefficient").get<double>());
    }
    return sym;
}

} // namespace mnx
