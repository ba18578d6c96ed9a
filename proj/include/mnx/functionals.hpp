#pragma once

#include "mnx/model.hpp"
#include "mnx/paths.hpp"

namespace mnx {

// Per-path statistics: the quadratic form U_n, its limit, the normalized
// error Z_n = sqrt(n)(U_n - U_inf), the principal martingale terminal value,
// the reference variable F_n, and the second-order remainder N_n.
struct StatisticSample {
    double u_n = 0.0;
    double u_inf = 0.0;
    double z_n = 0.0;
    double m1n = 0.0;
    double f_n = 0.0;
    double n_n = 0.0;
    bool has_n_n = false;
    // The W_n component of the general decomposition is identically zero in
    // both implemented cases.
    double w_n = 0.0;
};

// U_n = sum_j c(X_{t_{j-1}}) (Delta_j X)^2 over coarse intervals.
double quadratic_form_un(const ModelSpec& spec, const DiffusionPath& dpath,
                         const TimeGrid& grid);

// U_inf = int_0^1 c(X_s) sigma(X_s)^2 ds, fine-grid left-Riemann sum.
double limit_u_infinity(const ModelSpec& spec, const DiffusionPath& dpath,
                        const TimeGrid& grid);

inline double error_statistic_zn(double u_n, double u_inf, int n) {
    return std::sqrt(static_cast<double>(n)) * (u_n - u_inf);
}

// Hermite form: n^{-1/2} sum_j a(X_{t_{j-1}}) ((sqrt(n) dw_j)^2 - 1).
double martingale_m1n(const ModelSpec& spec, const BrownianPath& path,
                      const DiffusionPath& dpath, const TimeGrid& grid);

// Double-integral form sqrt(n) sum_j 2 a(X_{t_{j-1}}) I11(j); equals the
// Hermite form up to rounding.
double martingale_m1n_double_form(const ModelSpec& spec, const BrownianPath& path,
                                  const DiffusionPath& dpath, const TimeGrid& grid);

// Wiener case: (2/n) sum_j a(X_{t_{j-1}})^2; diffusion case: (1/n) sum_j beta.
double reference_fn(const ModelSpec& spec, const DiffusionPath& dpath,
                    const TimeGrid& grid);

// (2/n) sum_{j: t_j <= t} a(X_{t_{j-1}})^2.
double discrete_bracket(const ModelSpec& spec, const DiffusionPath& dpath,
                        const TimeGrid& grid, double t = 1.0);

// Second-order remainder of the stochastic expansion
// Z_n = M_1^n + n^{-1/2} N_n, with per-interval stochastic integrals realized
// exactly from the coarse increment and the block pair:
//   triple iterated integral     -> I111(j)
//   int dw                       -> dw_j
//   int (t - t_{j-1}) dw         -> J_j
//   int int dw ds                -> dt dw_j - J_j
// The o_M(1) remainder is dropped; the residual study measures it.
double remainder_nn(const ModelSpec& spec, const BrownianPath& path,
                    const DiffusionPath& dpath, const BlockGaussians& blocks,
                    const TimeGrid& grid);

StatisticSample compute_statistics(const ModelSpec& spec, const BrownianPath& path,
                                   const DiffusionPath& dpath, const TimeGrid& grid,
                                   const BlockGaussians* blocks = nullptr);

} // namespace mnx
