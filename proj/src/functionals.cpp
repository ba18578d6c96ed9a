#include "mnx/functionals.hpp"

#include <cmath>

namespace mnx {

double quadratic_form_un(const ModelSpec& spec, const DiffusionPath& dpath,
                         const TimeGrid& grid) {
    double sum = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const double dx =
            dpath.x_values[grid.coarse_to_fine(j + 1)] - dpath.x_values[grid.coarse_to_fine(j)];
        sum += spec.kernel(dpath.frozen_coarse[j]) * dx * dx;
    }
    return sum;
}

double limit_u_infinity(const ModelSpec& spec, const DiffusionPath& dpath,
                        const TimeGrid& grid) {
    const int K = grid.fine_count();
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
        const double x = dpath.x_values[k];
        const double s = spec.diffusion(x);
        sum += spec.kernel(x) * s * s;
    }
    return sum * grid.fine_step;
}

double martingale_m1n(const ModelSpec& spec, const BrownianPath& path,
                      const DiffusionPath& dpath, const TimeGrid& grid) {
    const double n = grid.n;
    const double sqrt_n = std::sqrt(n);
    double sum = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const double dw = path.coarse_increment(grid, j);
        const double g = sqrt_n * dw;
        sum += spec.a_derivs(dpath.frozen_coarse[j]).a * (g * g - 1.0);
    }
    return sum / sqrt_n;
}

double martingale_m1n_double_form(const ModelSpec& spec, const BrownianPath& path,
                                  const DiffusionPath& dpath, const TimeGrid& grid) {
    const double sqrt_n = std::sqrt(static_cast<double>(grid.n));
    double sum = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        const double i11 = iterated_integrals(path, grid, j).I11;
        sum += 2.0 * spec.a_derivs(dpath.frozen_coarse[j]).a * i11;
    }
    return sqrt_n * sum;
}

double reference_fn(const ModelSpec& spec, const DiffusionPath& dpath,
                    const TimeGrid& grid) {
    double sum = 0.0;
    if (spec.stat_case == StatCase::wiener) {
        for (int j = 0; j < grid.n; ++j) {
            const double a = spec.a_derivs(dpath.frozen_coarse[j]).a;
            sum += a * a;
        }
        return 2.0 * sum / grid.n;
    }
    for (int j = 0; j < grid.n; ++j) sum += spec.reference(dpath.frozen_coarse[j]);
    return sum / grid.n;
}

double discrete_bracket(const ModelSpec& spec, const DiffusionPath& dpath,
                        const TimeGrid& grid, double t) {
    double sum = 0.0;
    for (int j = 0; j < grid.n; ++j) {
        if (grid.coarse_time(j + 1) > t + 1e-12) break;
        const double a = spec.a_derivs(dpath.frozen_coarse[j]).a;
        sum += a * a;
    }
    return 2.0 * sum / grid.n;
}

double remainder_nn(const ModelSpec& spec, const BrownianPath& /*path*/,
                    const DiffusionPath& dpath, const BlockGaussians& blocks,
                    const TimeGrid& grid) {
    if (!spec.has_second_order_handles())
        throw std::invalid_argument("remainder_nn: missing derivative handles");
    const int n = grid.n;
    const double dn = n;
    const double dt = grid.coarse_dt();
    double stochastic = 0.0;
    double deterministic = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = dpath.frozen_coarse[j];
        const double c = spec.kernel(x);
        const double b = spec.drift(x);
        const double s = spec.diffusion(x);
        const double s_i1 = spec.sigma_i1(x);
        const double c_i1 = spec.kernel_i1(x);
        const double c_i0 = spec.kernel_i0(x);
        const double b_i1 = spec.drift_i1(x);

        const double dw = blocks.dw[j];
        const double J = blocks.J[j];
        const double i111 = (dw * dw * dw - 3.0 * dt * dw) / 6.0;

        stochastic += 6.0 * dn * c * s * s_i1 * i111;
        stochastic += 2.0 * c * b * s * dw;
        stochastic += 2.0 * dn * c * s * s_i1 * J;
        stochastic -= dn * c_i1 * s * s * (dt * dw - J);

        deterministic += c * b * b + c * s * b_i1 - 0.5 * c_i0 * s * s -
                         c_i1 * s * s_i1;
    }
    return stochastic + deterministic / dn;
}

StatisticSample compute_statistics(const ModelSpec& spec, const BrownianPath& path,
                                   const DiffusionPath& dpath, const TimeGrid& grid,
                                   const BlockGaussians* blocks) {
    StatisticSample s;
    s.u_n = quadratic_form_un(spec, dpath, grid);
    s.u_inf = limit_u_infinity(spec, dpath, grid);
    s.z_n = error_statistic_zn(s.u_n, s.u_inf, grid.n);
    s.m1n = martingale_m1n(spec, path, dpath, grid);
    s.f_n = reference_fn(spec, dpath, grid);
    if (blocks) {
        s.n_n = remainder_nn(spec, path, dpath, *blocks, grid);
        s.has_n_n = true;
    }
    return s;
}

} // namespace mnx
