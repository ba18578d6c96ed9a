#include "mnx/paths.hpp"

#include <bit>
#include <cmath>

namespace mnx {

TimeGrid build_grid(int n, int R) {
    if (n < 2) throw std::invalid_argument("build_grid: n must be >= 2");
    if (R < 1) throw std::invalid_argument("build_grid: R must be >= 1");
    TimeGrid g;
    g.n = n;
    g.R = R;
    g.fine_step = 1.0 / (static_cast<double>(n) * R);
    return g;
}

BrownianPath sample_brownian(const TimeGrid& grid, const RngStream& stream) {
    const int n = grid.n, R = grid.R;
    const int K = n * R;
    const double dt = grid.coarse_dt();

    BrownianPath p;
    p.seed_id = stream.replication();
    p.cumulative.assign(K + 1, 0.0);
    p.fine_increments.assign(K, 0.0);
    p.coarse_draws.assign(n, 0.0);

    // Coarse increments first: their draws do not depend on R.
    const double sd_coarse = std::sqrt(dt);
    for (int j = 0; j < n; ++j) {
        const double dw = sd_coarse * stream.normal(Draw::coarse_increment, j);
        p.coarse_draws[j] = dw;
        p.cumulative[(j + 1) * R] = p.cumulative[j * R] + dw;
    }

    if (R > 1) {
        // R = 2^L * m with m odd. Dyadic bridge midpoints are keyed by their
        // heap index so deeper levels add draws; the final odd split is
        // sequential within each dyadic cell.
        const int L = std::countr_zero(static_cast<unsigned>(R));
        const int m = R >> L;
        for (int j = 0; j < n; ++j) {
            const int lo = j * R;
            for (int d = 1; d <= L; ++d) {
                const int cells = 1 << (d - 1);
                const int span = R >> (d - 1);
                const double len = span * grid.fine_step;
                const double sd = 0.5 * std::sqrt(len);
                for (int pos = 0; pos < cells; ++pos) {
                    const int a = lo + pos * span;
                    const int b = a + span;
                    const int mid = a + span / 2;
                    const std::uint32_t node = (1u << (d - 1)) + pos;
                    p.cumulative[mid] =
                        0.5 * (p.cumulative[a] + p.cumulative[b]) +
                        sd * stream.normal(Draw::bridge_dyadic, j, node);
                }
            }
            if (m > 1) {
                const int cells = 1 << L;
                for (int cell = 0; cell < cells; ++cell) {
                    const int a = lo + cell * m;
                    const double right = p.cumulative[a + m];
                    for (int i = 1; i < m; ++i) {
                        const int rem = m - (i - 1);
                        const double cur = p.cumulative[a + i - 1];
                        const double mean = cur + (right - cur) / rem;
                        const double var = grid.fine_step * (rem - 1) / rem;
                        p.cumulative[a + i] =
                            mean + std::sqrt(var) *
                                       stream.normal(Draw::bridge_sequential, j,
                                                     static_cast<std::uint32_t>(
                                                         cell * m + i));
                    }
                }
            }
        }
    }

    for (int k = 0; k < K; ++k)
        p.fine_increments[k] = p.cumulative[k + 1] - p.cumulative[k];
    return p;
}

double draw_initial(const Initial& ic, const RngStream& stream) {
    if (ic.is_point) return ic.value;
    return ic.sampler(stream.uniform01(Draw::initial_condition, 0));
}

DiffusionPath euler_maruyama(const ModelSpec& spec, const BrownianPath& path,
                             const TimeGrid& grid, const RngStream& stream) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    DiffusionPath d;
    d.x_values.assign(K + 1, 0.0);
    d.frozen_coarse.assign(grid.n, 0.0);

    double x = draw_initial(spec.initial, stream);
    d.x_values[0] = x;
    for (int k = 0; k < K; ++k) {
        x += spec.drift(x) * h + spec.diffusion(x) * path.fine_increments[k];
        if (!std::isfinite(x)) throw SimulationAbort(k);
        d.x_values[k + 1] = x;
    }
    for (int j = 0; j < grid.n; ++j) d.frozen_coarse[j] = d.x_values[grid.coarse_to_fine(j)];
    return d;
}

IteratedIntegrals iterated_integrals(const BrownianPath& path, const TimeGrid& grid,
                                     int j) {
    if (j < 0 || j >= grid.n) throw std::invalid_argument("iterated_integrals: bad j");
    const double dt = grid.coarse_dt();
    const double dw = path.coarse_increment(grid, j);
    return {(dw * dw - dt) / 2.0, (dw * dw * dw - 3.0 * dt * dw) / 6.0};
}

BlockGaussians sample_block_pair(const TimeGrid& grid, const RngStream& stream) {
    const int n = grid.n;
    const double dt = grid.coarse_dt();
    BlockGaussians b;
    b.dw.resize(n);
    b.J.resize(n);
    const double sd_coarse = std::sqrt(dt);
    // Var(J | dw) = dt^3/3 - (dt^2/2)^2/dt = dt^3/12.
    const double cond_sd = std::sqrt(dt * dt * dt / 12.0);
    for (int j = 0; j < n; ++j) {
        const double dw = sd_coarse * stream.normal(Draw::coarse_increment, j);
        b.dw[j] = dw;
        b.J[j] = 0.5 * dt * dw +
                 cond_sd * stream.normal(Draw::block_time_integral, j);
    }
    return b;
}

} // namespace mnx
