#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mnx/model.hpp"
#include "mnx/rng.hpp"

namespace mnx {

// Uniform two-level grid on [0,1]: n coarse intervals, R fine steps per
// coarse interval. The fine grid is the simulation truth; coarse statistics
// and limit quantities share one path.
struct TimeGrid {
    int n = 2;
    int R = 1;
    double fine_step = 0.0;

    int fine_count() const { return n * R; }
    double coarse_dt() const { return 1.0 / n; }
    double coarse_time(int j) const { return static_cast<double>(j) / n; }
    int coarse_to_fine(int j) const { return j * R; }
    std::vector<double> coarse_times() const {
        std::vector<double> t(n + 1);
        for (int j = 0; j <= n; ++j) t[j] = coarse_time(j);
        return t;
    }
};

TimeGrid build_grid(int n, int R);

// Brownian path on the fine grid. Values are generated hierarchically
// (coarse increments first, then bridge refinement), so a path sampled at
// (n, 2R) refines rather than resamples the one at (n, R): coarse increments
// always agree, and for power-of-two R all shared fine nodes agree.
struct BrownianPath {
    std::vector<double> fine_increments; // size n*R
    std::vector<double> cumulative;      // size n*R + 1, cumulative[0] = 0
    std::vector<double> coarse_draws;    // the n coarse increments as drawn
    std::uint32_t seed_id = 0;           // replication index of the stream

    // The stored draw: bit-identical to the dw marginal of a block pair from
    // the same stream, and R-independent.
    double coarse_increment(const TimeGrid&, int j) const { return coarse_draws[j]; }
};

BrownianPath sample_brownian(const TimeGrid& grid, const RngStream& stream);

struct SimulationAbort : std::runtime_error {
    int step;
    explicit SimulationAbort(int k)
        : std::runtime_error("non-finite state at fine step " + std::to_string(k)),
          step(k) {}
};

struct DiffusionPath {
    std::vector<double> x_values;     // size n*R + 1
    std::vector<double> frozen_coarse; // X_{t_{j-1}}, size n
};

// Explicit Euler scheme on the fine grid. Throws SimulationAbort on
// non-finite state.
DiffusionPath euler_maruyama(const ModelSpec& spec, const BrownianPath& path,
                             const TimeGrid& grid, const RngStream& stream);

// Exact per-interval iterated integrals as functions of the coarse increment:
// I11 = (dw^2 - dt)/2, I111 = (dw^3 - 3 dt dw)/6.
struct IteratedIntegrals {
    double I11;
    double I111;
};

IteratedIntegrals iterated_integrals(const BrownianPath& path, const TimeGrid& grid,
                                     int j);

// Per coarse interval: the increment and J = int_{I_j} (s - t_{j-1}) dw_s,
// jointly Gaussian with covariance [[dt, dt^2/2], [dt^2/2, dt^3/3]]. With the
// same stream as a BrownianPath, the dw marginal equals that path's coarse
// increments (coupled mode).
struct BlockGaussians {
    std::vector<double> dw;
    std::vector<double> J;
};

BlockGaussians sample_block_pair(const TimeGrid& grid, const RngStream& stream);

double draw_initial(const Initial& ic, const RngStream& stream);

} // namespace mnx
