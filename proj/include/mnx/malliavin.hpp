#pragma once

#include <vector>

#include "mnx/model.hpp"
#include "mnx/paths.hpp"

namespace mnx {

// First and second Malliavin derivative flows of the diffusion, Euler-solved
// in t on the same fine grid and driving increments as the path.
//
// Storage: one slice per materialized s. The full lower-triangular matrix
// (all fine s) is only kept when n*R <= 4096; above that only the coarse-grid
// s values needed by the diagonal symbol are materialized.
struct FlowSlice {
    int s_index = 0;                 // fine index of s
    std::vector<double> first;       // D_s X_t for t = s..K (offset by s_index)
    std::vector<double> second_diag; // D_s D_s X_t for t = s..K

    double d1(int t_index) const {
        return t_index < s_index ? 0.0 : first[t_index - s_index];
    }
    double d2(int t_index) const {
        return t_index < s_index ? 0.0 : second_diag[t_index - s_index];
    }
};

struct DerivativeFlow {
    std::vector<FlowSlice> slices; // ordered by s_index

    const FlowSlice* slice_at(int s_index) const {
        for (const auto& s : slices)
            if (s.s_index == s_index) return &s;
        return nullptr;
    }
};

// D_s X_t = sigma(X_s) + int_s^t b'(X)D_sX du + int_s^t sigma'(X)D_sX dw.
// The diagonal D_s D_s X_t is seeded with sigma'(X_s) sigma(X_s), the limit
// r -> s of the off-diagonal seed.
DerivativeFlow first_flow(const ModelSpec& spec, const DiffusionPath& dpath,
                          const BrownianPath& path, const TimeGrid& grid,
                          const std::vector<int>& s_indices);

// Default s set per the storage rule above.
DerivativeFlow first_flow(const ModelSpec& spec, const DiffusionPath& dpath,
                          const BrownianPath& path, const TimeGrid& grid);

// Off-diagonal second derivative for one (r, s) pair, r <= s:
// D_r D_s X_t for t = s..K, seeded with sigma'(X_s) D_r X_s.
std::vector<double> second_flow_pair(const ModelSpec& spec, const DiffusionPath& dpath,
                                     const BrownianPath& path, const TimeGrid& grid,
                                     const FlowSlice& r_slice, int s_index);

// Wiener-case tail integrals over the fine grid:
//   T1(t) = int_t^1 (a a')(w_nu) dnu,
//   T2(t) = int_t^1 (a a'' + a'^2)(w_nu) dnu.
struct TailIntegrals {
    std::vector<double> T1; // per fine node, suffix left-Riemann sums
    std::vector<double> T2;
};

TailIntegrals wiener_tail_integrals(const ModelSpec& spec, const DiffusionPath& dpath,
                                    const TimeGrid& grid);

// Point evaluation at fine index of t.
struct TailPoint {
    double T1;
    double T2;
};
TailPoint wiener_tail_integrals_at(const ModelSpec& spec, const DiffusionPath& dpath,
                                   const TimeGrid& grid, int t_index);

} // namespace mnx
