#include "mnx/malliavin.hpp"

#include <cmath>

namespace mnx {

namespace {

FlowSlice solve_slice(const ModelSpec& spec, const DiffusionPath& dpath,
                      const BrownianPath& path, const TimeGrid& grid, int s_index) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    FlowSlice sl;
    sl.s_index = s_index;
    const int len = K - s_index + 1;
    sl.first.resize(len);
    sl.second_diag.resize(len);

    const double xs = dpath.x_values[s_index];
    double y = spec.diffusion(xs);
    double v = spec.diffusion_d1(xs) * y; // lim_{r -> s} of sigma'(X_s) D_r X_s
    sl.first[0] = y;
    sl.second_diag[0] = v;
    for (int k = s_index; k < K; ++k) {
        const double x = dpath.x_values[k];
        const double b1 = spec.drift_d1(x);
        const double s1 = spec.diffusion_d1(x);
        const double dw = path.fine_increments[k];
        const double b2 = spec.drift_d2(x);
        const double s2 = spec.diffusion_d2(x);
        const double y_new = y + b1 * y * h + s1 * y * dw;
        const double v_new = v + (b2 * y * y + b1 * v) * h + (s2 * y * y + s1 * v) * dw;
        if (!std::isfinite(y_new) || !std::isfinite(v_new))
            throw SimulationAbort(k);
        y = y_new;
        v = v_new;
        sl.first[k + 1 - s_index] = y;
        sl.second_diag[k + 1 - s_index] = v;
    }
    return sl;
}

} // namespace

DerivativeFlow first_flow(const ModelSpec& spec, const DiffusionPath& dpath,
                          const BrownianPath& path, const TimeGrid& grid,
                          const std::vector<int>& s_indices) {
    DerivativeFlow flow;
    flow.slices.reserve(s_indices.size());
    for (int s : s_indices) flow.slices.push_back(solve_slice(spec, dpath, path, grid, s));
    return flow;
}

DerivativeFlow first_flow(const ModelSpec& spec, const DiffusionPath& dpath,
                          const BrownianPath& path, const TimeGrid& grid) {
    std::vector<int> s_indices;
    if (grid.fine_count() <= 4096) {
        s_indices.resize(grid.fine_count());
        for (int k = 0; k < grid.fine_count(); ++k) s_indices[k] = k;
    } else {
        s_indices.resize(grid.n);
        for (int j = 0; j < grid.n; ++j) s_indices[j] = grid.coarse_to_fine(j);
    }
    return first_flow(spec, dpath, path, grid, s_indices);
}

std::vector<double> second_flow_pair(const ModelSpec& spec, const DiffusionPath& dpath,
                                     const BrownianPath& path, const TimeGrid& grid,
                                     const FlowSlice& r_slice, int s_index) {
    if (s_index < r_slice.s_index)
        throw std::invalid_argument("second_flow_pair: requires r <= s");
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    // D_s X solved alongside; both enter the drift and diffusion of D_r D_s X.
    const double xs = dpath.x_values[s_index];
    double ys = spec.diffusion(xs);                    // D_s X_t
    double v = spec.diffusion_d1(xs) * r_slice.d1(s_index); // D_r D_s X_t
    std::vector<double> out(K - s_index + 1);
    out[0] = v;
    for (int k = s_index; k < K; ++k) {
        const double x = dpath.x_values[k];
        const double b1 = spec.drift_d1(x), b2 = spec.drift_d2(x);
        const double s1 = spec.diffusion_d1(x), s2 = spec.diffusion_d2(x);
        const double dw = path.fine_increments[k];
        const double yr = r_slice.d1(k);
        const double v_new =
            v + (b2 * yr * ys + b1 * v) * h + (s2 * yr * ys + s1 * v) * dw;
        ys += b1 * ys * h + s1 * ys * dw;
        v = v_new;
        if (!std::isfinite(v) || !std::isfinite(ys)) throw SimulationAbort(k);
        out[k + 1 - s_index] = v;
    }
    return out;
}

TailIntegrals wiener_tail_integrals(const ModelSpec& spec, const DiffusionPath& dpath,
                                    const TimeGrid& grid) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    TailIntegrals t;
    t.T1.assign(K + 1, 0.0);
    t.T2.assign(K + 1, 0.0);
    double acc1 = 0.0, acc2 = 0.0;
    for (int k = K - 1; k >= 0; --k) {
        const auto ad = spec.a_derivs(dpath.x_values[k]);
        acc1 += ad.a * ad.a1;
        acc2 += ad.a * ad.a2 + ad.a1 * ad.a1;
        t.T1[k] = acc1 * h;
        t.T2[k] = acc2 * h;
    }
    return t;
}

TailPoint wiener_tail_integrals_at(const ModelSpec& spec, const DiffusionPath& dpath,
                                   const TimeGrid& grid, int t_index) {
    const int K = grid.fine_count();
    const double h = grid.fine_step;
    double acc1 = 0.0, acc2 = 0.0;
    for (int k = t_index; k < K; ++k) {
        const auto ad = spec.a_derivs(dpath.x_values[k]);
        acc1 += ad.a * ad.a1;
        acc2 += ad.a * ad.a2 + ad.a1 * ad.a1;
    }
    return {acc1 * h, acc2 * h};
}

} // namespace mnx
