#include "mnx/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "mnx/gauss_hermite.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace mnx {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MNX_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || count < 2) {
        body(0, count);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mu;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = count * w / workers;
        const std::size_t hi = count * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

MCResult run_replications(const ModelSpec& spec, const TimeGrid& grid, std::size_t N,
                          std::uint64_t master_seed, int threads,
                          const ReplicationOutputs& outputs) {
    if (N < 1) throw std::invalid_argument("run_replications: N >= 1");
    MCResult res;
    res.master_seed = master_seed;
    res.n = grid.n;
    res.R = grid.R;
    res.N = N;
    res.model_id = spec.name;

    struct Slot {
        StatisticSample stat;
        SymbolCoeffs coeffs;
        RandomSymbol symbol;
        double c_inf = 0.0, f_inf = 0.0;
        bool aborted = false;
    };
    std::vector<Slot> slots(N);
    std::atomic<std::size_t> aborted{0};

    parallel_for(N, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const RngStream stream(master_seed, static_cast<std::uint32_t>(i));
            try {
                const BrownianPath bp = sample_brownian(grid, stream);
                const DiffusionPath dp = euler_maruyama(spec, bp, grid, stream);
                Slot& s = slots[i];
                if (outputs.collect_blocks) {
                    const BlockGaussians blocks = sample_block_pair(grid, stream);
                    s.stat = compute_statistics(spec, bp, dp, grid, &blocks);
                } else if (outputs.collect_statistics) {
                    s.stat = compute_statistics(spec, bp, dp, grid, nullptr);
                }
                if (outputs.collect_coeffs) s.coeffs = wiener_coefficients(spec, dp, grid);
                if (outputs.collect_symbols) {
                    s.symbol = full_symbol_diffusion(spec, dp, bp, grid);
                    double alpha_sum = 0.0, beta_sum = 0.0;
                    for (int k = 0; k < grid.fine_count(); ++k) {
                        alpha_sum += spec.alpha(dp.x_values[k]);
                        beta_sum += spec.reference(dp.x_values[k]);
                    }
                    s.c_inf = 2.0 * alpha_sum * grid.fine_step;
                    s.f_inf = beta_sum * grid.fine_step;
                }
            } catch (const SimulationAbort&) {
                slots[i].aborted = true;
                aborted.fetch_add(1, std::memory_order_relaxed);
            }
        }
    });

    res.aborted = aborted.load();
    if (res.aborted * 1000 > N)
        throw AbortPolicyError("run_replications: abort rate above 0.1% (" +
                               std::to_string(res.aborted) + " of " +
                               std::to_string(N) + ")");

    // Fixed-order reduction: identical results for any worker count.
    res.coeffs.n = grid.n;
    for (std::size_t i = 0; i < N; ++i) {
        const Slot& s = slots[i];
        if (s.aborted) continue;
        if (outputs.collect_statistics || outputs.collect_blocks)
            res.stats.push_back(s.stat);
        if (outputs.collect_coeffs) res.coeffs.add(s.coeffs);
        if (outputs.collect_symbols) {
            res.weak.c_inf.push_back(s.c_inf);
            res.weak.f_inf.push_back(s.f_inf);
            res.weak.symbols.push_back(s.symbol);
        }
    }
    return res;
}

double chisq_oracle_cdf(double t, int n) {
    if (n < 1) throw std::invalid_argument("chisq_oracle_cdf: n >= 1");
    const double dn = n;
    if (t < -std::sqrt(dn / 2.0)) return 0.0;
    const double arg = std::max(0.0, (dn + t * std::sqrt(2.0 * dn)) / 2.0);
    return boost::math::gamma_p(dn / 2.0, arg);
}

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    if (v.empty()) return r;
    double sum = 0.0;
    for (double x : v) sum += x;
    r.mean = sum / v.size();
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / (v.size() - 1) / v.size());
    }
    return r;
}

std::vector<StudyRow> convergence_study_oracle(const std::vector<int>& n_list) {
    if (n_list.size() < 1) throw std::invalid_argument("convergence_study: empty n list");
    // a == 1: m1 = sqrt(2)/3 exactly, m2 = m3 = 0; the truth side is the
    // incomplete-gamma CDF, no MC involved.
    Moments m;
    m.m1 = std::sqrt(2.0) / 3.0;
    m.N = 1;
    std::vector<StudyRow> rows;
    for (int n : n_list) {
        double e1 = 0.0, e2 = 0.0;
        for (int i = 0; i < 81; ++i) {
            const double t = -4.0 + 8.0 * i / 80.0;
            const double oracle = chisq_oracle_cdf(t, n);
            e1 = std::max(e1, std::abs(normal_cdf(t) - oracle));
            e2 = std::max(e2, std::abs(qn_cdf(t, n, m) - oracle));
        }
        const double rn = std::sqrt(static_cast<double>(n));
        rows.push_back({n, "cdf-sup", 1, e1, rn * e1, 0.0});
        rows.push_back({n, "cdf-sup", 2, e2, rn * e2, 0.0});
    }
    return rows;
}

std::vector<StudyRow> convergence_study_mc(const ModelSpec& spec,
                                           const std::vector<int>& n_list, int R,
                                           std::size_t N, std::uint64_t seed,
                                           int threads,
                                           const std::vector<std::string>& f_names) {
    std::vector<StudyRow> rows;
    for (int n : n_list) {
        const TimeGrid grid = build_grid(n, R);
        ReplicationOutputs out;
        out.collect_statistics = true;
        out.collect_coeffs = true;
        const MCResult mc = run_replications(spec, grid, N, seed, threads, out);
        const Moments moments = coefficient_moments(mc.coeffs);
        const double rn = std::sqrt(static_cast<double>(n));

        for (const auto& fname : f_names) {
            const TestFunction f = test_function(fname);
            // Studentized statistic per path.
            std::vector<double> samples;
            samples.reserve(mc.stats.size());
            for (const auto& s : mc.stats)
                samples.push_back(f.eval(s.m1n / std::sqrt(s.f_n), 0.0, 0, 0));
            const MeanSe emp = mean_se(samples);

            // Predictions by Gauss-Hermite quadrature against q_n and phi.
            const double first = gh_gaussian_integral(
                [&](double z) { return f.eval(z, 0.0, 0, 0); }, 1.0);
            const double corr = gh_gaussian_integral(
                [&](double z) {
                    return f.eval(z, 0.0, 0, 0) *
                           (moments.m1 * (z * z * z - 3.0 * z) +
                            (12.0 * moments.m2 - 2.0 * moments.m3) * z);
                },
                1.0);
            const double second = first + corr / rn;

            // SE of the residual estimate: MC error of the empirical mean
            // plus the moment-induced error of the prediction.
            const double corr1 = gh_gaussian_integral(
                [&](double z) { return f.eval(z, 0.0, 0, 0) * (z * z * z - 3.0 * z); },
                1.0);
            const double corrz = gh_gaussian_integral(
                [&](double z) { return f.eval(z, 0.0, 0, 0) * z; }, 1.0);
            const double pred_se =
                std::sqrt(corr1 * corr1 * moments.se1 * moments.se1 +
                          corrz * corrz * (144.0 * moments.se2 * moments.se2 +
                                           4.0 * moments.se3 * moments.se3)) /
                rn;
            const double se = std::sqrt(emp.se * emp.se + pred_se * pred_se);

            rows.push_back({n, fname, 1, std::abs(emp.mean - first),
                            rn * std::abs(emp.mean - first), rn * emp.se});
            rows.push_back({n, fname, 2, std::abs(emp.mean - second),
                            rn * std::abs(emp.mean - second), rn * se});
        }
    }
    return rows;
}

std::vector<ResidualRow> expansion_residual(const ModelSpec& spec,
                                            const std::vector<int>& n_list, int R,
                                            std::size_t N, std::uint64_t seed,
                                            int threads) {
    std::vector<ResidualRow> rows;
    for (int n : n_list) {
        const TimeGrid grid = build_grid(n, R);
        ReplicationOutputs out;
        out.collect_statistics = true;
        out.collect_blocks = true;
        const MCResult mc = run_replications(spec, grid, N, seed, threads, out);
        const double rn = std::sqrt(static_cast<double>(n));
        std::vector<double> sq;
        sq.reserve(mc.stats.size());
        for (const auto& s : mc.stats) {
            const double res = s.z_n - s.m1n - s.n_n / rn;
            sq.push_back(n * res * res); // (sqrt(n) res)^2
        }
        const MeanSe ms = mean_se(sq);
        ResidualRow row;
        row.n = n;
        row.R = R;
        row.scaled_rms = std::sqrt(ms.mean);
        // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
        row.se = ms.mean > 0.0 ? ms.se / (2.0 * std::sqrt(ms.mean)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace mnx
