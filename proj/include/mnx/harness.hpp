#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mnx/density.hpp"
#include "mnx/functionals.hpp"
#include "mnx/model.hpp"
#include "mnx/paths.hpp"

namespace mnx {

// Deterministic replication-parallel map: workers fill disjoint slots and the
// caller reduces in index order, so results never depend on thread count.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

int resolve_threads(int requested);

struct AbortPolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReplicationOutputs {
    bool collect_statistics = true;
    bool collect_coeffs = false;      // Wiener c0..c3
    bool collect_blocks = false;      // enables N_n
    bool collect_symbols = false;     // full per-path symbol tables (diffusion route)
};

// One full sweep at a fixed grid. Aborted replications (non-finite states)
// are counted; more than 0.1% aborts fails the run.
struct MCResult {
    std::vector<StatisticSample> stats;
    CoeffStore coeffs;
    WeakFormStore weak;
    std::uint64_t master_seed = 0;
    int n = 0, R = 0;
    std::size_t N = 0;
    std::size_t aborted = 0;
    std::string model_id;
};

MCResult run_replications(const ModelSpec& spec, const TimeGrid& grid, std::size_t N,
                          std::uint64_t master_seed, int threads,
                          const ReplicationOutputs& outputs);

// Exact CDF of T = (chi2_n - n) / sqrt(2n): regularized lower incomplete
// gamma P(n/2, (n + t sqrt(2n))/2); 0 below the support edge.
double chisq_oracle_cdf(double t, int n);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& v);

// Error-decay table entries. In oracle mode (constant a) the truth side is
// the chi-square CDF on an 81-point grid over [-4, 4]; in MC mode the truth
// side is E_MC[f(T)] for the studentized statistic.
struct StudyRow {
    int n = 0;
    std::string f;
    int order = 0;       // 1 = first-order prediction, 2 = second-order
    double error = 0.0;  // |E_MC - prediction| or CDF sup-error
    double scaled_error = 0.0; // sqrt(n) * error
    double se = 0.0;     // MC standard error of the error estimate (0 in oracle mode)
};

std::vector<StudyRow> convergence_study_oracle(const std::vector<int>& n_list);

std::vector<StudyRow> convergence_study_mc(const ModelSpec& spec,
                                           const std::vector<int>& n_list, int R,
                                           std::size_t N, std::uint64_t seed,
                                           int threads,
                                           const std::vector<std::string>& f_names);

// sqrt(n) * RMS(Z_n - M_1^n - n^{-1/2} N_n) with its standard error.
struct ResidualRow {
    int n = 0;
    int R = 0;
    double scaled_rms = 0.0;
    double se = 0.0;
};

std::vector<ResidualRow> expansion_residual(const ModelSpec& spec,
                                            const std::vector<int>& n_list, int R,
                                            std::size_t N, std::uint64_t seed,
                                            int threads);

} // namespace mnx
