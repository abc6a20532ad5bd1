#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brt/dist.hpp"
#include "brt/prob.hpp"

namespace brt {

// Monte Carlo estimate of one statistic's mean and variance. Results are
// reproducible: each sample draws its digits from a counter stream keyed by
// (seed, sample index), and accumulation runs over fixed-size chunks merged
// in index order, so the numbers do not depend on the worker count.
struct EstimateReport {
    std::string statistic;
    std::string model;
    std::int64_t n = 0;
    std::int64_t k = -1;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::int64_t workers = 1;
    double mean = 0.0;
    double se_mean = 0.0;
    double half_width = 0.0;  // 99% confidence half-width, 2.576 * se_mean
    double variance = 0.0;    // unbiased sample variance
    double se_variance = 0.0; // moment-based standard error of the variance
    double wall_seconds = 0.0;
};

EstimateReport estimate_moments(std::int64_t n, const ProbabilityVector& p, Statistic stat,
                                std::int64_t k, std::uint64_t samples, std::uint64_t seed,
                                std::int64_t workers = 0);

// Single-threaded Welford reference for the estimator above; used to test the
// chunked accumulation.
EstimateReport estimate_moments_serial(std::int64_t n, const ProbabilityVector& p,
                                       Statistic stat, std::int64_t k, std::uint64_t samples,
                                       std::uint64_t seed);

// Kolmogorov-Smirnov test of the at-least-k count against the standard
// normal, standardized by the closed-form mean and standard deviation.
struct CltReport {
    std::string model;
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double mean_formula = 0.0;
    double sd_formula = 0.0;
    double ks = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double wall_seconds = 0.0;
};

CltReport clt_check(std::int64_t n, const ProbabilityVector& p, std::int64_t k,
                    std::uint64_t samples, std::uint64_t seed, double threshold = 0.0035,
                    std::int64_t workers = 0, std::uint64_t storage_cap = 10'000'000);

// One sampled path of the exactly-k count under the uniform a-digit model,
// reported as X_k(n)/n on a grid of n values together with the closed-form
// limit (strong_law_limit) and the running gap.
struct StrongLawRow {
    std::int64_t n = 0;
    double value = 0.0;
    double limit = 0.0;
    double gap = 0.0;
};

std::vector<StrongLawRow> strong_law_trajectory(std::int64_t k, std::int64_t a,
                                                const std::vector<std::int64_t>& n_grid,
                                                std::uint64_t seed);

// Closed-form convergence tables: evaluate a finite-n moment along a grid of
// one parameter and report the gap to its limit. Quantities:
//   branches-vs-a      E[B(n,a)] over a, limit H_{n-1}          (fixed = n)
//   branches-vs-n      E[B(n,.)] over n, limit sum p_s/Q_{s-1}  (fixed = a, or p)
//   depth-vs-a         E[D(n,a)] over a, limit H_{n-1}          (fixed = n)
//   depth-rate-vs-n    E[D(n,.)]/n over n, limit p_1            (fixed = a, or p)
//   varbranches-vs-a   Var[B(n,a)] over a, limit H_{n-1}-H2_{n-1} (fixed = n)
// When p is given it overrides the uniform model for the -vs-n quantities.
struct SweepRow {
    std::int64_t param = 0;
    double value = 0.0;
    double limit = 0.0;
    double gap = 0.0;
};

std::vector<SweepRow> convergence_sweep(const std::string& quantity,
                                        const std::vector<std::int64_t>& grid,
                                        std::int64_t fixed,
                                        const ProbabilityVector* p = nullptr);

}  // namespace brt
