#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "brt/prob.hpp"

namespace brt {

// Closed-form moment evaluators. Every function here is checked against the
// exact enumeration oracle on the small grid by tests/acceptance; domain
// limits follow the formulas' index ranges, out-of-range arguments throw
// domain_error rather than extrapolate.

struct MomentReport {
    std::string statistic;  // branches | atleast | exactly | depth | position
    std::string model;      // "p" | "uniform" | "urt-limit"
    std::int64_t n = 0;
    std::int64_t k = -1;  // -1 when the statistic takes no k
    double mean = 0.0;
    std::optional<double> variance;
    // Raw variance was negative. Values in [-1e-9, 0) are rounding debris and
    // get clamped to 0; anything lower is left in place so tests can see it.
    bool variance_clamped = false;
    std::string formula;  // evaluator identifier, e.g. "branches-variance"
};

MomentReport make_report(std::string statistic, std::string model, std::int64_t n,
                         std::int64_t k, double mean, std::optional<double> variance,
                         std::string formula);

double harmonic(std::int64_t n);   // H_n
double harmonic2(std::int64_t n);  // H_n^(2)

// --- branch count (root degree) ---
double expected_branches(std::int64_t n, const ProbabilityVector& p);  // n >= 2
double expected_branches_uniform(std::int64_t n, std::int64_t a);
double expected_branches_limit(const ProbabilityVector& p);  // n -> inf
double expected_branches_limit_uniform(std::int64_t a);      // n -> inf: H_a
double variance_branches(std::int64_t n, const ProbabilityVector& p);  // n >= 3
double variance_branches_uniform(std::int64_t n, std::int64_t a);
double variance_branches_limit_n(const ProbabilityVector& p);  // n -> inf
// a -> inf at fixed n the branch statistics match the uniform recursive tree:
// mean H_{n-1}, variance H_{n-1} - H_{n-1}^(2).
double urt_branches_mean(std::int64_t n);
double urt_branches_variance(std::int64_t n);

// --- nodes with at least k descendants ---
double expected_at_least_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p);
double expected_at_least_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a);
double expected_at_least_k_urt(std::int64_t n, std::int64_t k);  // n/(k+1)
double variance_at_least_k(std::int64_t n, std::int64_t k,
                           const ProbabilityVector& p);  // n >= 2k+2
double variance_at_least_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a);
double variance_at_least_k_slope(std::int64_t k, const ProbabilityVector& p);  // lim Var/n
double variance_at_least_k_slope_uniform(std::int64_t k, std::int64_t a);
double variance_at_least_k_urt(std::int64_t n, std::int64_t k);  // a -> inf, fixed n
double urt_clt_slope(std::int64_t k);  // a -> inf then Var/n

// Mean of the single-position descendant indicator and of the product of two
// indicators gap = j-i-1 apart (0 <= gap <= k-1). Used by the covariance
// cross-check.
double at_least_indicator_mean(std::int64_t k, const ProbabilityVector& p);
double at_least_pair_mean(std::int64_t k, std::int64_t gap, const ProbabilityVector& p);

// --- nodes with exactly k descendants ---
double expected_exactly_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p);
double expected_exactly_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a);
double expected_exactly_k_urt(std::int64_t n, std::int64_t k);  // n/((k+1)(k+2))
double variance_exactly_k(std::int64_t n, std::int64_t k,
                          const ProbabilityVector& p);  // n >= 2k+4
double variance_exactly_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a);
double strong_law_limit(std::int64_t k, std::int64_t a);  // a.s. limit of X_k/n

// --- depth of node n, position of the largest label ---
double expected_depth(std::int64_t n, const ProbabilityVector& p);  // n >= 2
double expected_depth_uniform(std::int64_t n, std::int64_t a);
double expected_depth_slope(const ProbabilityVector& p);  // lim E[depth]/n = p_1
double urt_depth_mean(std::int64_t n);                    // a -> inf: H_{n-1}
double position_pmf(std::int64_t n, std::int64_t k, const ProbabilityVector& p);  // 2<=k<=n

// --- distance bounds ---
double tv_bound_general(std::int64_t n, const ProbabilityVector& p);  // n >= 3
double tv_bound_uniform(std::int64_t n, std::int64_t a);              // a >= n
double wasserstein_clt_bound(std::int64_t k, double sigma);           // sigma > 0

}  // namespace brt
