#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "brt/dist.hpp"
#include "brt/prob.hpp"
#include "brt/util.hpp"

namespace brt {

// Exact statistic law under the digit model, by enumerating all a^(n-1)
// digit words and pushing each through the full pipeline (digits -> deck
// positions -> tree -> statistic). The word index space is split into 64
// fixed blocks enumerated independently (OpenMP) and merged in block order,
// so the result does not depend on the worker count. k is ignored for
// statistics that take none.
DistributionTable exact_brt_distribution(std::int64_t n, const ProbabilityVector& p,
                                         Statistic stat, std::int64_t k = -1,
                                         std::uint64_t cap = default_enum_cap(),
                                         std::int64_t workers = 0);

// Single-pass single-threaded reference for the same law; the parallel
// version is tested against it (1e-12, values differ only by reassociation).
DistributionTable exact_brt_distribution_serial(std::int64_t n, const ProbabilityVector& p,
                                                Statistic stat, std::int64_t k = -1,
                                                std::uint64_t cap = default_enum_cap());

// Exact statistic law of the uniform recursive tree: a uniform average over
// all (n-1)! one-line words, each giving a distinct increasing tree.
DistributionTable exact_urt_distribution(std::int64_t n, Statistic stat, std::int64_t k = -1,
                                         std::uint64_t cap = default_enum_cap());

// Exact law of the whole tree, keyed by parent array.
std::map<std::vector<std::int32_t>, double> exact_tree_law(
    std::int64_t n, const ProbabilityVector& p, std::uint64_t cap = default_enum_cap());

// Same under the uniform recursive tree (every one-line word equally likely;
// the map is uniform over all (n-1)! increasing trees).
std::map<std::vector<std::int32_t>, double> exact_urt_tree_law(
    std::int64_t n, std::uint64_t cap = default_enum_cap());

// Total variation distance between two tree laws: half the L1 gap over the
// union of their supports.
double tree_law_tv(const std::map<std::vector<std::int32_t>, double>& lhs,
                   const std::map<std::vector<std::int32_t>, double>& rhs);

// Pairwise product moments of the descendant-window indicators: the closed
// form against exhaustive enumeration, for every dependent pair
// 2 <= i < j <= i+k with i+k <= n-k.
struct CovariancePair {
    std::int64_t i = 0;
    std::int64_t j = 0;
    double enumerated = 0.0;
    double closed = 0.0;
};

struct CovarianceReport {
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::vector<CovariancePair> pairs;
    double max_abs_err = 0.0;
};

CovarianceReport oracle_covariance_check(std::int64_t n, std::int64_t k,
                                         const ProbabilityVector& p,
                                         std::uint64_t cap = default_enum_cap());

}  // namespace brt
