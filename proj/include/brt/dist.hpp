#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brt {

// The tree statistics with exact-enumeration and sampling support. A closed
// enumeration (rather than callbacks) so tables and reports can carry
// self-describing metadata.
enum class Statistic { branches, at_least_k, exactly_k, depth_of_n, position_of_n };

const char* statistic_name(Statistic s);  // "branches" | "atleast" | "exactly" | "depth" | "position"
Statistic statistic_from_name(const std::string& name);
bool statistic_uses_k(Statistic s);

// Exact law of one statistic under one model. support is sorted and
// duplicate-free, probabilities are nonnegative and sum to 1 within 1e-10.
struct DistributionTable {
    std::string model;           // "p" | "uniform" | "urt"
    std::int64_t n = 0;
    std::vector<double> params;  // p entries, {a} for uniform, empty for urt
    Statistic stat = Statistic::branches;
    std::int64_t k = -1;         // -1 when stat takes no k
    std::vector<std::int64_t> support;
    std::vector<double> prob;

    void validate() const;  // throws usage_error on a malformed table
    double mean() const;
    double variance() const;
    std::string statistic_label() const;  // "branches", "atleast-2", ...
    std::string to_json() const;
};

// (1/2) sum |p1(x) - p2(x)| over the union support. The tables must describe
// the same statistic at the same n.
double exact_tv_distance(const DistributionTable& d1, const DistributionTable& d2);

}  // namespace brt
