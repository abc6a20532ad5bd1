#pragma once

#include <cstdint>
#include <vector>

namespace brt {

// Probability vector p = (p_1, ..., p_a) over digit values 1..a. Every entry
// must be strictly positive and the entries must sum to 1 within 1e-12; use
// normalized() to clean up raw weights first. Prefix and suffix sums are
// precomputed because the formula evaluators consume them heavily and a can
// be as large as 10^6 in limit sweeps.
class ProbabilityVector {
  public:
    explicit ProbabilityVector(std::vector<double> weights);

    static ProbabilityVector uniform(std::int64_t a);
    // Drops zero entries and rescales the rest to sum to 1. Negative weights
    // are rejected. Note that dropping zeros renumbers the digit values.
    static ProbabilityVector normalized(std::vector<double> weights);

    std::int64_t size() const { return a_; }
    bool is_uniform() const { return uniform_; }

    // 1-based accessors matching the usual index conventions.
    double p(std::int64_t s) const { return p_[s - 1]; }
    // prefix(s) = p_1 + ... + p_s, prefix(0) = 0.
    double prefix(std::int64_t s) const { return q_[s]; }
    // suffix(s) = p_s + ... + p_a, suffix(a + 1) = 0.
    double suffix(std::int64_t s) const { return t_[s - 1]; }

    const std::vector<double>& weights() const { return p_; }
    // Cumulative prefix array Q[0..a] used by the inverse-CDF digit sampler.
    const std::vector<double>& prefix_array() const { return q_; }

  private:
    ProbabilityVector() = default;

    std::vector<double> p_;  // p_[s-1] = p_s
    std::vector<double> q_;  // q_[s] = P(digit <= s), q_[0] = 0, q_[a] = 1
    std::vector<double> t_;  // t_[s-1] = P(digit >= s), t_[a] = 0
    std::int64_t a_ = 0;
    bool uniform_ = false;
};

}  // namespace brt
