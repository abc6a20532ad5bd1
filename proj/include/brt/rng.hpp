#pragma once

#include <cstdint>
#include <span>

#include "brt/prob.hpp"

namespace brt {

// splitmix64 finalizer: a bijective mixer with good avalanche behavior.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, index). Used to give every
// Monte Carlo sample its own stream, so a sample's digits depend only on
// (seed, sample index) and never on worker scheduling.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed ^ 0xd2b74407b1ce6e93ULL;
    z = mix64(z + (index + 1) * 0x9e3779b97f4a7c15ULL);
    return mix64(z);
}

// Counter-based generator: the j-th output is a pure function of (seed, j),
// so any position of the stream can be read in O(1) and in any order.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : base_(seed) {}

    std::uint64_t at(std::uint64_t j) const {
        return mix64(base_ + (j + 1) * 0x9e3779b97f4a7c15ULL);
    }

    // Retry stream for rejection sampling at slot j: attempt 0 equals at(j).
    std::uint64_t at(std::uint64_t j, std::uint64_t attempt) const {
        return mix64(base_ + (j + 1) * 0x9e3779b97f4a7c15ULL +
                     attempt * 0xd6e8feb86659fd93ULL);
    }

    std::uint64_t seed() const { return base_; }

  private:
    std::uint64_t base_;
};

inline double to_unit_interval(std::uint64_t x) {
    return double(x >> 11) * 0x1.0p-53;  // [0, 1)
}

// Draws digits in [1, a] indexed by slot. Uniform laws use Lemire's bounded
// rejection (exactly uniform); general laws use inverse-CDF lookup on the
// prefix sums. The referenced ProbabilityVector must outlive the sampler.
class DigitSampler {
  public:
    DigitSampler(std::uint64_t stream_seed, const ProbabilityVector& p)
        : rng_(stream_seed),
          prefix_(p.prefix_array().data()),
          a_(p.size()),
          uniform_(p.is_uniform()),
          reject_below_(uniform_ ? (-std::uint64_t(p.size())) % std::uint64_t(p.size()) : 0) {}

    std::int32_t at(std::uint64_t j) const {
        if (uniform_) {
            for (std::uint64_t attempt = 0;; ++attempt) {
                std::uint64_t x = rng_.at(j, attempt);
                unsigned __int128 m = static_cast<unsigned __int128>(x) * std::uint64_t(a_);
                if (static_cast<std::uint64_t>(m) >= reject_below_)
                    return std::int32_t(std::uint64_t(m >> 64)) + 1;
            }
        }
        double u = to_unit_interval(rng_.at(j));
        // First s with u < prefix(s); linear scan wins for the small a used
        // with explicit p lists, binary search covers the rest.
        if (a_ <= 16) {
            for (std::int64_t s = 1; s < a_; ++s)
                if (u < prefix_[s]) return std::int32_t(s);
            return std::int32_t(a_);
        }
        std::int64_t lo = 1, hi = a_;
        while (lo < hi) {
            std::int64_t mid = (lo + hi) / 2;
            if (u < prefix_[mid]) hi = mid; else lo = mid + 1;
        }
        return std::int32_t(lo);
    }

    void fill(std::span<std::int32_t> out) const {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = at(j);
    }

  private:
    CounterRng rng_;
    const double* prefix_;
    std::int64_t a_;
    bool uniform_;
    std::uint64_t reject_below_;
};

}  // namespace brt
