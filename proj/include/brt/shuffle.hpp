#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "brt/prob.hpp"
#include "brt/rng.hpp"
#include "brt/util.hpp"

namespace brt {

// The i.i.d. digit assignment (d_2, ..., d_n) driving an inverse shuffle of
// the cards 2..n; digits[c - 2] is the digit of card c, in [1, a].
struct DigitWord {
    std::int32_t a = 0;
    std::vector<std::int32_t> digits;

    std::int64_t n() const { return std::int64_t(digits.size()) + 1; }
};

// One-line form of the shuffle permutation: values (g(2), ..., g(n)) where
// g(c) is the deck position card c lands on; card 1 stays at position 1 and
// that fixed point is never stored. Equivalently, word() lists the positions
// in card order with the leading sentinel 1 restored.
class ShufflePermutation {
  public:
    explicit ShufflePermutation(std::vector<std::int32_t> values);

    std::int64_t n() const { return std::int64_t(values_.size()) + 1; }
    std::int32_t gamma(std::int64_t card) const { return values_[card - 2]; }
    const std::vector<std::int32_t>& values() const { return values_; }

    // Inverse one-line form: the card occupying each deck position 2..n.
    std::vector<std::int32_t> inverse() const;

    // Compact digit string ("2673845") for n <= 9, comma-separated otherwise.
    std::string to_string() const;
    // Same with the fixed point restored ("12673845").
    std::string word_string() const;

    bool operator==(const ShufflePermutation& o) const { return values_ == o.values_; }

  private:
    std::vector<std::int32_t> values_;
};

// Parses either string form. A leading '1' marks the word form (the stored
// values never contain 1); comma-separated lists work for any n.
ShufflePermutation parse_permutation(const std::string& text);

DigitWord sample_digit_word(std::int64_t n, const ProbabilityVector& p, const DigitSampler& s);

// Stable counting sort of the cards by digit; equal digits keep card order.
// That stability is what makes the construction match the shuffle model.
ShufflePermutation permutation_from_digits(const DigitWord& d);

// Forward riffle shuffle: pile sizes from n-1 i.i.d. digit draws, piles cut
// from the sorted deck in order, interleaved by dealing positions according
// to the same draws. Distributionally equal to permutation_from_digits.
ShufflePermutation sample_forward_shuffle(std::int64_t n, const ProbabilityVector& p,
                                          const DigitSampler& s);

// Number of digit words a^(n-1); throws resource_limit_error above cap.
std::uint64_t digit_word_count(std::int64_t n, std::int64_t a, std::uint64_t cap = default_enum_cap());

// Lexicographic word for a given rank (digits[0] most significant).
void decode_digit_word(std::uint64_t rank, std::int64_t n, std::int64_t a,
                       std::span<std::int32_t> out);

// Visits every digit word with its probability weight, lexicographically.
// The visitor receives (digits, weight); weights sum to 1 within 1e-10.
void enumerate_digit_words(std::int64_t n, const ProbabilityVector& p,
                           const std::function<void(std::span<const std::int32_t>, double)>& visit,
                           std::uint64_t cap = default_enum_cap());

// Exact laws for the n <= small regimes, keyed by the one-line values:
// the inverse-shuffle law of gamma, and the forward-shuffle law of the deck.
std::map<std::vector<std::int32_t>, double> exact_inverse_shuffle_law(
    std::int64_t n, const ProbabilityVector& p, std::uint64_t cap = default_enum_cap());
std::map<std::vector<std::int32_t>, double> exact_forward_shuffle_law(
    std::int64_t n, const ProbabilityVector& p, std::uint64_t cap = default_enum_cap());

namespace detail {

// Buffer-based core used by the enumeration loops; gamma_out[c-2] = position
// of card c. bucket must have size a + 2.
void gamma_from_digits_into(std::span<const std::int32_t> digits, std::int64_t a,
                            std::span<std::int32_t> gamma_out, std::span<std::int32_t> bucket);

}  // namespace detail

}  // namespace brt
