#include "brt/shuffle.hpp"

#include <algorithm>
#include <sstream>

#include "brt/errors.hpp"

namespace brt {

namespace detail {

void gamma_from_digits_into(std::span<const std::int32_t> digits, std::int64_t a,
                            std::span<std::int32_t> gamma_out, std::span<std::int32_t> bucket) {
    // Counting sort, stable by card label: bucket[v] ends up holding the next
    // free deck position for digit value v. Positions start at 2 because card
    // 1 keeps position 1.
    std::fill(bucket.begin(), bucket.begin() + a + 2, 0);
    for (std::int32_t d : digits) ++bucket[d + 1];
    std::int32_t pos = 2;
    for (std::int64_t v = 1; v <= a; ++v) {
        std::int32_t cnt = bucket[v + 1];
        bucket[v + 1] = pos;
        pos += cnt;
    }
    for (std::size_t i = 0; i < digits.size(); ++i)
        gamma_out[i] = bucket[digits[i] + 1]++;
}

}  // namespace detail

ShufflePermutation::ShufflePermutation(std::vector<std::int32_t> values)
    : values_(std::move(values)) {
    std::int64_t n = std::int64_t(values_.size()) + 1;
    if (n < 2) throw usage_error("shuffle permutation needs n >= 2");
    std::vector<bool> seen(n + 1, false);
    for (std::int32_t v : values_) {
        if (v < 2 || v > n || seen[v])
            throw usage_error("one-line values must be a permutation of 2..n");
        seen[v] = true;
    }
}

std::vector<std::int32_t> ShufflePermutation::inverse() const {
    std::vector<std::int32_t> inv(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        inv[values_[i] - 2] = std::int32_t(i) + 2;
    return inv;
}

namespace {

std::string format_values(const std::vector<std::int32_t>& vals, bool lead_one) {
    std::ostringstream out;
    std::int64_t n = std::int64_t(vals.size()) + 1;
    if (n <= 9) {
        if (lead_one) out << 1;
        for (std::int32_t v : vals) out << v;
    } else {
        if (lead_one) out << "1,";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out << ',';
            out << vals[i];
        }
    }
    return out.str();
}

}  // namespace

std::string ShufflePermutation::to_string() const { return format_values(values_, false); }
std::string ShufflePermutation::word_string() const { return format_values(values_, true); }

ShufflePermutation parse_permutation(const std::string& text) {
    if (text.empty()) throw usage_error("empty permutation string");
    std::vector<std::int32_t> vals;
    if (text.find(',') != std::string::npos) {
        std::istringstream in(text);
        std::string tok;
        while (std::getline(in, tok, ','))
            vals.push_back(std::int32_t(std::stol(tok)));
    } else {
        for (char c : text) {
            if (c < '1' || c > '9') throw usage_error("permutation digit strings use 1..9 only");
            vals.push_back(c - '0');
        }
    }
    if (!vals.empty() && vals[0] == 1) vals.erase(vals.begin());  // word form sentinel
    return ShufflePermutation(std::move(vals));
}

DigitWord sample_digit_word(std::int64_t n, const ProbabilityVector& p, const DigitSampler& s) {
    if (n < 2) throw usage_error("digit word needs n >= 2");
    DigitWord w;
    w.a = std::int32_t(p.size());
    w.digits.resize(n - 1);
    s.fill(w.digits);
    return w;
}

ShufflePermutation permutation_from_digits(const DigitWord& d) {
    std::vector<std::int32_t> gamma(d.digits.size());
    std::vector<std::int32_t> bucket(d.a + 2);
    detail::gamma_from_digits_into(d.digits, d.a, gamma, bucket);
    return ShufflePermutation(std::move(gamma));
}

namespace {

// Deals the sorted deck 2..n according to a slot word: pile sizes are the
// digit-value counts, piles keep deck order, slot j's digit says which pile
// the card at position j+2 comes from.
std::vector<std::int32_t> deal_forward(std::span<const std::int32_t> slots, std::int64_t a) {
    std::int64_t m = std::int64_t(slots.size());
    std::vector<std::int32_t> next(a + 1, 0);
    for (std::int32_t s : slots) ++next[s];
    std::int32_t start = 2;
    for (std::int64_t v = 1; v <= a; ++v) {
        std::int32_t cnt = next[v];
        next[v] = start;
        start += cnt;
    }
    std::vector<std::int32_t> deck(m);
    for (std::int64_t j = 0; j < m; ++j) deck[j] = next[slots[j]]++;
    return deck;
}

}  // namespace

ShufflePermutation sample_forward_shuffle(std::int64_t n, const ProbabilityVector& p,
                                          const DigitSampler& s) {
    if (n < 2) throw usage_error("forward shuffle needs n >= 2");
    std::vector<std::int32_t> slots(n - 1);
    s.fill(slots);
    return ShufflePermutation(deal_forward(slots, p.size()));
}

std::uint64_t digit_word_count(std::int64_t n, std::int64_t a, std::uint64_t cap) {
    if (n < 2 || a < 1) throw usage_error("digit word enumeration needs n >= 2, a >= 1");
    std::uint64_t count = 1;
    for (std::int64_t i = 0; i < n - 1; ++i) {
        if (count > cap / std::uint64_t(a) + 1) count = cap + 1;  // saturate, avoid overflow
        else count *= std::uint64_t(a);
        if (count > cap) {
            throw resource_limit_error(
                "enumerating " + std::to_string(a) + "^" + std::to_string(n - 1) +
                " digit words exceeds the cap of " + std::to_string(cap) +
                " (override with BRT_ENUM_CAP or --cap)");
        }
    }
    return count;
}

void decode_digit_word(std::uint64_t rank, std::int64_t n, std::int64_t a,
                       std::span<std::int32_t> out) {
    for (std::int64_t i = n - 2; i >= 0; --i) {
        out[i] = std::int32_t(rank % std::uint64_t(a)) + 1;
        rank /= std::uint64_t(a);
    }
}

void enumerate_digit_words(std::int64_t n, const ProbabilityVector& p,
                           const std::function<void(std::span<const std::int32_t>, double)>& visit,
                           std::uint64_t cap) {
    std::uint64_t total = digit_word_count(n, p.size(), cap);
    std::int64_t m = n - 1;
    std::vector<std::int32_t> digits(m, 1);
    // pref[i] = product of p(digits[0..i]); only suffixes change on carry.
    std::vector<double> pref(m);
    auto rebuild_from = [&](std::int64_t i) {
        for (; i < m; ++i) pref[i] = (i ? pref[i - 1] : 1.0) * p.p(digits[i]);
    };
    rebuild_from(0);
    for (std::uint64_t r = 0;; ++r) {
        visit(digits, pref[m - 1]);
        if (r + 1 == total) break;
        std::int64_t i = m - 1;
        while (digits[i] == p.size()) digits[i--] = 1;
        ++digits[i];
        rebuild_from(i);
    }
}

std::map<std::vector<std::int32_t>, double> exact_inverse_shuffle_law(
    std::int64_t n, const ProbabilityVector& p, std::uint64_t cap) {
    std::map<std::vector<std::int32_t>, double> law;
    std::vector<std::int32_t> gamma(n - 1);
    std::vector<std::int32_t> bucket(p.size() + 2);
    enumerate_digit_words(n, p, [&](std::span<const std::int32_t> d, double w) {
        detail::gamma_from_digits_into(d, p.size(), gamma, bucket);
        law[gamma] += w;
    }, cap);
    return law;
}

std::map<std::vector<std::int32_t>, double> exact_forward_shuffle_law(
    std::int64_t n, const ProbabilityVector& p, std::uint64_t cap) {
    std::map<std::vector<std::int32_t>, double> law;
    enumerate_digit_words(n, p, [&](std::span<const std::int32_t> slots, double w) {
        law[deal_forward(slots, p.size())] += w;
    }, cap);
    return law;
}

}  // namespace brt
