#include "brt/stats.hpp"

#include "brt/errors.hpp"

namespace brt {

std::int64_t count_branches(const RecursiveTree& t) {
    std::int64_t c = 0;
    for (std::int32_t p : t.parent_array())
        if (p == 1) ++c;
    return c;
}

std::int64_t count_anti_records(const ShufflePermutation& g) {
    std::int64_t c = 0;
    std::int32_t mn = 0;
    for (std::int32_t v : g.values()) {
        if (c == 0 || v < mn) {
            ++c;
            mn = v;
        }
    }
    return c;
}

std::vector<std::int64_t> descendant_counts(const RecursiveTree& t) {
    std::int64_t n = t.n();
    std::vector<std::int64_t> size(n + 1, 1);
    size[0] = 0;
    for (std::int64_t i = n; i >= 2; --i) size[t.parent(i)] += size[i];
    for (std::int64_t v = 1; v <= n; ++v) --size[v];
    return size;
}

std::int64_t count_at_least_k(const RecursiveTree& t, std::int64_t k) {
    if (k < 0) throw usage_error("k must be nonnegative");
    if (k > t.n() - 1) return 0;
    if (k == 0) return t.n();
    auto d = descendant_counts(t);
    std::int64_t c = 0;
    for (std::int64_t v = 1; v <= t.n(); ++v)
        if (d[v] >= k) ++c;
    return c;
}

std::int64_t count_exactly_k(const RecursiveTree& t, std::int64_t k) {
    if (k < 0) throw usage_error("k must be nonnegative");
    auto d = descendant_counts(t);
    std::int64_t c = 0;
    for (std::int64_t v = 1; v <= t.n(); ++v)
        if (d[v] == k) ++c;
    return c;
}

std::int64_t depth_of_node_n(const RecursiveTree& t) {
    std::int64_t d = 0;
    std::int64_t v = t.n();
    while (v != 1) {
        v = t.parent(v);
        ++d;
    }
    return d;
}

std::int64_t depth_via_antirecords(const ShufflePermutation& g) {
    const auto& vals = g.values();
    std::int64_t n = g.n();
    std::int64_t pos = 0;
    while (vals[pos] != n) ++pos;
    std::int64_t cnt = 1;  // the root is always an ancestor
    std::int32_t mn = vals[pos];
    for (std::int64_t i = pos - 1; i >= 0; --i) {
        if (vals[i] < mn) {
            ++cnt;
            mn = vals[i];
        }
    }
    return cnt;
}

std::int64_t position_of_n(const ShufflePermutation& g) {
    std::int64_t n = g.n();
    for (std::int64_t c = 2; c <= n; ++c)
        if (g.gamma(c) == n) return c;
    throw usage_error("malformed permutation: value n missing");
}

std::vector<std::int64_t> all_depths(const RecursiveTree& t) {
    std::int64_t n = t.n();
    std::vector<std::int64_t> depth(n + 1, 0);
    for (std::int64_t i = 2; i <= n; ++i) depth[i] = depth[t.parent(i)] + 1;
    return depth;
}

TreeStatistics compute_statistics(const RecursiveTree& t, const ShufflePermutation& g) {
    TreeStatistics s;
    s.branches = count_branches(t);
    s.subtree_sizes = descendant_counts(t);
    s.depth_of_n = depth_of_node_n(t);
    s.position_of_n = position_of_n(g);
    return s;
}

namespace stream {

std::int64_t branches(std::span<const std::int32_t> digits) {
    if (digits.empty()) return 0;  // n = 1 has no tree edges; callers use n >= 2
    std::int64_t c = 1;
    std::int32_t mn = digits[0];
    for (std::size_t i = 1; i < digits.size(); ++i) {
        if (digits[i] < mn) {
            ++c;
            mn = digits[i];
        }
    }
    return c;
}

std::int64_t at_least_k(std::span<const std::int32_t> digits, std::int64_t k) {
    std::int64_t n = std::int64_t(digits.size()) + 1;
    if (k < 0) throw usage_error("k must be nonnegative");
    if (k > n - 1) return 0;
    if (k == 0) return n;
    // Card c has >= k descendants iff c <= n-k and its digit is <= the next k
    // digits. The root always qualifies.
    std::int64_t c = 1;
    for (std::int64_t card = 2; card <= n - k; ++card) {
        std::int32_t d = digits[card - 2];
        bool ok = true;
        for (std::int64_t j = card - 1; j < card - 1 + k; ++j) {
            if (digits[j] < d) {
                ok = false;
                break;
            }
        }
        if (ok) ++c;
    }
    return c;
}

std::int64_t exactly_k(std::span<const std::int32_t> digits, std::int64_t k) {
    return at_least_k(digits, k) - at_least_k(digits, k + 1);
}

std::int64_t position_of_n(std::span<const std::int32_t> digits) {
    // Deck position n is taken by the last card holding the maximum digit.
    std::int32_t mx = 0;
    std::int64_t where = 0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] >= mx) {
            mx = digits[i];
            where = std::int64_t(i);
        }
    }
    return where + 2;
}

std::int64_t depth_of_n(std::span<const std::int32_t> digits) {
    std::int64_t cstar = position_of_n(digits);
    if (cstar == 2) return 1;
    // Ancestors of node n: the root, card cstar-1 (nothing between it and
    // cstar), and every card 2..cstar-2 whose digit is <= all later digits
    // before cstar. Right-to-left scan with a running minimum.
    std::int64_t cnt = 2;
    std::int32_t mn = digits[cstar - 3];  // digit of card cstar-1
    for (std::int64_t card = cstar - 2; card >= 2; --card) {
        std::int32_t d = digits[card - 2];
        if (d <= mn) ++cnt;
        if (d < mn) mn = d;
    }
    return cnt;
}

}  // namespace stream

std::int64_t eval_statistic_from_gamma(Statistic stat, std::int64_t k,
                                       std::span<const std::int32_t> gamma,
                                       std::span<std::int32_t> parent,
                                       std::span<std::int32_t> stack,
                                       std::span<std::int64_t> desc) {
    const std::int64_t n = std::int64_t(gamma.size()) + 1;
    if (stat == Statistic::position_of_n) {
        for (std::int64_t c = 2; c <= n; ++c)
            if (gamma[c - 2] == n) return c;
        return 1;
    }
    detail::tree_from_gamma_into(gamma, parent, stack);
    switch (stat) {
        case Statistic::branches: {
            std::int64_t b = 0;
            for (std::int64_t i = 0; i + 1 < n; ++i)
                if (parent[i] == 1) ++b;
            return b;
        }
        case Statistic::depth_of_n: {
            std::int64_t d = 0;
            for (std::int64_t v = n; v != 1; v = parent[v - 2]) ++d;
            return d;
        }
        case Statistic::at_least_k:
        case Statistic::exactly_k: {
            for (std::int64_t v = 0; v <= n; ++v) desc[v] = 1;
            desc[0] = 0;
            for (std::int64_t i = n; i >= 2; --i) desc[parent[i - 2]] += desc[i];
            std::int64_t c = 0;
            if (stat == Statistic::at_least_k) {
                for (std::int64_t v = 1; v <= n; ++v)
                    if (desc[v] - 1 >= k) ++c;
            } else {
                for (std::int64_t v = 1; v <= n; ++v)
                    if (desc[v] - 1 == k) ++c;
            }
            return c;
        }
        default: break;
    }
    return 0;
}

}  // namespace brt
