#include "brt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "brt/errors.hpp"
#include "brt/formulas.hpp"
#include "brt/shuffle.hpp"
#include "brt/stats.hpp"
#include "brt/tree.hpp"

namespace brt {

namespace {

// Per-thread scratch evaluating one statistic through the full pipeline.
struct StatEval {
    std::int64_t n;
    std::int64_t a;
    Statistic stat;
    std::int64_t k;
    std::vector<std::int32_t> gamma, parent, stack, bucket;
    std::vector<std::int64_t> desc;

    StatEval(std::int64_t n_, std::int64_t a_, Statistic st, std::int64_t k_)
        : n(n_), a(a_), stat(st), k(k_), gamma(n_ - 1), parent(n_ - 1), stack(n_),
          bucket(a_ + 2), desc(n_ + 1) {}

    std::int64_t from_gamma() {
        return eval_statistic_from_gamma(stat, k, gamma, parent, stack, desc);
    }

    std::int64_t from_digits(std::span<const std::int32_t> digits) {
        detail::gamma_from_digits_into(digits, a, gamma, bucket);
        return from_gamma();
    }
};

// Lexicographic odometer over digit words with incrementally maintained
// prefix weights; wpre[i] is the probability of the first i digits.
struct WordCursor {
    const ProbabilityVector& p;
    std::int64_t m, a;
    std::vector<std::int32_t> digits;
    std::vector<double> wpre;

    WordCursor(std::int64_t n, const ProbabilityVector& p_)
        : p(p_), m(n - 1), a(p_.size()), digits(m), wpre(m + 1, 1.0) {}

    void seek(std::uint64_t rank) {
        decode_digit_word(rank, m + 1, a, digits);
        for (std::int64_t t = 0; t < m; ++t) wpre[t + 1] = wpre[t] * p.p(digits[t]);
    }

    double weight() const { return wpre[m]; }

    bool advance() {
        std::int64_t i = m - 1;
        while (i >= 0 && digits[i] == a) --i;
        if (i < 0) return false;
        ++digits[i];
        for (std::int64_t t = i; t < m; ++t) {
            if (t > i) digits[t] = 1;
            wpre[t + 1] = wpre[t] * p.p(digits[t]);
        }
        return true;
    }
};

std::int64_t normalize_k(Statistic stat, std::int64_t k) {
    if (!statistic_uses_k(stat)) return -1;
    if (k < 0) throw usage_error(std::string(statistic_name(stat)) + " needs k >= 0");
    return k;
}

DistributionTable finish_table(std::int64_t n, const ProbabilityVector* p, Statistic stat,
                               std::int64_t k, const std::vector<KahanSum>& mass) {
    DistributionTable t;
    if (p != nullptr) {
        if (p->is_uniform()) {
            t.model = "uniform";
            t.params = {double(p->size())};
        } else {
            t.model = "p";
            t.params = p->weights();
        }
    } else {
        t.model = "urt";
    }
    t.n = n;
    t.stat = stat;
    t.k = k;
    for (std::int64_t v = 0; v < std::int64_t(mass.size()); ++v) {
        if (mass[v].value() > 0.0) {
            t.support.push_back(v);
            t.prob.push_back(mass[v].value());
        }
    }
    t.validate();
    return t;
}

constexpr int kBlocks = 64;

}  // namespace

DistributionTable exact_brt_distribution(std::int64_t n, const ProbabilityVector& p,
                                         Statistic stat, std::int64_t k, std::uint64_t cap,
                                         std::int64_t workers) {
    if (n < 2) throw usage_error("exact_brt_distribution needs n >= 2");
    k = normalize_k(stat, k);
    std::uint64_t total = digit_word_count(n, p.size(), cap);

    std::vector<std::vector<KahanSum>> block_mass(kBlocks);
    int nt = int(std::min<std::int64_t>(resolve_workers(workers), kBlocks));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (int b = 0; b < kBlocks; ++b) {
        std::uint64_t lo = std::uint64_t((unsigned __int128)total * b / kBlocks);
        std::uint64_t hi = std::uint64_t((unsigned __int128)total * (b + 1) / kBlocks);
        if (lo >= hi) continue;
        std::vector<KahanSum> mass(n + 1);
        StatEval eval(n, p.size(), stat, k);
        WordCursor cur(n, p);
        cur.seek(lo);
        for (std::uint64_t r = lo; r < hi; ++r) {
            mass[eval.from_digits(cur.digits)].add(cur.weight());
            cur.advance();
        }
        block_mass[b] = std::move(mass);
    }
    (void)nt;

    std::vector<KahanSum> mass(n + 1);
    for (int b = 0; b < kBlocks; ++b) {
        if (block_mass[b].empty()) continue;
        for (std::int64_t v = 0; v <= n; ++v) mass[v].add(block_mass[b][v].value());
    }
    return finish_table(n, &p, stat, k, mass);
}

DistributionTable exact_brt_distribution_serial(std::int64_t n, const ProbabilityVector& p,
                                                Statistic stat, std::int64_t k,
                                                std::uint64_t cap) {
    if (n < 2) throw usage_error("exact_brt_distribution needs n >= 2");
    k = normalize_k(stat, k);
    std::uint64_t total = digit_word_count(n, p.size(), cap);

    std::vector<KahanSum> mass(n + 1);
    StatEval eval(n, p.size(), stat, k);
    WordCursor cur(n, p);
    cur.seek(0);
    for (std::uint64_t r = 0; r < total; ++r) {
        mass[eval.from_digits(cur.digits)].add(cur.weight());
        cur.advance();
    }
    return finish_table(n, &p, stat, k, mass);
}

DistributionTable exact_urt_distribution(std::int64_t n, Statistic stat, std::int64_t k,
                                         std::uint64_t cap) {
    if (n < 2) throw usage_error("exact_urt_distribution needs n >= 2");
    k = normalize_k(stat, k);
    std::uint64_t total = 1;
    for (std::int64_t i = 2; i < n; ++i) {
        if (total > cap / std::uint64_t(i))
            throw resource_limit_error(
                "enumerating (n-1)! one-line words exceeds the cap of " + std::to_string(cap) +
                " (override with BRT_ENUM_CAP or --cap)");
        total *= std::uint64_t(i);
    }

    std::vector<KahanSum> mass(n + 1);
    StatEval eval(n, 0, stat, k);
    std::iota(eval.gamma.begin(), eval.gamma.end(), 2);
    double w = 1.0 / double(total);
    do {
        mass[eval.from_gamma()].add(w);
    } while (std::next_permutation(eval.gamma.begin(), eval.gamma.end()));
    return finish_table(n, nullptr, stat, k, mass);
}

std::map<std::vector<std::int32_t>, double> exact_tree_law(std::int64_t n,
                                                           const ProbabilityVector& p,
                                                           std::uint64_t cap) {
    if (n < 2) throw usage_error("exact_tree_law needs n >= 2");
    std::uint64_t total = digit_word_count(n, p.size(), cap);
    std::map<std::vector<std::int32_t>, double> law;
    StatEval eval(n, p.size(), Statistic::branches, -1);
    WordCursor cur(n, p);
    cur.seek(0);
    for (std::uint64_t r = 0; r < total; ++r) {
        detail::gamma_from_digits_into(cur.digits, p.size(), eval.gamma, eval.bucket);
        detail::tree_from_gamma_into(eval.gamma, eval.parent, eval.stack);
        law[eval.parent] += cur.weight();
        cur.advance();
    }
    return law;
}

std::map<std::vector<std::int32_t>, double> exact_urt_tree_law(std::int64_t n,
                                                               std::uint64_t cap) {
    if (n < 2) throw usage_error("exact_urt_tree_law needs n >= 2");
    std::uint64_t total = 1;
    for (std::int64_t i = 2; i < n; ++i) {
        if (total > cap / std::uint64_t(i))
            throw resource_limit_error(
                "enumerating (n-1)! one-line words exceeds the cap of " + std::to_string(cap) +
                " (override with BRT_ENUM_CAP or --cap)");
        total *= std::uint64_t(i);
    }
    std::map<std::vector<std::int32_t>, double> law;
    StatEval eval(n, 0, Statistic::branches, -1);
    std::iota(eval.gamma.begin(), eval.gamma.end(), 2);
    double w = 1.0 / double(total);
    do {
        detail::tree_from_gamma_into(eval.gamma, eval.parent, eval.stack);
        law[eval.parent] += w;
    } while (std::next_permutation(eval.gamma.begin(), eval.gamma.end()));
    return law;
}

double tree_law_tv(const std::map<std::vector<std::int32_t>, double>& lhs,
                   const std::map<std::vector<std::int32_t>, double>& rhs) {
    KahanSum l1;
    auto it = lhs.begin();
    auto jt = rhs.begin();
    while (it != lhs.end() || jt != rhs.end()) {
        if (jt == rhs.end() || (it != lhs.end() && it->first < jt->first)) {
            l1.add(std::abs(it->second));
            ++it;
        } else if (it == lhs.end() || jt->first < it->first) {
            l1.add(std::abs(jt->second));
            ++jt;
        } else {
            l1.add(std::abs(it->second - jt->second));
            ++it;
            ++jt;
        }
    }
    return 0.5 * l1.value();
}

CovarianceReport oracle_covariance_check(std::int64_t n, std::int64_t k,
                                         const ProbabilityVector& p, std::uint64_t cap) {
    if (n < 2 || k < 0) throw usage_error("oracle_covariance_check needs n >= 2, k >= 0");
    CovarianceReport rep;
    rep.n = n;
    rep.k = k;
    if (k == 0) return rep;  // disjoint windows everywhere, nothing to check

    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t i = 2; i + k <= n - k; ++i)
        for (std::int64_t j = i + 1; j <= i + k; ++j) pairs.emplace_back(i, j);
    if (pairs.empty()) return rep;

    std::uint64_t total = digit_word_count(n, p.size(), cap);
    std::vector<KahanSum> acc(pairs.size());
    WordCursor cur(n, p);
    cur.seek(0);
    for (std::uint64_t r = 0; r < total; ++r) {
        const auto& d = cur.digits;
        // indicator: digit at card c is <= the k digits after it
        auto ind = [&](std::int64_t c) {
            for (std::int64_t t = c - 1; t < c - 1 + k; ++t)
                if (d[t] < d[c - 2]) return false;
            return true;
        };
        for (std::size_t q = 0; q < pairs.size(); ++q)
            if (ind(pairs[q].first) && ind(pairs[q].second)) acc[q].add(cur.weight());
        cur.advance();
    }

    for (std::size_t q = 0; q < pairs.size(); ++q) {
        CovariancePair cp;
        cp.i = pairs[q].first;
        cp.j = pairs[q].second;
        cp.enumerated = acc[q].value();
        cp.closed = at_least_pair_mean(k, cp.j - cp.i - 1, p);
        rep.max_abs_err = std::max(rep.max_abs_err, std::abs(cp.enumerated - cp.closed));
        rep.pairs.push_back(cp);
    }
    return rep;
}

}  // namespace brt
