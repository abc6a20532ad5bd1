#include "brt/formulas.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "brt/errors.hpp"
#include "brt/util.hpp"

namespace brt {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw domain_error(msg);
}

double ipow(double x, std::int64_t e) { return std::pow(x, double(e)); }

// B[s] = sum_{r=s}^{a} p_r * suffix(r)^m, compensated right-to-left.
std::vector<double> suffix_weighted(const ProbabilityVector& p, std::int64_t m) {
    std::int64_t a = p.size();
    std::vector<double> B(a + 2, 0.0);
    KahanSum acc;
    for (std::int64_t s = a; s >= 1; --s) {
        acc.add(p.p(s) * ipow(p.suffix(s), m));
        B[s] = acc.value();
    }
    return B;
}

}  // namespace

MomentReport make_report(std::string statistic, std::string model, std::int64_t n,
                         std::int64_t k, double mean, std::optional<double> variance,
                         std::string formula) {
    MomentReport r;
    r.statistic = std::move(statistic);
    r.model = std::move(model);
    r.n = n;
    r.k = k;
    r.mean = mean;
    r.formula = std::move(formula);
    if (variance) {
        double v = *variance;
        if (v < 0.0) {
            r.variance_clamped = true;
            if (v >= -1e-9) v = 0.0;  // rounding debris; larger deficits stay visible
        }
        r.variance = v;
    }
    return r;
}

double harmonic(std::int64_t n) {
    KahanSum acc;
    for (std::int64_t i = 1; i <= n; ++i) acc.add(1.0 / double(i));
    return acc.value();
}

double harmonic2(std::int64_t n) {
    KahanSum acc;
    for (std::int64_t i = 1; i <= n; ++i) acc.add(1.0 / (double(i) * double(i)));
    return acc.value();
}

// --- branches ---

double expected_branches(std::int64_t n, const ProbabilityVector& p) {
    require(n >= 2, "expected_branches needs n >= 2");
    std::int64_t a = p.size();
    KahanSum acc;
    // p_s/Q_s * (1 - S_s^{n-1}) with 1 - S^m = Q_s * geom_run(S, m)
    for (std::int64_t s = 1; s < a; ++s) acc.add(p.p(s) * geom_run(p.suffix(s + 1), n - 1));
    acc.add(p.p(a));
    return acc.value();
}

double expected_branches_uniform(std::int64_t n, std::int64_t a) {
    require(n >= 2, "expected_branches needs n >= 2");
    require(a >= 1, "a must be >= 1");
    KahanSum acc;
    for (std::int64_t s = 1; s < a; ++s)
        acc.add(geom_run(double(a - s) / double(a), n - 1));
    return (acc.value() + 1.0) / double(a);
}

double expected_branches_limit(const ProbabilityVector& p) {
    KahanSum acc;
    for (std::int64_t s = 1; s <= p.size(); ++s) acc.add(p.p(s) / p.prefix(s));
    return acc.value();
}

double expected_branches_limit_uniform(std::int64_t a) { return harmonic(a); }

double variance_branches(std::int64_t n, const ProbabilityVector& p) {
    require(n >= 3, "variance_branches needs n >= 3");
    std::int64_t a = p.size();
    if (a == 1) return 0.0;

    // Eight-term display. S_s = suffix(s+1) = 1 - Q_s; differences of powers
    // go through geom_run/geom_pair so near-equal bases do not cancel.
    KahanSum t1, t2, t3, t4, t5, t6, t7, t8b;
    double h_prefix = 0.0;  // sum_{r<s} p_r/Q_r while scanning s
    KahanSum t8a;
    for (std::int64_t s = 1; s < a; ++s) {
        double ps = p.p(s);
        double Ss = p.suffix(s + 1);
        t1.add(ps * geom_run(Ss, n - 1));
        t2.add(ps);
        t3.add(ps * ps * Ss * Ss * geom_run(Ss * Ss, n - 2));
        double w = ps * Ss * geom_run(Ss, n - 3);  // = (p_s S_s/Q_s)(1 - S_s^{n-3})
        t5.add(w * h_prefix);
        t8a.add(w);
        t8b.add(p.p(s) / p.prefix(s) * ipow(Ss, n - 1));
        for (std::int64_t r = 1; r < s; ++r) {
            double pr = p.p(r);
            double Sr = p.suffix(r + 1);
            t4.add(ps * pr * Ss * Sr * geom_run(Ss * Sr, n - 2));
            t6.add(ps * Ss * (pr * Sr / p.prefix(r)) * geom_pair(Sr, Ss, n - 3));
        }
        for (std::int64_t r = 1; r < a; ++r) {
            double Sr = p.suffix(r + 1);
            t7.add(ps * Ss * (p.p(r) / p.prefix(r)) * Sr * Sr * geom_run(Ss * Sr, n - 3));
        }
        h_prefix += ps / p.prefix(s);
    }
    return t1.value() - t2.value() - t3.value() - 2.0 * t4.value() + 2.0 * t5.value() -
           2.0 * t6.value() - 2.0 * t7.value() + 2.0 * t8a.value() * t8b.value();
}

double variance_branches_uniform(std::int64_t n, std::int64_t a) {
    require(n >= 3, "variance_branches needs n >= 3");
    require(a >= 1, "a must be >= 1");
    if (a == 1) return 0.0;

    // Separable restructure of the eight-term display for uniform p: the
    // rank-one pair sums collapse to O(n + a) or O(n a) passes instead of
    // O(a^2) pairs. p_s = 1/a, Q_s = s/a, S_s = (a-s)/a, p_s/Q_s = 1/s.
    double inv_a = 1.0 / double(a);
    std::int64_t m = a - 1;
    std::vector<double> S(m + 1);
    for (std::int64_t s = 1; s <= m; ++s) S[s] = double(a - s) * inv_a;

    KahanSum t1, t3, t5, t8a, t8b;
    double hs = 0.0;  // H_{s-1}
    for (std::int64_t s = 1; s <= m; ++s) {
        double Ss = S[s];
        t1.add(inv_a * geom_run(Ss, n - 1));
        t3.add(inv_a * inv_a * Ss * Ss * geom_run(Ss * Ss, n - 2));
        double w = inv_a * Ss * geom_run(Ss, n - 3);  // = (S_s/s)(1 - S_s^{n-3})
        t5.add(w * hs);
        t8a.add(w);
        t8b.add(ipow(Ss, n - 1) / double(s));
        hs += 1.0 / double(s);
    }
    double T2 = double(a - 1) * inv_a;

    // T4 = sum_t (A_t^2 - B_t), T7 = 2 sum_t A_t C_t over shifted powers
    std::vector<double> w4(m + 1), c7(m + 1);
    for (std::int64_t s = 1; s <= m; ++s) {
        w4[s] = inv_a * S[s];             // p S^{t+1} at t=0
        c7[s] = S[s] * S[s] / double(s);  // (p/Q) S^{t+2} at t=0
    }
    KahanSum t4, t7;
    for (std::int64_t t = 0; t <= n - 3; ++t) {
        double A = 0.0, B = 0.0, C = 0.0;
        for (std::int64_t s = 1; s <= m; ++s) {
            A += w4[s];
            B += w4[s] * w4[s];
            C += c7[s];
            w4[s] *= S[s];
            c7[s] *= S[s];
        }
        t4.add(A * A - B);
        if (t <= n - 4) t7.add(A * C);
    }

    // T6 = sum_{r<s} (S_s/a) (S_r/r) geom_pair(S_r, S_s, n-3): O(a^2) pairs
    // are fine up to a few thousand; past that, expand geom_pair and sweep
    // the inner prefix per power.
    KahanSum t6;
    if (n >= 4) {
        if (a <= 4000) {
            for (std::int64_t s = 2; s <= m; ++s)
                for (std::int64_t r = 1; r < s; ++r)
                    t6.add(inv_a * S[s] * (S[r] / double(r)) * geom_pair(S[r], S[s], n - 3));
        } else {
            for (std::int64_t t = 0; t <= n - 4; ++t) {
                double pre = 0.0;  // sum_{r<s} (S_r/r) S_r^t
                KahanSum row;
                for (std::int64_t s = 1; s <= m; ++s) {
                    if (s >= 2) row.add(ipow(S[s], n - 3 - t) * pre);
                    pre += (S[s] / double(s)) * ipow(S[s], t);
                }
                t6.add(inv_a * row.value());
            }
        }
    }

    return t1.value() - T2 - t3.value() - t4.value() + 2.0 * t5.value() - 2.0 * t6.value() -
           2.0 * t7.value() + 2.0 * t8a.value() * t8b.value();
}

double variance_branches_limit_n(const ProbabilityVector& p) {
    std::int64_t a = p.size();
    if (a == 1) return 0.0;
    // Termwise n -> inf limit of the display: powers of S die, T6 and T8 drop.
    KahanSum t1, t2, t3, t4, t5, t7;
    double h_prefix = 0.0;
    for (std::int64_t s = 1; s < a; ++s) {
        double ps = p.p(s);
        double Ss = p.suffix(s + 1);
        t1.add(ps / p.prefix(s));
        t2.add(ps);
        t3.add(ps * ps * Ss * Ss / (1.0 - Ss * Ss));
        t5.add(ps * Ss / p.prefix(s) * h_prefix);
        for (std::int64_t r = 1; r < s; ++r) {
            double Sr = p.suffix(r + 1);
            t4.add(ps * p.p(r) * Ss * Sr / (1.0 - Ss * Sr));
        }
        for (std::int64_t r = 1; r < a; ++r) {
            double Sr = p.suffix(r + 1);
            t7.add(ps * Ss * (p.p(r) / p.prefix(r)) * Sr * Sr / (1.0 - Ss * Sr));
        }
        h_prefix += ps / p.prefix(s);
    }
    return t1.value() - t2.value() - t3.value() - 2.0 * t4.value() + 2.0 * t5.value() -
           2.0 * t7.value();
}

double urt_branches_mean(std::int64_t n) {
    require(n >= 1, "n must be >= 1");
    return harmonic(n - 1);
}

double urt_branches_variance(std::int64_t n) {
    require(n >= 1, "n must be >= 1");
    return harmonic(n - 1) - harmonic2(n - 1);
}

// --- at least k descendants ---

double at_least_indicator_mean(std::int64_t k, const ProbabilityVector& p) {
    require(k >= 0, "k must be >= 0");
    KahanSum acc;
    for (std::int64_t s = 1; s <= p.size(); ++s) acc.add(p.p(s) * ipow(p.suffix(s), k));
    return acc.value();
}

double at_least_pair_mean(std::int64_t k, std::int64_t gap, const ProbabilityVector& p) {
    require(k >= 1 && gap >= 0 && gap < k,
            "pair mean covers dependent pairs only (0 <= j-i-1 < k); disjoint "
            "windows factor into the product of means");
    auto B = suffix_weighted(p, k);
    KahanSum acc;
    for (std::int64_t s = 1; s <= p.size(); ++s) acc.add(p.p(s) * ipow(p.suffix(s), gap) * B[s]);
    return acc.value();
}

double expected_at_least_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p) {
    require(n >= 2, "expected_at_least_k needs n >= 2");
    require(k >= 0 && k <= n - 1, "k must lie in [0, n-1]");
    return double(n - k - 1) * at_least_indicator_mean(k, p) + 1.0;
}

double expected_at_least_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a) {
    require(n >= 2, "expected_at_least_k needs n >= 2");
    require(k >= 0 && k <= n - 1, "k must lie in [0, n-1]");
    require(a >= 1, "a must be >= 1");
    KahanSum acc;
    for (std::int64_t s = 1; s <= a; ++s) acc.add(ipow(double(s) / double(a), k));
    return double(n - k - 1) * acc.value() / double(a) + 1.0;
}

double expected_at_least_k_urt(std::int64_t n, std::int64_t k) {
    require(n >= 2, "needs n >= 2");
    require(k >= 0 && k <= n - 1, "k must lie in [0, n-1]");
    return double(n) / double(k + 1);
}

double variance_at_least_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p) {
    require(k >= 0, "k must be >= 0");
    require(n >= 2 * k + 2,
            "variance_at_least_k needs n >= 2k+2; use the enumeration oracle below that");
    std::int64_t a = p.size();
    auto B = suffix_weighted(p, k);
    double A = B[1];

    double b1 = A * (double(n - k - 1) + p.p(1) * double(2 * n * k - 3 * k * (k + 1)));
    KahanSum b2;
    for (std::int64_t s = 2; s <= a; ++s) {
        double Ts = p.suffix(s);
        b2.add(p.p(s) / p.prefix(s - 1) * B[s] *
               (double(n - k - 1) - double(n - 2 * k - 1) * ipow(Ts, k) - geom_run(Ts, k)));
    }
    double b3 = A * A * double(n * (2 * k + 1) - (3 * k + 1) * (k + 1));
    return b1 + 2.0 * b2.value() - b3;
}

double variance_at_least_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a) {
    return variance_at_least_k(n, k, ProbabilityVector::uniform(a));
}

double variance_at_least_k_slope(std::int64_t k, const ProbabilityVector& p) {
    require(k >= 0, "k must be >= 0");
    std::int64_t a = p.size();
    auto B = suffix_weighted(p, k);
    double A = B[1];
    double part1 = A * (2.0 * double(k) * p.p(1) + 1.0 - double(2 * k + 1) * A);
    KahanSum part2;
    // (p_s/Q_{s-1})(1 - T_s^k) = p_s geom_run(T_s, k) since 1 - T_s = Q_{s-1}
    for (std::int64_t s = 2; s <= a; ++s)
        part2.add(p.p(s) * B[s] * geom_run(p.suffix(s), k));
    return part1 + 2.0 * part2.value();
}

double variance_at_least_k_slope_uniform(std::int64_t k, std::int64_t a) {
    return variance_at_least_k_slope(k, ProbabilityVector::uniform(a));
}

double variance_at_least_k_urt(std::int64_t n, std::int64_t k) {
    require(k >= 0, "k must be >= 0");
    require(n >= 2 * k + 2, "needs n >= 2k+2");
    double kp1 = double(k + 1);
    double t = double(n - k - 1) / kp1;
    t -= 2.0 * double(n - k - 1) / kp1 * harmonic(k + 1);
    t += 2.0 * double(n - 2 * k - 1) / kp1 * harmonic(2 * k + 1);
    KahanSum hs;
    for (std::int64_t l = 0; l < k; ++l) hs.add(harmonic(k + l + 1));
    t += 2.0 / kp1 * hs.value();
    t -= double(n * (2 * k + 1) - (3 * k + 1) * (k + 1)) / (kp1 * kp1);
    return t;
}

double urt_clt_slope(std::int64_t k) {
    require(k >= 0, "k must be >= 0");
    double kp1 = double(k + 1);
    return 1.0 / kp1 + (2.0 * harmonic(2 * k + 1) - 2.0 * harmonic(k + 1)) / kp1 -
           double(2 * k + 1) / (kp1 * kp1);
}

// --- exactly k descendants ---

double expected_exactly_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p) {
    require(n >= 2, "expected_exactly_k needs n >= 2");
    require(k >= 0 && k <= n - 1, "k must lie in [0, n-1]");
    if (k == n - 1) return 1.0;  // the root, with certainty; the display breaks here
    KahanSum acc;
    for (std::int64_t s = 1; s <= p.size(); ++s) {
        double Ts = p.suffix(s);
        double Tk = ipow(Ts, k);
        // (n-k-1)(T^k - T^{k+1}) + T^{k+1}, with T^k - T^{k+1} = T^k Q_{s-1}
        acc.add(p.p(s) * (double(n - k - 1) * Tk * p.prefix(s - 1) + Tk * Ts));
    }
    return acc.value();
}

double expected_exactly_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a) {
    return expected_exactly_k(n, k, ProbabilityVector::uniform(a));
}

double expected_exactly_k_urt(std::int64_t n, std::int64_t k) {
    require(n >= 2, "needs n >= 2");
    require(k >= 0 && k <= n - 1, "k must lie in [0, n-1]");
    if (k == n - 1) return 1.0;  // the root, with certainty; the display breaks here
    return double(n) / double((k + 1) * (k + 2));
}

double variance_exactly_k(std::int64_t n, std::int64_t k, const ProbabilityVector& p) {
    require(k >= 0, "k must be >= 0");
    require(n >= 2 * k + 4,
            "variance_exactly_k needs n >= 2k+4; use the enumeration oracle below that");
    std::int64_t a = p.size();
    auto Bk = suffix_weighted(p, k);
    auto Bk1 = suffix_weighted(p, k + 1);
    double A0 = Bk[1], A1 = Bk1[1];

    auto G = [&](std::int64_t gap, const std::vector<double>& B) {
        KahanSum acc;
        for (std::int64_t s = 1; s <= a; ++s) acc.add(p.p(s) * ipow(p.suffix(s), gap) * B[s]);
        return acc.value();
    };

    // Cov(Y_{>=k}, Y_{>=k+1}) from the indicator windows: same position
    // nests, offsets up to the window lengths overlap, the rest factor.
    KahanSum cov;
    cov.add(double(n - k - 2) * (A1 - A0 * A1));
    for (std::int64_t d = 1; d <= k; ++d) {
        std::int64_t pairs = n - k - 2 - d;
        if (pairs > 0) cov.add(double(pairs) * (G(d - 1, Bk1) - A0 * A1));
    }
    for (std::int64_t d = 1; d <= k + 1; ++d) {
        std::int64_t pairs = n - k - 1 - d;
        if (pairs > 0) cov.add(double(pairs) * (G(d - 1, Bk) - A0 * A1));
    }
    return variance_at_least_k(n, k, p) + variance_at_least_k(n, k + 1, p) - 2.0 * cov.value();
}

double variance_exactly_k_uniform(std::int64_t n, std::int64_t k, std::int64_t a) {
    return variance_exactly_k(n, k, ProbabilityVector::uniform(a));
}

double strong_law_limit(std::int64_t k, std::int64_t a) {
    require(k >= 0, "k must be >= 0");
    require(a >= 1, "a must be >= 1");
    KahanSum acc;
    for (std::int64_t s = 1; s <= a; ++s) {
        double x = double(s) / double(a);
        acc.add(ipow(x, k) * (1.0 - x));
    }
    return acc.value() / double(a);
}

// --- depth and position ---

double expected_depth(std::int64_t n, const ProbabilityVector& p) {
    require(n >= 2, "expected_depth needs n >= 2");
    std::int64_t a = p.size();
    // Conditioning on (position of n, digit there) and summing the record
    // chain below the conditioned position gives, after collapsing the
    // position sum, one geom_pair plus complete homogeneous sums of degree
    // n-3 in (Q_s, Q_s - Q_{r-1}, Q_{s-1}).
    KahanSum acc;
    acc.add(double(n - 1) * ipow(p.p(1), n - 1));
    for (std::int64_t s = 2; s <= a; ++s) {
        KahanSum inner;
        inner.add(geom_pair(p.prefix(s), p.prefix(s - 1), n - 1));
        for (std::int64_t r = 1; r <= s; ++r)
            inner.add(p.p(r) *
                      homog3(p.prefix(s), p.prefix(s) - p.prefix(r - 1), p.prefix(s - 1), n - 3));
        acc.add(p.p(s) * inner.value());
    }
    return acc.value();
}

double expected_depth_uniform(std::int64_t n, std::int64_t a) {
    require(n >= 2, "expected_depth needs n >= 2");
    require(a >= 1, "a must be >= 1");
    if (a == 1) return double(n - 1);
    // Same conditioning, restructured for uniform p so the digit sum becomes
    // a running power sum P_t(s) = sum_{j<=s} (j/a)^t; O(n^2) outer pairs,
    // O(a) inner sweep.
    double pa = 1.0 / double(a);
    KahanSum total;
    total.add(double(n - 2) * ipow(pa, n - 1));
    for (std::int64_t i = 2; i <= n - 1; ++i) {
        std::int64_t M = n - i;
        for (std::int64_t t = 0; t < M; ++t) {
            KahanSum inner;
            double cum = ipow(pa, t);  // P_t(1)
            for (std::int64_t s = 2; s <= a; ++s) {
                double Qs = double(s) * pa;
                cum += ipow(Qs, t);
                inner.add(ipow(Qs, i - 2) * ipow(double(s - 1) * pa, M - 1 - t) * cum);
            }
            total.add(pa * pa * inner.value());
        }
    }
    return total.value() + 1.0;
}

double expected_depth_slope(const ProbabilityVector& p) { return p.p(1); }

double urt_depth_mean(std::int64_t n) {
    require(n >= 1, "n must be >= 1");
    return harmonic(n - 1);
}

double position_pmf(std::int64_t n, std::int64_t k, const ProbabilityVector& p) {
    require(n >= 2, "position_pmf needs n >= 2");
    require(k >= 2 && k <= n, "position must lie in [2, n]");
    std::int64_t a = p.size();
    KahanSum acc;
    if (k == n) {
        for (std::int64_t s = 1; s <= a; ++s) acc.add(p.p(s) * ipow(p.prefix(s), n - 2));
        return acc.value();
    }
    for (std::int64_t s = 2; s <= a; ++s)
        acc.add(p.p(s) * ipow(p.prefix(s), k - 2) * ipow(p.prefix(s - 1), n - k));
    return acc.value();
}

// --- bounds ---

double tv_bound_general(std::int64_t n, const ProbabilityVector& p) {
    require(n >= 3, "tv_bound_general needs n >= 3");
    KahanSum acc;
    for (std::int64_t s = 1; s <= p.size(); ++s) acc.add(p.p(s) * p.p(s));
    double b = double((n - 1) * (n - 2) / 2) * acc.value();
    return b < 1.0 ? b : 1.0;
}

double tv_bound_uniform(std::int64_t n, std::int64_t a) {
    require(n >= 2, "tv_bound_uniform needs n >= 2");
    require(a >= n, "tv_bound_uniform needs a >= n");
    double prod = 1.0;
    for (std::int64_t i = 0; i < n; ++i) prod *= double(a - i) / double(a);
    return 1.0 - prod;
}

double wasserstein_clt_bound(std::int64_t k, double sigma) {
    require(k >= 0, "k must be >= 0");
    require(sigma > 0.0, "sigma must be positive");
    double w = double(2 * k + 1);
    return w / sigma * (w + std::sqrt(28.0) * std::sqrt(w) / std::sqrt(M_PI));
}

}  // namespace brt
