#include "brt/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <span>
#include <stdexcept>

#include "brt/errors.hpp"
#include "brt/formulas.hpp"
#include "brt/rng.hpp"
#include "brt/stats.hpp"
#include "brt/tree.hpp"
#include "brt/util.hpp"

namespace brt {

namespace {

constexpr std::uint64_t kChunk = 4096;   // samples per accumulation chunk
constexpr std::uint64_t kSpotMask = 1023;  // full-pipeline check every 1024th sample
constexpr double kZ99 = 2.5758293035489004;  // 99.5% normal quantile

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string statistic_label(Statistic stat, std::int64_t k) {
    std::string s = statistic_name(stat);
    if (statistic_uses_k(stat)) s += "-" + std::to_string(k);
    return s;
}

std::int64_t eval_stream(Statistic stat, std::int64_t k, std::span<const std::int32_t> d) {
    switch (stat) {
        case Statistic::branches: return stream::branches(d);
        case Statistic::at_least_k: return stream::at_least_k(d, k);
        case Statistic::exactly_k: return stream::exactly_k(d, k);
        case Statistic::depth_of_n: return stream::depth_of_n(d);
        case Statistic::position_of_n: return stream::position_of_n(d);
    }
    return 0;
}

std::int64_t check_k(Statistic stat, std::int64_t k) {
    if (!statistic_uses_k(stat)) return -1;
    if (k < 0) throw usage_error(std::string(statistic_name(stat)) + " needs k >= 0");
    return k;
}

// Per-thread scratch for the 1/1024 spot checks: rebuild the deck order and
// the tree from the digits and make sure the streamed value, the tree value,
// and the structural bounds all agree.
struct SpotScratch {
    std::vector<std::int32_t> gamma, parent, stack, bucket, child;
    std::vector<std::int64_t> desc;

    SpotScratch(std::int64_t n, std::int64_t a)
        : gamma(n - 1), parent(n - 1), stack(n), bucket(a + 2), child(n + 1), desc(n + 1) {}
};

void spot_check(std::span<const std::int32_t> digits, std::int64_t a, Statistic stat,
                std::int64_t k, std::int64_t streamed, SpotScratch& sc) {
    const std::int64_t n = std::int64_t(digits.size()) + 1;
    detail::gamma_from_digits_into(digits, a, sc.gamma, sc.bucket);
    detail::tree_from_gamma_into(sc.gamma, sc.parent, sc.stack);
    std::fill(sc.child.begin(), sc.child.end(), 0);
    for (std::int64_t v = 2; v <= n; ++v) ++sc.child[sc.parent[v - 2]];
    for (std::int64_t v = 1; v <= n; ++v)
        if (sc.child[v] > a)
            throw std::logic_error("sample invariant failed: node with " +
                                   std::to_string(sc.child[v]) + " children exceeds a=" +
                                   std::to_string(a));
    std::int64_t tree_value = eval_statistic_from_gamma(stat, k, sc.gamma, sc.parent,
                                                        sc.stack, sc.desc);
    if (tree_value != streamed)
        throw std::logic_error("sample invariant failed: stream value " +
                               std::to_string(streamed) + " != tree value " +
                               std::to_string(tree_value) + " for " +
                               statistic_label(stat, k));
}

// Shared chunk loop: run body(i) over [0, samples) in fixed chunks, possibly
// in parallel. body must only write to per-sample or per-chunk slots; any
// exception it throws is rethrown after the loop.
template <typename Body>
void for_each_chunk(std::uint64_t samples, int nt, Body body) {
    const std::int64_t chunks = std::int64_t((samples + kChunk - 1) / kChunk);
    std::atomic<bool> failed{false};
    std::string what;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (std::int64_t c = 0; c < chunks; ++c) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            std::uint64_t lo = std::uint64_t(c) * kChunk;
            std::uint64_t hi = std::min(samples, lo + kChunk);
            body(c, lo, hi);
        } catch (const std::exception& e) {
            bool first = false;
            if (failed.compare_exchange_strong(first, true)) what = e.what();
        }
    }
    (void)nt;
    if (failed.load()) throw std::logic_error(what);
}

}  // namespace

EstimateReport estimate_moments(std::int64_t n, const ProbabilityVector& p, Statistic stat,
                                std::int64_t k, std::uint64_t samples, std::uint64_t seed,
                                std::int64_t workers) {
    auto t0 = Clock::now();
    if (n < 2) throw usage_error("estimate_moments needs n >= 2");
    if (samples == 0) throw usage_error("estimate_moments needs samples >= 1");
    k = check_k(stat, k);
    const std::int64_t a = p.size();
    const std::int64_t m = n - 1;

    // All chunks accumulate relative to the first sample's value, which keeps
    // the sums small without a pre-pass over the data.
    double shift;
    {
        std::vector<std::int32_t> digits(m);
        DigitSampler smp(substream(seed, 0), p);
        smp.fill(digits);
        shift = double(eval_stream(stat, k, digits));
    }

    const std::int64_t chunks = std::int64_t((samples + kChunk - 1) / kChunk);
    std::vector<double> c1(chunks), c2(chunks), c3(chunks), c4(chunks);
    int nt = int(resolve_workers(workers));

    for_each_chunk(samples, nt, [&](std::int64_t c, std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::int32_t> digits(m);
        SpotScratch sc(n, a);
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            DigitSampler smp(substream(seed, i), p);
            smp.fill(digits);
            std::int64_t v = eval_stream(stat, k, digits);
            if ((i & kSpotMask) == 0) spot_check(digits, a, stat, k, v, sc);
            double d = double(v) - shift;
            double d2 = d * d;
            s1 += d;
            s2 += d2;
            s3 += d2 * d;
            s4 += d2 * d2;
        }
        c1[c] = s1;
        c2[c] = s2;
        c3[c] = s3;
        c4[c] = s4;
    });

    KahanSum S1, S2, S3, S4;
    for (std::int64_t c = 0; c < chunks; ++c) {
        S1.add(c1[c]);
        S2.add(c2[c]);
        S3.add(c3[c]);
        S4.add(c4[c]);
    }

    const double dm = double(samples);
    const double r1 = S1.value() / dm;
    const double m2 = std::max(0.0, S2.value() / dm - r1 * r1);
    const double m4 = std::max(
        0.0, S4.value() / dm - 4 * r1 * S3.value() / dm + 6 * r1 * r1 * S2.value() / dm -
                 3 * r1 * r1 * r1 * r1);

    EstimateReport rep;
    rep.statistic = statistic_label(stat, k);
    rep.model = p.is_uniform() ? "uniform" : "p";
    rep.n = n;
    rep.k = k;
    rep.samples = samples;
    rep.seed = seed;
    rep.workers = nt;
    rep.mean = shift + r1;
    if (samples > 1) {
        rep.variance = m2 * dm / (dm - 1.0);
        rep.se_mean = std::sqrt(rep.variance / dm);
        rep.half_width = kZ99 * rep.se_mean;
        double var_of_var = (m4 - m2 * m2 * (dm - 3.0) / (dm - 1.0)) / dm;
        rep.se_variance = std::sqrt(std::max(0.0, var_of_var));
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

EstimateReport estimate_moments_serial(std::int64_t n, const ProbabilityVector& p,
                                       Statistic stat, std::int64_t k, std::uint64_t samples,
                                       std::uint64_t seed) {
    auto t0 = Clock::now();
    if (n < 2) throw usage_error("estimate_moments needs n >= 2");
    if (samples == 0) throw usage_error("estimate_moments needs samples >= 1");
    k = check_k(stat, k);
    std::vector<std::int32_t> digits(n - 1);

    // One-pass central moment recurrences, independent of the chunked path.
    double mean = 0, M2 = 0, M3 = 0, M4 = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        DigitSampler smp(substream(seed, i), p);
        smp.fill(digits);
        double x = double(eval_stream(stat, k, digits));
        double cnt = double(i + 1);
        double delta = x - mean;
        double dn = delta / cnt;
        double t1 = delta * dn * double(i);
        mean += dn;
        M4 += t1 * dn * dn * (cnt * cnt - 3.0 * cnt + 3.0) + 6.0 * dn * dn * M2 - 4.0 * dn * M3;
        M3 += t1 * dn * (cnt - 2.0) - 3.0 * dn * M2;
        M2 += t1;
    }

    const double dm = double(samples);
    EstimateReport rep;
    rep.statistic = statistic_label(stat, k);
    rep.model = p.is_uniform() ? "uniform" : "p";
    rep.n = n;
    rep.k = k;
    rep.samples = samples;
    rep.seed = seed;
    rep.workers = 1;
    rep.mean = mean;
    if (samples > 1) {
        rep.variance = M2 / (dm - 1.0);
        rep.se_mean = std::sqrt(rep.variance / dm);
        rep.half_width = kZ99 * rep.se_mean;
        double m2 = M2 / dm;
        double m4 = M4 / dm;
        double var_of_var = (m4 - m2 * m2 * (dm - 3.0) / (dm - 1.0)) / dm;
        rep.se_variance = std::sqrt(std::max(0.0, var_of_var));
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

CltReport clt_check(std::int64_t n, const ProbabilityVector& p, std::int64_t k,
                    std::uint64_t samples, std::uint64_t seed, double threshold,
                    std::int64_t workers, std::uint64_t storage_cap) {
    auto t0 = Clock::now();
    if (n < 2) throw usage_error("clt_check needs n >= 2");
    if (k < 1) throw usage_error("clt_check needs k >= 1 (at k = 0 the count is constant)");
    if (samples == 0) throw usage_error("clt_check needs samples >= 1");
    if (samples > storage_cap)
        throw resource_limit_error("clt_check stores one standardized value per sample; " +
                                   std::to_string(samples) + " exceeds the cap of " +
                                   std::to_string(storage_cap));

    const double mu = expected_at_least_k(n, k, p);
    const double var = variance_at_least_k(n, k, p);
    if (!(var > 0.0))
        throw domain_error("clt_check needs a positive closed-form variance");
    const double sigma = std::sqrt(var);
    const std::int64_t m = n - 1;
    int nt = int(resolve_workers(workers));

    std::vector<double> z(samples);
    for_each_chunk(samples, nt, [&](std::int64_t, std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::int32_t> ring(k + 1);
        std::vector<std::int32_t> digits(m);
        SpotScratch sc(n, p.size());
        const std::int64_t len = k + 1;
        for (std::uint64_t i = lo; i < hi; ++i) {
            DigitSampler smp(substream(seed, i), p);
            std::int64_t y = 1;
            std::int64_t slot = 0;  // ring slot receiving digit j
            for (std::int64_t j = 0; j < m; ++j) {
                ring[slot] = smp.at(std::uint64_t(j));
                if (j >= k) {
                    std::int64_t s = slot + 1 == len ? 0 : slot + 1;  // digit j-k
                    std::int32_t d0 = ring[s];
                    bool ok = true;
                    for (std::int64_t t = 0; t < k; ++t) {
                        s = s + 1 == len ? 0 : s + 1;
                        if (ring[s] < d0) {
                            ok = false;
                            break;
                        }
                    }
                    y += ok;
                }
                slot = slot + 1 == len ? 0 : slot + 1;
            }
            if ((i & kSpotMask) == 0) {
                smp.fill(digits);
                std::int64_t ref = stream::at_least_k(digits, k);
                if (ref != y)
                    throw std::logic_error("sample invariant failed: windowed count " +
                                           std::to_string(y) + " != replayed count " +
                                           std::to_string(ref));
                spot_check(digits, p.size(), Statistic::at_least_k, k, ref, sc);
            }
            z[i] = (double(y) - mu) / sigma;
        }
    });

    std::sort(z.begin(), z.end());
    double ks = 0.0;
    const double dm = double(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        double f = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        ks = std::max(ks, std::max(f - double(i) / dm, double(i + 1) / dm - f));
    }

    CltReport rep;
    rep.model = p.is_uniform() ? "uniform" : "p";
    rep.n = n;
    rep.k = k;
    rep.samples = samples;
    rep.seed = seed;
    rep.mean_formula = mu;
    rep.sd_formula = sigma;
    rep.ks = ks;
    rep.threshold = threshold;
    rep.pass = ks < threshold;
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

std::vector<StrongLawRow> strong_law_trajectory(std::int64_t k, std::int64_t a,
                                                const std::vector<std::int64_t>& n_grid,
                                                std::uint64_t seed) {
    if (k < 0) throw usage_error("strong_law_trajectory needs k >= 0");
    if (a < 1) throw usage_error("strong_law_trajectory needs a >= 1");
    if (n_grid.empty()) throw usage_error("strong_law_trajectory needs a nonempty n grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i)
        if (n_grid[i] < 2 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw usage_error("strong_law_trajectory grid must be increasing with n >= 2");

    const ProbabilityVector p = ProbabilityVector::uniform(a);
    const double limit = strong_law_limit(k, a);
    DigitSampler smp(substream(seed, 0), p);

    // One path; the two at-least counters lag by one window length, and their
    // difference is the exactly-k count minus the root corrections.
    const std::int64_t ring_len = k + 2;
    std::vector<std::int32_t> ring(ring_len);
    auto window_ok = [&](std::int64_t first, std::int64_t last) {
        std::int32_t d0 = ring[first % ring_len];
        for (std::int64_t t = first + 1; t <= last; ++t)
            if (ring[t % ring_len] < d0) return false;
        return true;
    };

    std::vector<StrongLawRow> rows;
    rows.reserve(n_grid.size());
    std::int64_t ctr_k = 0, ctr_k1 = 0;
    std::size_t gi = 0;
    const std::int64_t n_max = n_grid.back();
    for (std::int64_t j = 0; j <= n_max - 2; ++j) {
        ring[j % ring_len] = smp.at(std::uint64_t(j));
        if (j >= k) ctr_k += window_ok(j - k, j);
        if (j >= k + 1) ctr_k1 += window_ok(j - k - 1, j);
        const std::int64_t n = j + 2;  // cards 2..n processed
        if (gi < n_grid.size() && n == n_grid[gi]) {
            double yk = k <= n - 1 ? 1.0 + double(ctr_k) : 0.0;
            double yk1 = k + 1 <= n - 1 ? 1.0 + double(ctr_k1) : 0.0;
            double value = (yk - yk1) / double(n);
            rows.push_back({n, value, limit, value - limit});
            ++gi;
        }
    }
    return rows;
}

std::vector<SweepRow> convergence_sweep(const std::string& quantity,
                                        const std::vector<std::int64_t>& grid,
                                        std::int64_t fixed,
                                        const ProbabilityVector* p) {
    if (grid.empty()) throw usage_error("convergence_sweep needs a nonempty grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());

    auto push = [&](std::int64_t param, double value, double limit) {
        rows.push_back({param, value, limit, value - limit});
    };

    if (quantity == "branches-vs-a") {
        for (std::int64_t a : grid)
            push(a, expected_branches_uniform(fixed, a), harmonic(fixed - 1));
    } else if (quantity == "branches-vs-n") {
        for (std::int64_t n : grid) {
            if (p != nullptr)
                push(n, expected_branches(n, *p), expected_branches_limit(*p));
            else
                push(n, expected_branches_uniform(n, fixed), expected_branches_limit_uniform(fixed));
        }
    } else if (quantity == "depth-vs-a") {
        for (std::int64_t a : grid)
            push(a, expected_depth_uniform(fixed, a), harmonic(fixed - 1));
    } else if (quantity == "depth-rate-vs-n") {
        const ProbabilityVector up = p != nullptr ? *p : ProbabilityVector::uniform(fixed);
        for (std::int64_t n : grid)
            push(n, expected_depth(n, up) / double(n), expected_depth_slope(up));
    } else if (quantity == "varbranches-vs-a") {
        for (std::int64_t a : grid)
            push(a, variance_branches_uniform(fixed, a),
                 harmonic(fixed - 1) - harmonic2(fixed - 1));
    } else {
        throw usage_error("unknown sweep quantity '" + quantity +
                          "' (branches-vs-a, branches-vs-n, depth-vs-a, depth-rate-vs-n, "
                          "varbranches-vs-a)");
    }
    return rows;
}

}  // namespace brt
