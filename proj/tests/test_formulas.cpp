#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "brt/errors.hpp"
#include "brt/formulas.hpp"
#include "brt/prob.hpp"
#include "brt/shuffle.hpp"
#include "brt/stats.hpp"

using namespace brt;

namespace {

const ProbabilityVector p532 = ProbabilityVector::normalized({0.5, 0.3, 0.2});

// Independent brute force: mean of one streamed statistic over every digit
// word. Slow and simple on purpose.
double brute_mean(std::int64_t n, const ProbabilityVector& p,
                  std::int64_t (*f)(std::span<const std::int32_t>)) {
    double acc = 0.0;
    enumerate_digit_words(n, p, [&](std::span<const std::int32_t> d, double w) {
        acc += w * double(f(d));
    });
    return acc;
}

}  // namespace

TEST_CASE("harmonic numbers") {
    CHECK(harmonic(0) == 0.0);
    CHECK(harmonic(1) == 1.0);
    CHECK(harmonic(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(harmonic2(4) == doctest::Approx(205.0 / 144.0).epsilon(1e-15));
    CHECK(harmonic(9) == doctest::Approx(7129.0 / 2520.0).epsilon(1e-15));
}

TEST_CASE("branch moments at n = 4, a = 2") {
    CHECK(expected_branches_uniform(4, 2) == doctest::Approx(11.0 / 8.0).epsilon(1e-13));
    CHECK(variance_branches_uniform(4, 2) == doctest::Approx(15.0 / 64.0).epsilon(1e-13));
}

TEST_CASE("uniform wrappers match the general forms") {
    for (std::int64_t n : {5, 8, 12}) {
        for (std::int64_t a : {2, 3, 5, 8}) {
            ProbabilityVector u = ProbabilityVector::uniform(a);
            CHECK(expected_branches_uniform(n, a) ==
                  doctest::Approx(expected_branches(n, u)).epsilon(1e-11));
            CHECK(variance_branches_uniform(n, a) ==
                  doctest::Approx(variance_branches(n, u)).epsilon(1e-10));
            CHECK(expected_depth_uniform(n, a) ==
                  doctest::Approx(expected_depth(n, u)).epsilon(1e-11));
            for (std::int64_t k = 0; k <= 2; ++k) {
                CHECK(expected_at_least_k_uniform(n, k, a) ==
                      doctest::Approx(expected_at_least_k(n, k, u)).epsilon(1e-11));
                CHECK(expected_exactly_k_uniform(n, k, a) ==
                      doctest::Approx(expected_exactly_k(n, k, u)).epsilon(1e-11));
                if (n >= 2 * k + 2)
                    CHECK(variance_at_least_k_uniform(n, k, a) ==
                          doctest::Approx(variance_at_least_k(n, k, u)).epsilon(1e-10));
                if (n >= 2 * k + 4)
                    CHECK(variance_exactly_k_uniform(n, k, a) ==
                          doctest::Approx(variance_exactly_k(n, k, u)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("at-least-k golden and telescoping") {
    CHECK(expected_at_least_k_uniform(8, 2, 3) == doctest::Approx(97.0 / 27.0).epsilon(1e-13));

    for (std::int64_t n : {4, 7, 11}) {
        for (std::int64_t k = 0; k <= n - 2; ++k) {
            double diff = expected_at_least_k(n, k, p532) - expected_at_least_k(n, k + 1, p532);
            CHECK(expected_exactly_k(n, k, p532) == doctest::Approx(diff).epsilon(1e-11));
        }
        // Only the root has all n-1 others below it.
        CHECK(expected_at_least_k(n, n - 1, p532) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(expected_exactly_k(n, n - 1, p532) == 1.0);
    }
}

TEST_CASE("descendant slopes") {
    CHECK(variance_at_least_k_slope_uniform(1, 3) == doctest::Approx(2.0 / 27.0).epsilon(1e-13));
    CHECK(urt_clt_slope(1) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    CHECK(urt_clt_slope(0) == doctest::Approx(0.0).epsilon(1e-15));

    // Finite-n variance over n approaches the slope.
    double slope = variance_at_least_k_slope(2, p532);
    CHECK(variance_at_least_k(20000, 2, p532) / 20000.0 ==
          doctest::Approx(slope).epsilon(1e-3));
}

TEST_CASE("strong law limits") {
    CHECK(strong_law_limit(0, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(strong_law_limit(1, 3) == doctest::Approx(4.0 / 27.0).epsilon(1e-14));
    // Limits line up with the per-site means: E[X_k]/n has the same limit.
    for (std::int64_t k = 0; k <= 3; ++k) {
        for (std::int64_t a = 1; a <= 4; ++a) {
            double finite = expected_exactly_k_uniform(100000, k, a) / 100000.0;
            CHECK(finite == doctest::Approx(strong_law_limit(k, a)).epsilon(1e-3));
        }
    }
}

TEST_CASE("limits and monotonicity in n") {
    for (std::int64_t a : {2, 3, 6}) {
        double prev = expected_branches_uniform(2, a);
        for (std::int64_t n = 3; n <= 40; ++n) {
            double cur = expected_branches_uniform(n, a);
            CHECK(cur >= prev - 1e-13);
            prev = cur;
        }
        CHECK(prev <= expected_branches_limit_uniform(a) + 1e-12);
        CHECK(expected_branches_uniform(2000, a) ==
              doctest::Approx(harmonic(a)).epsilon(1e-9));
    }
    CHECK(expected_branches_limit(p532) ==
          doctest::Approx(0.5 / 0.5 + 0.3 / 0.8 + 0.2 / 1.0).epsilon(1e-13));
    CHECK(expected_depth_slope(p532) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(expected_depth_uniform(2000, 2) / 2000.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("finite a sits below the uniform recursive tree") {
    for (std::int64_t n : {4, 6, 9}) {
        for (std::int64_t a : {2, 3, 5}) {
            CHECK(expected_branches_uniform(n, a) <= urt_branches_mean(n) + 1e-12);
            CHECK(expected_depth_uniform(n, a) >= urt_depth_mean(n) - 1e-12);
        }
        // Large a converges to the uniform recursive tree values.
        CHECK(expected_branches_uniform(n, 100000) ==
              doctest::Approx(urt_branches_mean(n)).epsilon(1e-4));
        CHECK(variance_branches_uniform(n, 100000) ==
              doctest::Approx(urt_branches_variance(n)).epsilon(1e-3));
        CHECK(expected_depth_uniform(n, 20000) ==
              doctest::Approx(urt_depth_mean(n)).epsilon(1e-3));
    }
    CHECK(urt_branches_mean(4) == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
    CHECK(urt_branches_variance(4) == doctest::Approx(17.0 / 36.0).epsilon(1e-14));
    CHECK(urt_depth_mean(10) == doctest::Approx(harmonic(9)).epsilon(1e-14));
}

TEST_CASE("ties push the at-least counts up, not down") {
    // A skewed digit law produces more descendants-heavy nodes than the
    // uniform law on the same number of piles.
    for (std::int64_t n : {6, 10, 14}) {
        for (std::int64_t k = 1; k <= 3; ++k) {
            CHECK(expected_at_least_k(n, k, p532) >=
                  expected_at_least_k_uniform(n, k, 3) - 1e-12);
            CHECK(expected_at_least_k_uniform(n, k, 3) >=
                  expected_at_least_k_urt(n, k) - 1e-12);
        }
    }
    CHECK(expected_at_least_k_urt(8, 2) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(expected_exactly_k_urt(8, 1) == doctest::Approx(8.0 / 6.0).epsilon(1e-14));
    CHECK(expected_exactly_k_urt(8, 7) == 1.0);
    CHECK(expected_exactly_k_urt(5, 4) == 1.0);
}

TEST_CASE("position pmf is a distribution") {
    for (std::int64_t n : {3, 5, 9}) {
        for (const ProbabilityVector& p :
             {ProbabilityVector::uniform(2), ProbabilityVector::uniform(4), p532}) {
            double total = 0.0;
            for (std::int64_t pos = 2; pos <= n; ++pos) {
                double q = position_pmf(n, pos, p);
                CHECK(q >= 0.0);
                total += q;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // One pile: the deck never moves, the largest card stays at the bottom.
    CHECK(position_pmf(6, 6, ProbabilityVector::uniform(1)) == 1.0);
    CHECK(position_pmf(6, 4, ProbabilityVector::uniform(1)) == 0.0);
    // Many piles: close to uniform over the n-1 slots.
    for (std::int64_t pos = 2; pos <= 5; ++pos)
        CHECK(position_pmf(5, pos, ProbabilityVector::uniform(4000)) ==
              doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("depth and position match brute force") {
    CHECK(expected_depth(7, ProbabilityVector::uniform(2)) ==
          doctest::Approx(brute_mean(7, ProbabilityVector::uniform(2), stream::depth_of_n))
              .epsilon(1e-11));
    CHECK(expected_depth(6, ProbabilityVector::uniform(3)) ==
          doctest::Approx(brute_mean(6, ProbabilityVector::uniform(3), stream::depth_of_n))
              .epsilon(1e-11));
    CHECK(expected_depth(8, p532) ==
          doctest::Approx(brute_mean(8, p532, stream::depth_of_n)).epsilon(1e-11));

    // Position pmf point values against direct enumeration.
    for (std::int64_t pos = 2; pos <= 6; ++pos) {
        double acc = 0.0;
        enumerate_digit_words(6, p532, [&](std::span<const std::int32_t> d, double w) {
            if (stream::position_of_n(d) == pos) acc += w;
        });
        CHECK(position_pmf(6, pos, p532) == doctest::Approx(acc).epsilon(1e-11));
    }
}

TEST_CASE("distance bounds") {
    CHECK(tv_bound_uniform(2, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tv_bound_uniform(3, 3) == doctest::Approx(7.0 / 9.0).epsilon(1e-14));
    CHECK(tv_bound_general(3, ProbabilityVector::uniform(2)) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // Clamped at one once the quadratic term blows past it.
    CHECK(tv_bound_general(30, p532) == 1.0);

    double b1 = wasserstein_clt_bound(0, 1.0);
    CHECK(b1 == doctest::Approx(1.0 + std::sqrt(28.0 / M_PI)).epsilon(1e-12));
    CHECK(b1 == doctest::Approx(3.98540).epsilon(1e-5));
    // Scales as 1/sigma, so quadrupling n halves the bound.
    CHECK(wasserstein_clt_bound(2, 10.0) ==
          doctest::Approx(wasserstein_clt_bound(2, 20.0) * 2.0).epsilon(1e-13));
    CHECK(wasserstein_clt_bound(1, 5.0) > wasserstein_clt_bound(0, 5.0));
}

TEST_CASE("report assembly clamps rounding debris only") {
    MomentReport r = make_report("branches", "uniform", 5, -1, 1.5, -5e-10, "branches-variance");
    REQUIRE(r.variance.has_value());
    CHECK(*r.variance == 0.0);
    CHECK(r.variance_clamped);

    MomentReport big = make_report("branches", "uniform", 5, -1, 1.5, -1e-3, "branches-variance");
    CHECK(*big.variance == -1e-3);
    CHECK(big.variance_clamped);

    MomentReport none = make_report("depth", "p", 5, -1, 2.0, std::nullopt, "depth-mean");
    CHECK(!none.variance.has_value());
    CHECK(!none.variance_clamped);
    CHECK(none.statistic == "depth");
    CHECK(none.n == 5);
}

TEST_CASE("index ranges are enforced") {
    CHECK_THROWS_AS(expected_branches(1, p532), domain_error);
    CHECK_THROWS_AS(variance_branches(2, p532), domain_error);
    CHECK_THROWS_AS(expected_at_least_k(5, 5, p532), domain_error);
    CHECK_THROWS_AS(expected_at_least_k(5, -1, p532), domain_error);
    CHECK_THROWS_AS(variance_at_least_k(5, 2, p532), domain_error);
    CHECK_THROWS_AS(variance_exactly_k(7, 2, p532), domain_error);
    CHECK_THROWS_AS(expected_at_least_k_urt(5, 5), domain_error);
    CHECK_THROWS_AS(position_pmf(5, 1, p532), domain_error);
    CHECK_THROWS_AS(position_pmf(5, 6, p532), domain_error);
    CHECK_THROWS_AS(tv_bound_general(2, p532), domain_error);
    CHECK_THROWS_AS(tv_bound_uniform(5, 4), domain_error);
    CHECK_THROWS_AS(wasserstein_clt_bound(1, 0.0), domain_error);
    CHECK_THROWS_AS(wasserstein_clt_bound(-1, 1.0), domain_error);
}
