#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "brt/errors.hpp"
#include "brt/formulas.hpp"
#include "brt/mc.hpp"
#include "brt/prob.hpp"

using namespace brt;

namespace {

const ProbabilityVector p532 = ProbabilityVector::normalized({0.5, 0.3, 0.2});

}  // namespace

TEST_CASE("worker count never changes the numbers") {
    EstimateReport base = estimate_moments(300, p532, Statistic::branches, -1, 20000, 7, 1);
    for (std::int64_t workers : {2, 4, 16}) {
        EstimateReport r = estimate_moments(300, p532, Statistic::branches, -1, 20000, 7, workers);
        CHECK(r.mean == base.mean);
        CHECK(r.variance == base.variance);
        CHECK(r.se_mean == base.se_mean);
        CHECK(r.se_variance == base.se_variance);
    }
}

TEST_CASE("chunked accumulation matches the serial reference") {
    EstimateReport chunked = estimate_moments(150, p532, Statistic::at_least_k, 1, 30000, 11, 4);
    EstimateReport serial = estimate_moments_serial(150, p532, Statistic::at_least_k, 1, 30000, 11);
    CHECK(chunked.mean == doctest::Approx(serial.mean).epsilon(1e-12));
    CHECK(chunked.variance == doctest::Approx(serial.variance).epsilon(1e-10));
    CHECK(chunked.se_mean == doctest::Approx(serial.se_mean).epsilon(1e-10));
    CHECK(chunked.statistic == "atleast-1");
    CHECK(chunked.model == "p");
    CHECK(chunked.samples == 30000);
    CHECK(chunked.seed == 11);
}

TEST_CASE("one pile has zero spread") {
    EstimateReport r = estimate_moments(50, ProbabilityVector::uniform(1),
                                        Statistic::branches, -1, 5000, 3, 2);
    CHECK(r.mean == 1.0);
    CHECK(r.variance == 0.0);
    CHECK(r.se_mean == 0.0);

    EstimateReport d = estimate_moments(50, ProbabilityVector::uniform(1),
                                        Statistic::depth_of_n, -1, 5000, 3, 2);
    CHECK(d.mean == 49.0);
    CHECK(d.variance == 0.0);
}

TEST_CASE("estimates land within four standard errors") {
    struct Case {
        std::int64_t n;
        ProbabilityVector p;
        Statistic stat;
        std::int64_t k;
        double truth;
        double truth_var;  // negative when not checked
    };
    std::vector<Case> cases = {
        {100, ProbabilityVector::uniform(3), Statistic::branches, -1,
         expected_branches_uniform(100, 3), variance_branches_uniform(100, 3)},
        {128, p532, Statistic::at_least_k, 1, expected_at_least_k(128, 1, p532),
         variance_at_least_k(128, 1, p532)},
        {64, ProbabilityVector::uniform(2), Statistic::depth_of_n, -1,
         expected_depth_uniform(64, 2), -1.0},
        {100, ProbabilityVector::uniform(2), Statistic::exactly_k, 0,
         expected_exactly_k_uniform(100, 0, 2), variance_exactly_k_uniform(100, 0, 2)},
    };
    for (const auto& c : cases) {
        EstimateReport r = estimate_moments(c.n, c.p, c.stat, c.k, 40000, 12345, 0);
        CHECK(std::abs(r.mean - c.truth) <= 4.0 * r.se_mean);
        if (c.truth_var >= 0.0)
            CHECK(std::abs(r.variance - c.truth_var) <= 4.0 * r.se_variance);
        CHECK(r.half_width == doctest::Approx(2.5758293035489004 * r.se_mean).epsilon(1e-13));
        CHECK(r.wall_seconds >= 0.0);
    }

    // Position of the largest card against its pmf mean.
    double pos_truth = 0.0;
    for (std::int64_t pos = 2; pos <= 40; ++pos)
        pos_truth += double(pos) * position_pmf(40, pos, ProbabilityVector::uniform(2));
    EstimateReport r = estimate_moments(40, ProbabilityVector::uniform(2),
                                        Statistic::position_of_n, -1, 40000, 99, 0);
    CHECK(std::abs(r.mean - pos_truth) <= 4.0 * r.se_mean);
}

TEST_CASE("standard error shrinks like the square root of the sample count") {
    EstimateReport small = estimate_moments(200, p532, Statistic::branches, -1, 10000, 5, 0);
    EstimateReport big = estimate_moments(200, p532, Statistic::branches, -1, 40000, 5, 0);
    CHECK(big.se_mean == doctest::Approx(small.se_mean / 2.0).epsilon(0.2));
}

TEST_CASE("normal approximation diagnostic at moderate size") {
    CltReport r = clt_check(2000, ProbabilityVector::uniform(3), 1, 20000, 9, 1.0, 0);
    CHECK(r.mean_formula ==
          doctest::Approx(expected_at_least_k_uniform(2000, 1, 3)).epsilon(1e-12));
    CHECK(r.sd_formula ==
          doctest::Approx(std::sqrt(variance_at_least_k_uniform(2000, 1, 3))).epsilon(1e-12));
    // At n = 2000 and 20000 draws the empirical CDF tracks the normal well
    // inside 0.05; the 1.0 threshold makes the gate itself never bind here.
    CHECK(r.ks < 0.05);
    CHECK(r.pass);
    CHECK(r.n == 2000);
    CHECK(r.k == 1);

    // Same seed, same numbers, independent of the worker count.
    CltReport again = clt_check(2000, ProbabilityVector::uniform(3), 1, 20000, 9, 1.0, 3);
    CHECK(again.ks == r.ks);
}

TEST_CASE("strong law trajectory settles near its limit") {
    std::vector<std::int64_t> grid = {100, 1000, 10000};
    auto rows = strong_law_trajectory(0, 2, grid, 17);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == grid[i]);
        CHECK(rows[i].limit == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(rows[i].gap == doctest::Approx(rows[i].value - rows[i].limit).epsilon(1e-14));
    }
    CHECK(std::abs(rows.back().gap) < 0.05);

    auto rows1 = strong_law_trajectory(1, 3, grid, 17);
    CHECK(rows1.back().limit == doctest::Approx(4.0 / 27.0).epsilon(1e-14));
    CHECK(std::abs(rows1.back().gap) < 0.05);
}

TEST_CASE("convergence sweeps report closed-form gaps") {
    auto rows = convergence_sweep("branches-vs-a", {10, 100, 1000}, 50);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.limit == doctest::Approx(harmonic(49)).epsilon(1e-13));
        CHECK(r.value == doctest::Approx(expected_branches_uniform(50, r.param)).epsilon(1e-13));
    }
    CHECK(std::abs(rows.back().gap) < std::abs(rows.front().gap));

    auto rate = convergence_sweep("depth-rate-vs-n", {50, 200, 800}, 0, &p532);
    CHECK(rate.back().limit == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(rate.back().gap) < std::abs(rate.front().gap));

    auto varrows = convergence_sweep("varbranches-vs-a", {100, 10000}, 1000);
    CHECK(varrows.back().limit ==
          doctest::Approx(harmonic(999) - harmonic2(999)).epsilon(1e-12));
    CHECK(std::abs(varrows.back().gap) < std::abs(varrows.front().gap));

    CHECK_THROWS_AS(convergence_sweep("no-such-quantity", {10}, 5), usage_error);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(estimate_moments(1, p532, Statistic::branches, -1, 100, 1), usage_error);
    CHECK_THROWS_AS(estimate_moments(10, p532, Statistic::branches, -1, 0, 1), usage_error);
    CHECK_THROWS_AS(estimate_moments(10, p532, Statistic::at_least_k, -1, 100, 1), usage_error);
    CHECK_THROWS_AS(clt_check(100, p532, 0, 1000, 1), usage_error);
    CHECK_THROWS_AS(clt_check(100, p532, 1, 1000, 1, 0.0035, 0, 10), resource_limit_error);
    CHECK_THROWS_AS(strong_law_trajectory(0, 2, {100, 50}, 1), usage_error);
    CHECK_THROWS_AS(strong_law_trajectory(0, 2, {}, 1), usage_error);
}
