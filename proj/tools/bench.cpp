// Timing comparison between the serial reference implementations and the
// OpenMP kernels, for the enumeration oracle and the Monte Carlo estimator.
// The parallel results must match the serial ones; the max deviation is
// printed next to the speedup.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "brt/dist.hpp"
#include "brt/mc.hpp"
#include "brt/oracle.hpp"
#include "brt/prob.hpp"

namespace {

std::int64_t arg_i64(int argc, char** argv, const char* name, std::int64_t fallback) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], name) == 0) return std::strtoll(argv[i + 1], nullptr, 10);
    return fallback;
}

double wall() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::int64_t n_oracle = arg_i64(argc, argv, "--oracle-n", 12);
    const std::int64_t a = arg_i64(argc, argv, "--a", 3);
    const std::int64_t n_mc = arg_i64(argc, argv, "--mc-n", 10000);
    const std::int64_t samples = arg_i64(argc, argv, "--samples", 20000);
    const std::int64_t workers = arg_i64(argc, argv, "--workers", 0);
    const std::uint64_t cap = std::uint64_t(1) << 40;

    brt::ProbabilityVector p = brt::ProbabilityVector::uniform(a);
    std::printf("workers: %lld (0 = library default)\n", (long long)workers);

    {
        std::printf("\noracle: exact branches law, n=%lld a=%lld (%lld^%lld words)\n",
                    (long long)n_oracle, (long long)a, (long long)a, (long long)(n_oracle - 1));
        double t0 = wall();
        auto serial =
            brt::exact_brt_distribution_serial(n_oracle, p, brt::Statistic::branches, -1, cap);
        double t1 = wall();
        auto par = brt::exact_brt_distribution(n_oracle, p, brt::Statistic::branches, -1, cap,
                                               workers);
        double t2 = wall();
        double dev = 0;
        for (std::size_t i = 0; i < serial.prob.size(); ++i) {
            double d = serial.prob[i] - par.prob[i];
            if (d < 0) d = -d;
            if (d > dev) dev = d;
        }
        std::printf("  serial   %8.3fs\n", t1 - t0);
        std::printf("  parallel %8.3fs   speedup %.2fx   max |dp| %.3g\n", t2 - t1,
                    (t1 - t0) / (t2 - t1 > 0 ? t2 - t1 : 1e-9), dev);
    }

    {
        std::printf("\nestimator: branches, n=%lld a=%lld, %lld samples\n", (long long)n_mc,
                    (long long)a, (long long)samples);
        double t0 = wall();
        auto serial = brt::estimate_moments_serial(n_mc, p, brt::Statistic::branches, -1,
                                                   std::uint64_t(samples), 1);
        double t1 = wall();
        auto par = brt::estimate_moments(n_mc, p, brt::Statistic::branches, -1,
                                         std::uint64_t(samples), 1, workers);
        double t2 = wall();
        double dmean = serial.mean - par.mean;
        if (dmean < 0) dmean = -dmean;
        std::printf("  serial   %8.3fs  mean %.12g\n", t1 - t0, serial.mean);
        std::printf("  parallel %8.3fs  mean %.12g   speedup %.2fx   |dmean| %.3g\n", t2 - t1,
                    par.mean, (t1 - t0) / (t2 - t1 > 0 ? t2 - t1 : 1e-9), dmean);
    }

    return 0;
}
