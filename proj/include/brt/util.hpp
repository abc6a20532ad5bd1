#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace brt {

inline constexpr const char* tool_version = "1.0.0";

// Compensated (Kahan) accumulator for long sums.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// sum_{t=0}^{m-1} x^t y^{m-1-t} == (x^m - y^m)/(x - y), continuous at x == y.
// Both arguments must lie in [0, 1]; every term of the sum is nonnegative, so
// the quotient is evaluated through log1p/expm1 to dodge the cancellation the
// subtraction form suffers when x ~ y.
inline double geom_pair(double x, double y, std::int64_t m) {
    if (m <= 0) return 0.0;
    if (m == 1) return 1.0;
    double lo = x < y ? x : y;
    double hi = x < y ? y : x;
    if (hi == 0.0) return 0.0;
    double hipow = std::pow(hi, double(m - 1));
    double d = (lo - hi) / hi;  // rho - 1, in [-1, 0]
    if (d == 0.0) return double(m) * hipow;
    double num = -std::expm1(double(m) * std::log1p(d));  // 1 - rho^m
    return hipow * num / (-d);
}

// sum_{t=0}^{m-1} x^t == (1 - x^m)/(1 - x), continuous at x == 1. x in [0, 1].
inline double geom_run(double x, std::int64_t m) {
    if (m <= 0) return 0.0;
    if (x == 1.0) return double(m);
    double num = -std::expm1(double(m) * std::log1p(x - 1.0));  // 1 - x^m
    return num / (1.0 - x);
}

// Complete homogeneous sum of degree m in three variables:
// sum_{A+B+C=m} x^A y^B z^C. All arguments in [0, 1]; all terms nonnegative.
inline double homog3(double x, double y, double z, std::int64_t m) {
    if (m < 0) return 0.0;
    KahanSum acc;
    double zp = 1.0;
    for (std::int64_t c = 0; c <= m; ++c) {
        acc.add(zp * geom_pair(x, y, m - c + 1));
        if (zp == 0.0) break;
        zp *= z;
    }
    return acc.value();
}

// Environment-variable override helper: returns fallback when unset/invalid.
inline std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') return fallback;
    return parsed;
}

inline std::uint64_t default_enum_cap() {
    return env_u64("BRT_ENUM_CAP", std::uint64_t(1) << 24);
}

// Worker count for the parallel kernels: an explicit request wins, then the
// BRT_WORKERS environment variable, then the OpenMP default (1 when built
// without OpenMP). Results never depend on this; only wall time does.
std::int64_t resolve_workers(std::int64_t requested);

}  // namespace brt
