// Acceptance gate: one criterion per line, [PASS]/[FAIL] with the key
// numbers, exit code = number of failures. --only N runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "brt/formulas.hpp"
#include "brt/mc.hpp"
#include "brt/oracle.hpp"
#include "brt/prob.hpp"
#include "brt/shuffle.hpp"
#include "brt/stats.hpp"
#include "brt/tree.hpp"

using namespace brt;

namespace {

double now_s() {
    using Clock = std::chrono::steady_clock;
    static const Clock::time_point start = Clock::now();
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const ProbabilityVector p532 = ProbabilityVector::normalized({0.5, 0.3, 0.2});

std::string fmt(double x) {
    std::ostringstream o;
    o << std::setprecision(6) << x;
    return o.str();
}

// Shared tolerance rule for the formula-vs-oracle grid: 1e-9 relative, or
// 1e-12 absolute when the target is below 1e-3 in magnitude.
struct GridChecker {
    std::int64_t checks = 0;
    std::int64_t failures = 0;
    double worst_rel = 0.0;
    double worst_abs = 0.0;
    std::string worst_where;

    void check(double closed, double enumerated, const std::string& where) {
        ++checks;
        double ae = std::abs(closed - enumerated);
        bool ok;
        if (std::abs(closed) > 1e-3) {
            double rel = ae / std::abs(closed);
            ok = rel <= 1e-9;
            if (rel > worst_rel) {
                worst_rel = rel;
                worst_where = where;
            }
        } else {
            ok = ae <= 1e-12;
            worst_abs = std::max(worst_abs, ae);
        }
        if (!ok) {
            ++failures;
            if (failures <= 3)
                std::cerr << "    grid mismatch at " << where << ": closed " << std::setprecision(17)
                          << closed << " vs enumerated " << enumerated << "\n";
        }
    }
};

struct Model {
    std::string name;
    ProbabilityVector p;
    bool uniform;
    std::int64_t a;
};

std::vector<Model> grid_models() {
    std::vector<Model> m;
    for (std::int64_t a = 1; a <= 3; ++a)
        m.push_back({"uniform-" + std::to_string(a), ProbabilityVector::uniform(a), true, a});
    m.push_back({"p532", p532, false, 0});
    return m;
}

bool criterion1(std::ostream& out) {
    double t0 = now_s();
    GridChecker g;
    for (const Model& m : grid_models()) {
        for (std::int64_t n = 2; n <= 9; ++n) {
            std::string tag = m.name + ",n=" + std::to_string(n);

            DistributionTable tb =
                exact_brt_distribution(n, m.p, Statistic::branches, -1, default_enum_cap(), 1);
            g.check(expected_branches(n, m.p), tb.mean(), tag + ",E[B]");
            if (m.uniform)
                g.check(expected_branches_uniform(n, m.a), tb.mean(), tag + ",E[B]u");
            if (n >= 3) {
                g.check(variance_branches(n, m.p), tb.variance(), tag + ",Var[B]");
                if (m.uniform)
                    g.check(variance_branches_uniform(n, m.a), tb.variance(), tag + ",Var[B]u");
            }

            DistributionTable td =
                exact_brt_distribution(n, m.p, Statistic::depth_of_n, -1, default_enum_cap(), 1);
            g.check(expected_depth(n, m.p), td.mean(), tag + ",E[depth]");
            if (m.uniform)
                g.check(expected_depth_uniform(n, m.a), td.mean(), tag + ",E[depth]u");

            DistributionTable tp = exact_brt_distribution(n, m.p, Statistic::position_of_n, -1,
                                                          default_enum_cap(), 1);
            std::map<std::int64_t, double> pos;
            for (std::size_t i = 0; i < tp.support.size(); ++i) pos[tp.support[i]] = tp.prob[i];
            for (std::int64_t v = 2; v <= n; ++v) {
                auto it = pos.find(v);
                double mass = it == pos.end() ? 0.0 : it->second;
                g.check(position_pmf(n, v, m.p), mass, tag + ",pos[" + std::to_string(v) + "]");
            }

            for (std::int64_t k = 0; k <= std::min<std::int64_t>(3, n - 1); ++k) {
                std::string kt = tag + ",k=" + std::to_string(k);
                DistributionTable ty = exact_brt_distribution(n, m.p, Statistic::at_least_k, k,
                                                              default_enum_cap(), 1);
                g.check(expected_at_least_k(n, k, m.p), ty.mean(), kt + ",E[Y]");
                if (m.uniform)
                    g.check(expected_at_least_k_uniform(n, k, m.a), ty.mean(), kt + ",E[Y]u");
                if (n >= 2 * k + 2) {
                    g.check(variance_at_least_k(n, k, m.p), ty.variance(), kt + ",Var[Y]");
                    if (m.uniform)
                        g.check(variance_at_least_k_uniform(n, k, m.a), ty.variance(),
                                kt + ",Var[Y]u");
                }

                DistributionTable tx = exact_brt_distribution(n, m.p, Statistic::exactly_k, k,
                                                              default_enum_cap(), 1);
                g.check(expected_exactly_k(n, k, m.p), tx.mean(), kt + ",E[X]");
                if (m.uniform) {
                    g.check(expected_exactly_k_uniform(n, k, m.a), tx.mean(), kt + ",E[X]u");
                    if (n >= 2 * k + 4)
                        g.check(variance_exactly_k_uniform(n, k, m.a), tx.variance(),
                                kt + ",Var[X]u");
                }
            }
        }
    }
    double dt = now_s() - t0;
    out << g.checks << " checks, worst rel " << fmt(g.worst_rel) << " (" << g.worst_where
        << "), worst small-value abs " << fmt(g.worst_abs) << ", " << fmt(dt) << "s";
    return g.failures == 0 && dt < 120.0;
}

bool criterion2(std::ostream& out) {
    auto law = exact_tree_law(4, ProbabilityVector::uniform(2));
    auto mass = [&](std::vector<std::int32_t> parents) {
        auto it = law.find(parents);
        return it == law.end() ? 0.0 : it->second;
    };
    double worst = 0.0;
    worst = std::max(worst, std::abs(mass({1, 2, 3}) - 0.5));
    const std::vector<std::vector<std::int32_t>> eighths = {
        {1, 2, 2}, {1, 2, 1}, {1, 1, 2}, {1, 1, 3}};
    for (const auto& t : eighths) worst = std::max(worst, std::abs(mass(t) - 0.125));
    worst = std::max(worst, mass({1, 1, 1}));

    DistributionTable b =
        exact_brt_distribution(4, ProbabilityVector::uniform(2), Statistic::branches);
    double em = std::abs(b.mean() - 11.0 / 8.0);
    double ev = std::abs(b.variance() - 15.0 / 64.0);
    out << "worst atom err " << fmt(worst) << ", |E[B]-11/8| " << fmt(em) << ", |Var[B]-15/64| "
        << fmt(ev);
    return worst <= 1e-12 && em <= 1e-12 && ev <= 1e-12;
}

bool criterion3(std::ostream& out) {
    DigitWord w;
    w.a = 3;
    w.digits = {1, 2, 3, 1, 3, 1, 1};
    ShufflePermutation g = permutation_from_digits(w);

    std::string inv;
    for (std::int32_t c : g.inverse()) inv += char('0' + c);

    bool ok = g.to_string() == "2673845" && inv == "2578346";

    RecursiveTree fig4 = tree_from_permutation(g);
    ok = ok && fig4.parent_array() == std::vector<std::int32_t>{1, 2, 3, 4, 2, 6, 3};
    ok = ok && fig4.to_edge_list() == "2 1\n3 2\n4 3\n5 4\n6 2\n7 6\n8 3\n";

    RecursiveTree fig1 = tree_from_permutation(parse_permutation("16387254"));
    ok = ok && fig1.parent_array() == std::vector<std::int32_t>{1, 1, 2, 2, 1, 3, 3};
    ok = ok && fig1.to_edge_list() == "2 1\n3 1\n4 2\n5 2\n6 1\n7 3\n8 3\n";

    std::int64_t depth = depth_of_node_n(tree_from_permutation(parse_permutation("12574863")));
    ok = ok && depth == 3;

    out << "gamma " << g.to_string() << ", inverse " << inv << ", edge sets "
        << (ok ? "matched" : "MISMATCH") << ", depth(8) = " << depth;
    return ok;
}

bool criterion4(std::ostream& out) {
    std::int64_t perms = 0, mismatches = 0;
    for (std::int64_t n = 2; n <= 8; ++n) {
        std::vector<std::int32_t> vals(n - 1);
        for (std::int64_t i = 0; i < n - 1; ++i) vals[i] = std::int32_t(i + 2);
        do {
            ++perms;
            ShufflePermutation g(vals);
            RecursiveTree t = tree_from_permutation(g);
            if (!(permutation_from_tree(t) == g)) ++mismatches;
            if (count_branches(t) != count_anti_records(g)) ++mismatches;
        } while (std::next_permutation(vals.begin(), vals.end()));

        // The inverse direction over every increasing tree (mixed-radix walk
        // over parent choices).
        std::vector<std::int32_t> parents(n - 1, 1);
        while (true) {
            RecursiveTree t(parents);
            if (!(tree_from_permutation(permutation_from_tree(t)) == t)) ++mismatches;
            std::int64_t i = n - 2;
            while (i >= 0 && parents[i] == i + 1) parents[i--] = 1;
            if (i < 0) break;
            ++parents[i];
        }
    }

    double law_worst = 0.0;
    for (std::int64_t a = 1; a <= 3; ++a) {
        ProbabilityVector p = ProbabilityVector::uniform(a);
        for (std::int64_t n = 2; n <= 6; ++n) {
            auto inv = exact_inverse_shuffle_law(n, p);
            auto fwd = exact_forward_shuffle_law(n, p);
            if (inv.size() != fwd.size()) ++mismatches;
            for (const auto& [perm, m] : inv) {
                auto it = fwd.find(perm);
                if (it == fwd.end()) { ++mismatches; continue; }
                law_worst = std::max(law_worst, std::abs(m - it->second));
            }
        }
    }
    out << perms << " permutations round-tripped both ways, " << mismatches
        << " mismatches, shuffle law worst atom gap " << fmt(law_worst);
    return mismatches == 0 && law_worst <= 1e-12;
}

bool criterion5(std::ostream& out) {
    double h9 = harmonic(9);
    bool ok = true;
    double worst_ratio = 0.0;  // |gap| * a / 10, must stay <= 1
    for (std::int64_t a : {1000, 10000, 100000, 1000000}) {
        double gb = std::abs(expected_branches_uniform(10, a) - h9);
        double gd = std::abs(expected_depth_uniform(10, a) - h9);
        worst_ratio = std::max(worst_ratio, std::max(gb, gd) * double(a) / 10.0);
        ok = ok && gb <= 10.0 / double(a) && gd <= 10.0 / double(a);
    }

    double target = harmonic(999) - harmonic2(999);
    std::vector<double> gaps;
    for (std::int64_t a : {1000, 10000, 100000})
        gaps.push_back(std::abs(variance_branches_uniform(1000, a) - target));
    bool trend = gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 0.01;
    ok = ok && trend;

    double urt_worst = 0.0;
    for (std::int64_t n = 3; n <= 8; ++n) {
        DistributionTable t = exact_urt_distribution(n, Statistic::branches);
        urt_worst = std::max(urt_worst,
                             std::abs(t.variance() - (harmonic(n - 1) - harmonic2(n - 1))));
    }
    ok = ok && urt_worst <= 1e-9;

    out << "mean gap*a/10 worst " << fmt(worst_ratio) << ", Var[B] gaps " << fmt(gaps[0]) << " > "
        << fmt(gaps[1]) << " > " << fmt(gaps[2]) << ", URT oracle variance err "
        << fmt(urt_worst);
    return ok;
}

bool criterion6(std::ostream& out) {
    bool ok = true;
    double worst_margin = -1.0;  // tv - bound, should stay <= 0
    std::int64_t cases = 0;

    for (std::int64_t n = 3; n <= 7; ++n) {
        for (std::int64_t k : {1, 2}) {
            if (k > n - 1) continue;
            DistributionTable urt = exact_urt_distribution(n, Statistic::at_least_k, k);
            for (std::int64_t a = n; a <= 12; ++a) {
                DistributionTable brt = exact_brt_distribution(n, ProbabilityVector::uniform(a),
                                                               Statistic::at_least_k, k);
                double tv = exact_tv_distance(urt, brt);
                double margin = tv - tv_bound_uniform(n, a);
                worst_margin = std::max(worst_margin, margin);
                ok = ok && margin <= 1e-12;
                ++cases;
            }
            for (const ProbabilityVector& p :
                 {p532, ProbabilityVector::normalized({0.7, 0.3}),
                  ProbabilityVector::normalized({0.4, 0.3, 0.2, 0.1})}) {
                DistributionTable brt =
                    exact_brt_distribution(n, p, Statistic::at_least_k, k);
                double tv = exact_tv_distance(urt, brt);
                double margin = tv - tv_bound_general(n, p);
                worst_margin = std::max(worst_margin, margin);
                ok = ok && margin <= 1e-12;
                ++cases;
            }
        }
    }
    out << cases << " (model, n, k) pairs, worst tv-minus-bound margin " << fmt(worst_margin);
    return ok;
}

bool criterion7(std::ostream& out) {
    double t0 = now_s();
    const std::uint64_t samples = 1000000;
    const std::uint64_t seed = 42;

    EstimateReport b = estimate_moments(1000, ProbabilityVector::uniform(3),
                                        Statistic::branches, -1, samples, seed, 4);
    double zb = std::abs(b.mean - expected_branches_uniform(1000, 3)) / b.se_mean;

    EstimateReport y = estimate_moments(10000, p532, Statistic::at_least_k, 2, samples, seed, 4);
    double zy = std::abs(y.mean - expected_at_least_k(10000, 2, p532)) / y.se_mean;
    double slope = variance_at_least_k_slope(2, p532);
    double slope_rel = std::abs(y.variance / 10000.0 - slope) / slope;

    EstimateReport d = estimate_moments(1000, ProbabilityVector::uniform(2),
                                        Statistic::depth_of_n, -1, samples, seed, 4);
    double zd = std::abs(d.mean - expected_depth_uniform(1000, 2)) / d.se_mean;

    double dt = now_s() - t0;
    out << "|z| = " << fmt(zb) << " (branches), " << fmt(zy) << " (atleast-2), " << fmt(zd)
        << " (depth); Var/n within " << fmt(100.0 * slope_rel) << "% of slope; " << fmt(dt)
        << "s";
    return zb <= 4.0 && zy <= 4.0 && zd <= 4.0 && slope_rel <= 0.05 && dt < 300.0;
}

bool criterion8(std::ostream& out) {
    CltReport r = clt_check(100000, ProbabilityVector::uniform(3), 1, 1000000, 42, 0.0035);

    double sig1 = std::sqrt(variance_at_least_k_uniform(100000, 1, 3));
    double sig4 = std::sqrt(variance_at_least_k_uniform(400000, 1, 3));
    double ratio = wasserstein_clt_bound(1, sig1) / wasserstein_clt_bound(1, sig4);

    out << "KS " << fmt(r.ks) << " vs 0.0035, Wasserstein bound ratio n->4n " << fmt(ratio)
        << ", " << fmt(r.wall_seconds) << "s";
    return r.pass && std::abs(ratio - 2.0) <= 0.1;
}

bool criterion9(std::ostream& out) {
    auto r0 = strong_law_trajectory(0, 2, {1000000}, 42);
    auto r1 = strong_law_trajectory(1, 3, {1000000}, 42);
    double g0 = std::abs(r0[0].value - 0.25);
    double g1 = std::abs(r1[0].value - 4.0 / 27.0);
    out << "X_0/n (a=2) = " << fmt(r0[0].value) << " vs limit 0.25 (|gap| " << fmt(g0)
        << "), X_1/n (a=3) = " << fmt(r1[0].value) << " vs limit 4/27 (|gap| " << fmt(g1) << ")";
    return g0 <= 0.005 && g1 <= 0.005;
}

bool criterion10(std::ostream& out) {
    double worst = 0.0;
    std::int64_t pairs = 0;
    for (std::int64_t a = 1; a <= 2; ++a) {
        for (std::int64_t k = 0; k <= 2; ++k) {
            CovarianceReport r = oracle_covariance_check(8, k, ProbabilityVector::uniform(a));
            worst = std::max(worst, r.max_abs_err);
            pairs += std::int64_t(r.pairs.size());
        }
    }
    out << pairs << " dependent pairs, worst |closed - enumerated| " << fmt(worst);
    return worst <= 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (std::strncmp(argv[i], "--only=", 7) == 0)
            only = std::atoi(argv[i] + 7);
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    std::vector<Criterion> criteria = {
        {1, "formula-vs-oracle grid", criterion1},
        {2, "n=4 a=2 tree law", criterion2},
        {3, "worked-example goldens", criterion3},
        {4, "bijection and shuffle equivalence", criterion4},
        {5, "limit convergence", criterion5},
        {6, "total variation bounds", criterion6},
        {7, "Monte Carlo consistency", criterion7},
        {8, "CLT and Wasserstein scaling", criterion8},
        {9, "strong law trajectories", criterion9},
        {10, "covariance cross-check", criterion10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::ostringstream detail;
        bool ok;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail << "exception: " << e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << " (" << c.name
                  << "): " << detail.str() << "\n"
                  << std::flush;
    }
    if (failures == 0)
        std::cout << "acceptance: all criteria passed\n";
    else
        std::cout << "acceptance: " << failures << " criterion(s) failed\n";
    return failures;
}
