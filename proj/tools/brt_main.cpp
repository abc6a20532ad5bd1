// Command-line front end: sample trees, evaluate closed-form moments, verify
// formulas against the enumeration oracle, and run the sampling experiments.
// JSON is the canonical output format; CSV is a projection of the same rows.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "brt/dist.hpp"
#include "brt/errors.hpp"
#include "brt/formulas.hpp"
#include "brt/mc.hpp"
#include "brt/oracle.hpp"
#include "brt/prob.hpp"
#include "brt/rng.hpp"
#include "brt/shuffle.hpp"
#include "brt/stats.hpp"
#include "brt/tree.hpp"
#include "brt/util.hpp"

namespace {

using json = nlohmann::ordered_json;

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    return q + "\"";
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw brt::usage_error("cannot open output file " + path);
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
}

// Geometric integer grid from lo to hi inclusive, deduplicated.
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, int points) {
    if (lo > hi) throw brt::usage_error("empty grid: lower bound exceeds upper bound");
    std::vector<std::int64_t> g;
    if (points < 2 || lo == hi) return {hi};
    double llo = std::log(double(lo)), lhi = std::log(double(hi));
    for (int i = 0; i < points; ++i) {
        double x = std::exp(llo + (lhi - llo) * double(i) / double(points - 1));
        std::int64_t v = std::llround(x);
        v = std::max(lo, std::min(hi, v));
        if (g.empty() || v > g.back()) g.push_back(v);
    }
    if (g.back() != hi) g.push_back(hi);
    return g;
}

struct CommonOpts {
    std::int64_t n = 0;
    std::int64_t k = -1;
    std::vector<double> p;
    std::int64_t a = 0;
    bool urt = false;
    bool normalize = false;
    std::uint64_t seed = 42;
    std::uint64_t samples = 0;
    std::int64_t workers = 0;
    std::uint64_t cap = 0;  // 0 = default (BRT_ENUM_CAP or 1 << 24)
    std::string format = "json";
    std::string out;
    std::string stat;
};

std::uint64_t effective_cap(const CommonOpts& o) {
    return o.cap > 0 ? o.cap : brt::default_enum_cap();
}

struct Model {
    std::string name;  // "p" | "uniform" | "urt"
    std::optional<brt::ProbabilityVector> pv;
    std::int64_t a = 0;  // digit alphabet size; 0 for urt
};

Model resolve_model(const CommonOpts& o, bool allow_urt) {
    int given = int(!o.p.empty()) + int(o.a > 0) + int(o.urt);
    if (given != 1)
        throw brt::usage_error(allow_urt ? "specify exactly one of --p, --a, --urt"
                                         : "specify exactly one of --p, --a");
    Model m;
    if (!o.p.empty()) {
        double sum = 0;
        for (double w : o.p) {
            if (!(w > 0.0)) throw brt::usage_error("--p entries must be strictly positive");
            sum += w;
        }
        if (o.normalize) {
            m.pv = brt::ProbabilityVector::normalized(o.p);
        } else if (std::abs(sum - 1.0) > 1e-12) {
            throw brt::usage_error("--p sums to " + fmt_double(sum) +
                                   "; pass --normalize to rescale");
        } else {
            m.pv = brt::ProbabilityVector(o.p);
        }
        m.name = "p";
        m.a = m.pv->size();
    } else if (o.a > 0) {
        m.pv = brt::ProbabilityVector::uniform(o.a);
        m.name = "uniform";
        m.a = o.a;
    } else {
        if (!allow_urt) throw brt::usage_error("--urt is not supported by this subcommand");
        m.name = "urt";
    }
    return m;
}

json model_json(const Model& m) {
    json j;
    j["model"] = m.name;
    if (m.name == "uniform") j["a"] = m.a;
    if (m.name == "p") j["p"] = m.pv->weights();
    return j;
}

json envelope(const std::string& subcommand, json config, json results) {
    json j;
    j["tool"] = "brt";
    j["version"] = brt::tool_version;
    j["subcommand"] = subcommand;
    j["config"] = std::move(config);
    j["results"] = std::move(results);
    return j;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows,
                      const json& config) {
    std::string text = "# brt " + std::string(brt::tool_version) + " config=" + config.dump() + "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        text += (i ? "," : "") + csv_cell(header[i]);
    text += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + csv_cell(r[i]);
        text += "\n";
    }
    return text;
}

// ---------------------------------------------------------------- sample --

int run_sample(const CommonOpts& o, std::int64_t count, const std::string& emit,
               const std::string& method) {
    if (o.n < 2) throw brt::usage_error("sample needs --n >= 2");
    if (count < 1) throw brt::usage_error("sample needs --count >= 1");
    Model m = resolve_model(o, false);

    json config = model_json(m);
    config["n"] = o.n;
    config["seed"] = o.seed;
    config["count"] = count;
    config["emit"] = emit;
    config["method"] = method;

    std::vector<std::vector<std::string>> csv_rows;
    std::string jsonl;
    for (std::int64_t i = 0; i < count; ++i) {
        brt::DigitSampler smp(brt::substream(o.seed, std::uint64_t(i)), *m.pv);
        brt::DigitWord w = brt::sample_digit_word(o.n, *m.pv, smp);
        brt::ShufflePermutation perm = method == "forward"
                                           ? brt::sample_forward_shuffle(o.n, *m.pv, smp)
                                           : brt::permutation_from_digits(w);
        brt::RecursiveTree tree = brt::tree_from_permutation(perm);

        json rec;
        rec["tool"] = "brt";
        rec["version"] = brt::tool_version;
        rec["subcommand"] = "sample";
        rec["index"] = i;
        rec["seed"] = o.seed;
        rec["n"] = o.n;
        rec["model"] = m.name;
        if (m.name == "uniform") rec["a"] = m.a;
        if (m.name == "p") rec["p"] = m.pv->weights();
        rec["method"] = method;
        std::string digits_s, perm_s, parents_s;
        if (emit == "digits") {
            rec["digits"] = w.digits;
            for (std::size_t t = 0; t < w.digits.size(); ++t)
                digits_s += (t ? " " : "") + std::to_string(w.digits[t]);
        }
        if (emit == "perm" || emit == "both") {
            perm_s = perm.to_string();
            rec["permutation"] = perm_s;
            rec["word"] = perm.word_string();
        }
        if (emit == "tree" || emit == "both") {
            rec["parents"] = tree.parent_array();
            parents_s = tree.to_parent_json();
        }
        jsonl += rec.dump() + "\n";
        csv_rows.push_back({std::to_string(i), std::to_string(o.n), m.name,
                            std::to_string(o.seed), digits_s, perm_s, parents_s});
    }

    if (o.format == "csv")
        write_output(o.out, csv_table({"index", "n", "model", "seed", "digits", "permutation",
                                       "parents"},
                                      csv_rows, config));
    else
        write_output(o.out, jsonl);
    return 0;
}

// --------------------------------------------------------------- moments --

json report_json(const brt::MomentReport& r) {
    json j;
    j["statistic"] = r.statistic;
    j["model"] = r.model;
    j["n"] = r.n;
    if (r.k >= 0) j["k"] = r.k;
    j["mean"] = r.mean;
    if (r.variance)
        j["variance"] = *r.variance;
    else
        j["variance"] = nullptr;
    j["variance_clamped"] = r.variance_clamped;
    j["formula"] = r.formula;
    return j;
}

int run_moments(const CommonOpts& o) {
    if (o.n < 2) throw brt::usage_error("moments needs --n >= 2");
    if (o.stat.empty()) throw brt::usage_error("moments needs --stat");
    brt::Statistic stat = brt::statistic_from_name(o.stat);
    Model m = resolve_model(o, true);
    std::int64_t k = o.k;
    if (brt::statistic_uses_k(stat) && k < 0)
        throw brt::usage_error(o.stat + " needs --k >= 0");

    const std::string fm = "." + m.name;
    double mean = 0;
    std::optional<double> var;
    std::string label = brt::statistic_name(stat);
    switch (stat) {
        case brt::Statistic::branches:
            if (m.name == "urt") {
                mean = brt::urt_branches_mean(o.n);
                var = brt::urt_branches_variance(o.n);
            } else if (m.name == "uniform") {
                mean = brt::expected_branches_uniform(o.n, m.a);
                var = brt::variance_branches_uniform(o.n, m.a);
            } else {
                mean = brt::expected_branches(o.n, *m.pv);
                var = brt::variance_branches(o.n, *m.pv);
            }
            break;
        case brt::Statistic::at_least_k:
            mean = m.name == "urt" ? brt::expected_at_least_k_urt(o.n, k)
                   : m.name == "uniform"
                       ? brt::expected_at_least_k_uniform(o.n, k, m.a)
                       : brt::expected_at_least_k(o.n, k, *m.pv);
            try {
                var = m.name == "urt" ? brt::variance_at_least_k_urt(o.n, k)
                      : m.name == "uniform"
                          ? brt::variance_at_least_k_uniform(o.n, k, m.a)
                          : brt::variance_at_least_k(o.n, k, *m.pv);
            } catch (const brt::domain_error&) {
                // variance closed form needs n >= 2k+2; mean alone is reported
            }
            break;
        case brt::Statistic::exactly_k:
            mean = m.name == "urt" ? brt::expected_exactly_k_urt(o.n, k)
                   : m.name == "uniform"
                       ? brt::expected_exactly_k_uniform(o.n, k, m.a)
                       : brt::expected_exactly_k(o.n, k, *m.pv);
            if (m.name != "urt") {
                try {
                    var = m.name == "uniform"
                              ? brt::variance_exactly_k_uniform(o.n, k, m.a)
                              : brt::variance_exactly_k(o.n, k, *m.pv);
                } catch (const brt::domain_error&) {
                    // variance closed form needs n >= 2k+4
                }
            }
            break;
        case brt::Statistic::depth_of_n:
            mean = m.name == "urt" ? brt::urt_depth_mean(o.n)
                   : m.name == "uniform" ? brt::expected_depth_uniform(o.n, m.a)
                                         : brt::expected_depth(o.n, *m.pv);
            break;
        case brt::Statistic::position_of_n:
            throw brt::usage_error(
                "position has no closed-form moments; use verify --stat position or "
                "experiment estimate");
    }
    if (brt::statistic_uses_k(stat)) label += "-" + std::to_string(k);
    brt::MomentReport rep = brt::make_report(label, m.name, o.n, k, mean, var,
                                             std::string(brt::statistic_name(stat)) + fm);

    json config = model_json(m);
    config["n"] = o.n;
    if (brt::statistic_uses_k(stat)) config["k"] = k;
    config["stat"] = o.stat;

    if (o.format == "csv") {
        std::vector<std::vector<std::string>> rows{
            {rep.statistic, rep.model, std::to_string(rep.n),
             rep.k >= 0 ? std::to_string(rep.k) : "", fmt_double(rep.mean),
             rep.variance ? fmt_double(*rep.variance) : "",
             rep.variance_clamped ? "true" : "false", rep.formula}};
        write_output(o.out, csv_table({"statistic", "model", "n", "k", "mean", "variance",
                                       "variance_clamped", "formula"},
                                      rows, config));
    } else {
        write_output(o.out,
                     envelope("moments", config, json::array({report_json(rep)})).dump(2));
    }
    return 0;
}

// ---------------------------------------------------------------- verify --

struct VCell {
    std::string statistic, moment, model;
    std::int64_t n = 0, k = -1, a = 0;
    double closed = 0, oracle = 0, abs_err = 0;
    std::string status;  // pass | fail | skip
    std::string note;
};

bool within_tol(double closed, double oracle, double* abs_err) {
    double ae = std::abs(closed - oracle);
    *abs_err = ae;
    if (std::abs(closed) > 1e-3) return ae <= 1e-9 * std::abs(closed);
    return ae <= 1e-12;
}

void push_cell(std::vector<VCell>& cells, const std::string& stat, const std::string& moment,
               const Model& m, std::int64_t n, std::int64_t k, double closed, double oracle) {
    VCell c;
    c.statistic = stat;
    c.moment = moment;
    c.model = m.name;
    c.n = n;
    c.k = k;
    c.a = m.a;
    c.closed = closed;
    c.oracle = oracle;
    c.status = within_tol(closed, oracle, &c.abs_err) ? "pass" : "fail";
    cells.push_back(std::move(c));
}

void push_skip(std::vector<VCell>& cells, const std::string& stat, const Model& m,
               std::int64_t n, std::int64_t k, const std::string& why) {
    VCell c;
    c.statistic = stat;
    c.moment = "-";
    c.model = m.name;
    c.n = n;
    c.k = k;
    c.a = m.a;
    c.status = "skip";
    c.note = why;
    cells.push_back(std::move(c));
    std::cerr << "verify: skipping " << stat << " n=" << n << " model=" << m.name << ": " << why
              << "\n";
}

void verify_model_n(std::vector<VCell>& cells, const Model& m, std::int64_t n,
                    const std::vector<brt::Statistic>& stats, std::int64_t k_opt,
                    std::uint64_t cap) {
    auto table = [&](brt::Statistic st, std::int64_t k) {
        return m.name == "urt" ? brt::exact_urt_distribution(n, st, k, cap)
                               : brt::exact_brt_distribution(n, *m.pv, st, k, cap);
    };
    for (brt::Statistic st : stats) {
        const std::string name = brt::statistic_name(st);
        if (!brt::statistic_uses_k(st)) {
            brt::DistributionTable t;
            try {
                t = table(st, -1);
            } catch (const brt::resource_limit_error& e) {
                push_skip(cells, name, m, n, -1, e.what());
                continue;
            }
            if (st == brt::Statistic::branches) {
                double mean = m.name == "urt" ? brt::urt_branches_mean(n)
                              : m.name == "uniform" ? brt::expected_branches_uniform(n, m.a)
                                                    : brt::expected_branches(n, *m.pv);
                double var = m.name == "urt" ? brt::urt_branches_variance(n)
                             : m.name == "uniform" ? brt::variance_branches_uniform(n, m.a)
                                                   : brt::variance_branches(n, *m.pv);
                push_cell(cells, name, "mean", m, n, -1, mean, t.mean());
                push_cell(cells, name, "variance", m, n, -1, var, t.variance());
            } else if (st == brt::Statistic::depth_of_n) {
                double mean = m.name == "urt" ? brt::urt_depth_mean(n)
                              : m.name == "uniform" ? brt::expected_depth_uniform(n, m.a)
                                                    : brt::expected_depth(n, *m.pv);
                push_cell(cells, name, "mean", m, n, -1, mean, t.mean());
            } else {  // position: compare the whole pmf at its worst point
                double worst = -1, closed_at = 0, oracle_at = 0;
                for (std::int64_t c = 2; c <= n; ++c) {
                    double closed = m.name == "urt" ? 1.0 / double(n - 1)
                                                    : brt::position_pmf(n, c, *m.pv);
                    double mass = 0;
                    for (std::size_t i = 0; i < t.support.size(); ++i)
                        if (t.support[i] == c) mass = t.prob[i];
                    if (std::abs(closed - mass) > worst) {
                        worst = std::abs(closed - mass);
                        closed_at = closed;
                        oracle_at = mass;
                    }
                }
                push_cell(cells, name, "pmf", m, n, -1, closed_at, oracle_at);
            }
            continue;
        }
        std::vector<std::int64_t> ks;
        if (k_opt >= 0)
            ks.push_back(k_opt);
        else
            for (std::int64_t k = 0; k <= std::min<std::int64_t>(3, n - 1); ++k) ks.push_back(k);
        for (std::int64_t k : ks) {
            if (k > n - 1) continue;
            brt::DistributionTable t;
            try {
                t = table(st, k);
            } catch (const brt::resource_limit_error& e) {
                push_skip(cells, name, m, n, k, e.what());
                continue;
            }
            if (st == brt::Statistic::at_least_k) {
                double mean = m.name == "urt" ? brt::expected_at_least_k_urt(n, k)
                              : m.name == "uniform"
                                  ? brt::expected_at_least_k_uniform(n, k, m.a)
                                  : brt::expected_at_least_k(n, k, *m.pv);
                push_cell(cells, name, "mean", m, n, k, mean, t.mean());
                if (n >= 2 * k + 2) {
                    double var = m.name == "urt" ? brt::variance_at_least_k_urt(n, k)
                                 : m.name == "uniform"
                                     ? brt::variance_at_least_k_uniform(n, k, m.a)
                                     : brt::variance_at_least_k(n, k, *m.pv);
                    push_cell(cells, name, "variance", m, n, k, var, t.variance());
                }
            } else {
                double mean = m.name == "urt" ? brt::expected_exactly_k_urt(n, k)
                              : m.name == "uniform"
                                  ? brt::expected_exactly_k_uniform(n, k, m.a)
                                  : brt::expected_exactly_k(n, k, *m.pv);
                push_cell(cells, name, "mean", m, n, k, mean, t.mean());
                if (m.name != "urt" && n >= 2 * k + 4) {
                    double var = m.name == "uniform"
                                     ? brt::variance_exactly_k_uniform(n, k, m.a)
                                     : brt::variance_exactly_k(n, k, *m.pv);
                    push_cell(cells, name, "variance", m, n, k, var, t.variance());
                }
            }
        }
    }
}

int emit_verify(const CommonOpts& o, const json& config, const std::vector<VCell>& cells) {
    std::int64_t pass = 0, fail = 0, skip = 0;
    json results = json::array();
    std::vector<std::vector<std::string>> rows;
    for (const VCell& c : cells) {
        if (c.status == "pass") ++pass;
        else if (c.status == "fail") ++fail;
        else ++skip;
        json r;
        r["statistic"] = c.statistic;
        r["moment"] = c.moment;
        r["model"] = c.model;
        r["n"] = c.n;
        if (c.k >= 0) r["k"] = c.k;
        if (c.a > 0) r["a"] = c.a;
        r["closed"] = c.closed;
        r["oracle"] = c.oracle;
        r["abs_err"] = c.abs_err;
        r["status"] = c.status;
        if (!c.note.empty()) r["note"] = c.note;
        results.push_back(std::move(r));
        rows.push_back({c.statistic, c.moment, c.model, std::to_string(c.n),
                        c.k >= 0 ? std::to_string(c.k) : "", fmt_double(c.closed),
                        fmt_double(c.oracle), fmt_double(c.abs_err), c.status});
    }
    json env = envelope("verify", config, results);
    env["summary"] = {{"cells", cells.size()}, {"pass", pass}, {"fail", fail}, {"skip", skip}};
    if (o.format == "csv")
        write_output(o.out, csv_table({"statistic", "moment", "model", "n", "k", "closed",
                                       "oracle", "abs_err", "status"},
                                      rows, config));
    else
        write_output(o.out, env.dump(2));
    std::cerr << "verify: " << pass << " passed, " << fail << " failed, " << skip
              << " skipped\n";
    return fail == 0 ? 0 : 1;
}

int run_verify(const CommonOpts& o) {
    std::uint64_t cap = effective_cap(o);

    if (o.stat == "tvbound") {
        if (o.n < 3) throw brt::usage_error("verify --stat tvbound needs --n >= 3");
        Model m = resolve_model(o, false);
        auto brt_law = brt::exact_tree_law(o.n, *m.pv, cap);
        auto urt_law = brt::exact_urt_tree_law(o.n, cap);
        double tv = brt::tree_law_tv(brt_law, urt_law);
        double bound = m.name == "uniform" ? brt::tv_bound_uniform(o.n, m.a)
                                           : brt::tv_bound_general(o.n, *m.pv);
        bool ok = tv <= bound + 1e-12;
        json config = model_json(m);
        config["n"] = o.n;
        config["check"] = "tvbound";
        json results = json::array();
        results.push_back({{"check", "tvbound"},
                           {"model", m.name},
                           {"n", o.n},
                           {"tv", tv},
                           {"bound", bound},
                           {"status", ok ? "pass" : "fail"}});
        if (o.format == "csv")
            write_output(o.out, csv_table({"check", "model", "n", "tv", "bound", "status"},
                                          {{"tvbound", m.name, std::to_string(o.n),
                                            fmt_double(tv), fmt_double(bound),
                                            ok ? "pass" : "fail"}},
                                          config));
        else
            write_output(o.out, envelope("verify", config, results).dump(2));
        std::cerr << "verify tvbound: tv=" << fmt_double(tv) << " bound=" << fmt_double(bound)
                  << (ok ? " pass" : " FAIL") << "\n";
        return ok ? 0 : 1;
    }

    if (o.stat == "covariance") {
        if (o.n < 2 || o.k < 0)
            throw brt::usage_error("verify --stat covariance needs --n >= 2 and --k >= 0");
        Model m = resolve_model(o, false);
        brt::CovarianceReport rep = brt::oracle_covariance_check(o.n, o.k, *m.pv, cap);
        bool ok = rep.max_abs_err <= 1e-12;
        json config = model_json(m);
        config["n"] = o.n;
        config["k"] = o.k;
        config["check"] = "covariance";
        json results = json::array();
        results.push_back({{"check", "covariance"},
                           {"model", m.name},
                           {"n", o.n},
                           {"k", o.k},
                           {"pairs", rep.pairs.size()},
                           {"max_abs_err", rep.max_abs_err},
                           {"status", ok ? "pass" : "fail"}});
        if (o.format == "csv")
            write_output(o.out,
                         csv_table({"check", "model", "n", "k", "pairs", "max_abs_err",
                                    "status"},
                                   {{"covariance", m.name, std::to_string(o.n),
                                     std::to_string(o.k), std::to_string(rep.pairs.size()),
                                     fmt_double(rep.max_abs_err), ok ? "pass" : "fail"}},
                                   config));
        else
            write_output(o.out, envelope("verify", config, results).dump(2));
        std::cerr << "verify covariance: " << rep.pairs.size()
                  << " pairs, max_abs_err=" << fmt_double(rep.max_abs_err)
                  << (ok ? " pass" : " FAIL") << "\n";
        return ok ? 0 : 1;
    }

    // Grid mode: closed forms vs the oracle over models x n x statistics.
    std::vector<brt::Statistic> stats;
    if (o.stat.empty() || o.stat == "all") {
        stats = {brt::Statistic::branches, brt::Statistic::at_least_k,
                 brt::Statistic::exactly_k, brt::Statistic::depth_of_n,
                 brt::Statistic::position_of_n};
    } else {
        stats = {brt::statistic_from_name(o.stat)};
    }

    std::vector<Model> models;
    if (!o.p.empty() || o.a > 0 || o.urt) {
        models.push_back(resolve_model(o, true));
    } else {
        for (std::int64_t a = 1; a <= 3; ++a)
            models.push_back({"uniform", brt::ProbabilityVector::uniform(a), a});
        models.push_back({"p", brt::ProbabilityVector({0.5, 0.3, 0.2}), 3});
        models.push_back({"urt", std::nullopt, 0});
    }

    std::vector<std::int64_t> ns;
    if (o.n > 0)
        ns.push_back(o.n);
    else
        for (std::int64_t n = 2; n <= 9; ++n) ns.push_back(n);

    std::vector<VCell> cells;
    for (const Model& m : models)
        for (std::int64_t n : ns) verify_model_n(cells, m, n, stats, o.k, cap);

    json config;
    config["grid"] = (o.n > 0 || !o.p.empty() || o.a > 0 || o.urt) ? "custom" : "default";
    if (o.n > 0) config["n"] = o.n;
    if (o.k >= 0) config["k"] = o.k;
    if (!o.stat.empty()) config["stat"] = o.stat;
    config["cap"] = cap;
    return emit_verify(o, config, cells);
}

// ------------------------------------------------------------ experiment --

int run_experiment_clt(const CommonOpts& o, double threshold) {
    if (o.n < 2) throw brt::usage_error("experiment clt needs --n >= 2");
    if (o.k < 1) throw brt::usage_error("experiment clt needs --k >= 1");
    Model m = resolve_model(o, false);
    std::uint64_t samples = o.samples > 0 ? o.samples : 1'000'000;
    brt::CltReport rep = brt::clt_check(o.n, *m.pv, o.k, samples, o.seed, threshold, o.workers);

    json config = model_json(m);
    config["n"] = o.n;
    config["k"] = o.k;
    config["samples"] = samples;
    config["seed"] = o.seed;
    config["threshold"] = threshold;

    json r;
    r["model"] = rep.model;
    r["n"] = rep.n;
    r["k"] = rep.k;
    r["samples"] = rep.samples;
    r["seed"] = rep.seed;
    r["mean_formula"] = rep.mean_formula;
    r["sd_formula"] = rep.sd_formula;
    r["ks"] = rep.ks;
    r["threshold"] = rep.threshold;
    r["pass"] = rep.pass;
    r["wall_seconds"] = rep.wall_seconds;
    if (o.format == "csv")
        write_output(o.out,
                     csv_table({"model", "n", "k", "samples", "seed", "mean", "sd", "ks",
                                "threshold", "pass"},
                               {{rep.model, std::to_string(rep.n), std::to_string(rep.k),
                                 std::to_string(rep.samples), std::to_string(rep.seed),
                                 fmt_double(rep.mean_formula), fmt_double(rep.sd_formula),
                                 fmt_double(rep.ks), fmt_double(rep.threshold),
                                 rep.pass ? "true" : "false"}},
                               config));
    else
        write_output(o.out, envelope("experiment-clt", config, json::array({r})).dump(2));
    std::cerr << "clt: ks=" << fmt_double(rep.ks) << " threshold=" << fmt_double(rep.threshold)
              << (rep.pass ? " pass" : " FAIL") << "\n";
    return rep.pass ? 0 : 1;
}

int run_experiment_stronglaw(const CommonOpts& o, std::int64_t nmax, int points) {
    if (o.k < 0) throw brt::usage_error("experiment stronglaw needs --k >= 0");
    if (o.a < 1) throw brt::usage_error("experiment stronglaw needs --a >= 1");
    if (nmax < 2) throw brt::usage_error("experiment stronglaw needs --nmax >= 2");
    std::vector<std::int64_t> grid = log_grid(std::max<std::int64_t>(2, o.k + 2), nmax, points);
    auto rows = brt::strong_law_trajectory(o.k, o.a, grid, o.seed);

    json config;
    config["k"] = o.k;
    config["a"] = o.a;
    config["nmax"] = nmax;
    config["points"] = points;
    config["seed"] = o.seed;

    json results = json::array();
    std::vector<std::vector<std::string>> csv_rows;
    for (const auto& r : rows) {
        results.push_back({{"n", r.n}, {"value", r.value}, {"limit", r.limit}, {"gap", r.gap}});
        csv_rows.push_back(
            {std::to_string(r.n), fmt_double(r.value), fmt_double(r.limit), fmt_double(r.gap)});
    }
    if (o.format == "csv")
        write_output(o.out, csv_table({"n", "value", "limit", "gap"}, csv_rows, config));
    else
        write_output(o.out, envelope("experiment-stronglaw", config, results).dump(2));
    return 0;
}

int run_experiment_sweep(const CommonOpts& o, const std::string& quantity, std::int64_t amax,
                         std::int64_t nmax, int points) {
    bool vs_a = quantity == "branches-vs-a" || quantity == "depth-vs-a" ||
                quantity == "varbranches-vs-a";
    std::vector<std::int64_t> grid;
    std::int64_t fixed = 0;
    const brt::ProbabilityVector* pv = nullptr;
    brt::ProbabilityVector p_holder = brt::ProbabilityVector::uniform(1);
    if (vs_a) {
        if (o.n < 2) throw brt::usage_error(quantity + " needs --n >= 2");
        if (amax < 2) throw brt::usage_error(quantity + " needs --amax >= 2");
        fixed = o.n;
        grid = log_grid(2, amax, points);
    } else {
        if (nmax < 10) throw brt::usage_error(quantity + " needs --nmax >= 10");
        if (!o.p.empty()) {
            Model m = resolve_model(o, false);
            p_holder = *m.pv;
            pv = &p_holder;
            fixed = p_holder.size();
        } else {
            if (o.a < 1) throw brt::usage_error(quantity + " needs --a or --p");
            fixed = o.a;
        }
        grid = log_grid(10, nmax, points);
    }
    auto rows = brt::convergence_sweep(quantity, grid, fixed, pv);

    json config;
    config["quantity"] = quantity;
    if (vs_a) {
        config["n"] = o.n;
        config["amax"] = amax;
    } else {
        if (pv != nullptr)
            config["p"] = p_holder.weights();
        else
            config["a"] = o.a;
        config["nmax"] = nmax;
    }
    config["points"] = points;

    json results = json::array();
    std::vector<std::vector<std::string>> csv_rows;
    for (const auto& r : rows) {
        results.push_back(
            {{"param", r.param}, {"value", r.value}, {"limit", r.limit}, {"gap", r.gap}});
        csv_rows.push_back({std::to_string(r.param), fmt_double(r.value), fmt_double(r.limit),
                            fmt_double(r.gap)});
    }
    if (o.format == "csv")
        write_output(o.out, csv_table({"param", "value", "limit", "gap"}, csv_rows, config));
    else
        write_output(o.out, envelope("experiment-sweep", config, results).dump(2));
    return 0;
}

int run_experiment_estimate(const CommonOpts& o, bool serial) {
    if (o.n < 2) throw brt::usage_error("experiment estimate needs --n >= 2");
    if (o.stat.empty()) throw brt::usage_error("experiment estimate needs --stat");
    brt::Statistic stat = brt::statistic_from_name(o.stat);
    Model m = resolve_model(o, false);
    std::uint64_t samples = o.samples > 0 ? o.samples : 100'000;
    brt::EstimateReport rep =
        serial ? brt::estimate_moments_serial(o.n, *m.pv, stat, o.k, samples, o.seed)
               : brt::estimate_moments(o.n, *m.pv, stat, o.k, samples, o.seed, o.workers);

    json config = model_json(m);
    config["n"] = o.n;
    if (brt::statistic_uses_k(stat)) config["k"] = o.k;
    config["stat"] = o.stat;
    config["samples"] = samples;
    config["seed"] = o.seed;
    config["serial"] = serial;

    json r;
    r["statistic"] = rep.statistic;
    r["model"] = rep.model;
    r["n"] = rep.n;
    if (rep.k >= 0) r["k"] = rep.k;
    r["samples"] = rep.samples;
    r["seed"] = rep.seed;
    r["workers"] = rep.workers;
    r["mean"] = rep.mean;
    r["se_mean"] = rep.se_mean;
    r["half_width"] = rep.half_width;
    r["variance"] = rep.variance;
    r["se_variance"] = rep.se_variance;
    r["wall_seconds"] = rep.wall_seconds;
    if (o.format == "csv")
        write_output(
            o.out,
            csv_table({"statistic", "model", "n", "k", "samples", "seed", "workers", "mean",
                       "se_mean", "half_width", "variance", "se_variance", "wall_seconds"},
                      {{rep.statistic, rep.model, std::to_string(rep.n),
                        rep.k >= 0 ? std::to_string(rep.k) : "", std::to_string(rep.samples),
                        std::to_string(rep.seed), std::to_string(rep.workers),
                        fmt_double(rep.mean), fmt_double(rep.se_mean),
                        fmt_double(rep.half_width), fmt_double(rep.variance),
                        fmt_double(rep.se_variance), fmt_double(rep.wall_seconds)}},
                      config));
    else
        write_output(o.out, envelope("experiment-estimate", config, json::array({r})).dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biased recursive trees from riffle-shuffle permutations"};
    app.require_subcommand(1);
    CommonOpts o;

    auto add_model = [&](CLI::App* cmd, bool with_urt) {
        cmd->add_option("--p", o.p, "digit law as a comma-separated list")->delimiter(',');
        cmd->add_option("--a", o.a, "uniform digit law on {1..a}");
        if (with_urt) cmd->add_flag("--urt", o.urt, "uniform recursive tree model");
        cmd->add_flag("--normalize", o.normalize, "rescale --p to sum to 1");
    };
    auto add_io = [&](CLI::App* cmd) {
        cmd->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        cmd->add_option("--out", o.out, "output path (default stdout)");
    };

    // sample
    std::int64_t count = 1;
    std::string emit = "tree", method = "inverse";
    CLI::App* sample = app.add_subcommand("sample", "draw shuffle permutations and trees");
    sample->add_option("--n", o.n, "number of nodes / cards")->required();
    add_model(sample, false);
    sample->add_option("--seed", o.seed, "rng seed")->capture_default_str();
    sample->add_option("--count", count, "records to draw")->capture_default_str();
    sample->add_option("--emit", emit, "record contents")
        ->check(CLI::IsMember({"digits", "perm", "tree", "both"}))
        ->capture_default_str();
    sample->add_option("--method", method, "construction used")
        ->check(CLI::IsMember({"inverse", "forward"}))
        ->capture_default_str();
    add_io(sample);

    // moments
    CLI::App* moments = app.add_subcommand("moments", "closed-form moments");
    moments->add_option("--stat", o.stat, "branches | atleast | exactly | depth")->required();
    moments->add_option("--n", o.n, "number of nodes")->required();
    moments->add_option("--k", o.k, "descendant count parameter");
    add_model(moments, true);
    add_io(moments);

    // verify
    CLI::App* verify = app.add_subcommand("verify", "closed forms vs the enumeration oracle");
    verify->add_option("--stat", o.stat,
                       "statistic, or tvbound | covariance | all (default: all)");
    verify->add_option("--n", o.n, "restrict to one n");
    verify->add_option("--k", o.k, "restrict to one k");
    add_model(verify, true);
    verify->add_option("--cap", o.cap, "enumeration cap override");
    verify->add_option("--workers", o.workers, "worker threads (0 = auto)");
    add_io(verify);

    // experiment
    CLI::App* experiment = app.add_subcommand("experiment", "sampling experiments and sweeps");
    experiment->require_subcommand(1);
    double threshold = 0.0035;
    std::int64_t nmax = 0, amax = 0;
    int points = 0;
    std::string quantity;
    bool serial = false;

    CLI::App* clt = experiment->add_subcommand("clt", "KS test against the standard normal");
    clt->add_option("--n", o.n)->required();
    clt->add_option("--k", o.k)->required();
    add_model(clt, false);
    clt->add_option("--samples", o.samples, "sample count (default 1000000)");
    clt->add_option("--seed", o.seed)->capture_default_str();
    clt->add_option("--threshold", threshold, "KS pass threshold")->capture_default_str();
    clt->add_option("--workers", o.workers, "worker threads (0 = auto)");
    add_io(clt);

    CLI::App* stronglaw =
        experiment->add_subcommand("stronglaw", "one sampled path of the exactly-k fraction");
    stronglaw->add_option("--k", o.k)->required();
    stronglaw->add_option("--a", o.a)->required();
    stronglaw->add_option("--nmax", nmax, "largest n on the path")->required();
    stronglaw->add_option("--points", points, "grid points (default 21)");
    stronglaw->add_option("--seed", o.seed)->capture_default_str();
    add_io(stronglaw);

    CLI::App* sweep = experiment->add_subcommand("sweep", "closed-form convergence tables");
    sweep->add_option("--quantity", quantity,
                      "branches-vs-a | branches-vs-n | depth-vs-a | depth-rate-vs-n | "
                      "varbranches-vs-a")
        ->required();
    sweep->add_option("--n", o.n, "fixed n for the -vs-a quantities");
    sweep->add_option("--a", o.a, "fixed a for the -vs-n quantities");
    sweep->add_option("--p", o.p, "fixed digit law for the -vs-n quantities")->delimiter(',');
    sweep->add_flag("--normalize", o.normalize, "rescale --p to sum to 1");
    sweep->add_option("--amax", amax, "largest a on the grid");
    sweep->add_option("--nmax", nmax, "largest n on the grid");
    sweep->add_option("--points", points, "grid points (default 13)");
    add_io(sweep);

    CLI::App* estimate = experiment->add_subcommand("estimate", "Monte Carlo moment estimate");
    estimate->add_option("--stat", o.stat)->required();
    estimate->add_option("--n", o.n)->required();
    estimate->add_option("--k", o.k);
    add_model(estimate, false);
    estimate->add_option("--samples", o.samples, "sample count (default 100000)");
    estimate->add_option("--seed", o.seed)->capture_default_str();
    estimate->add_option("--workers", o.workers, "worker threads (0 = auto)");
    estimate->add_flag("--serial", serial, "use the single-threaded reference accumulator");
    add_io(estimate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return run_sample(o, count, emit, method);
        if (moments->parsed()) return run_moments(o);
        if (verify->parsed()) return run_verify(o);
        if (experiment->parsed()) {
            if (clt->parsed()) return run_experiment_clt(o, threshold);
            if (stronglaw->parsed())
                return run_experiment_stronglaw(o, nmax, points > 0 ? points : 21);
            if (sweep->parsed())
                return run_experiment_sweep(o, quantity, amax, nmax, points > 0 ? points : 13);
            if (estimate->parsed()) return run_experiment_estimate(o, serial);
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const brt::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const brt::resource_limit_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
