#include "brt/dist.hpp"

#include <cmath>
#include <cstddef>

#include <nlohmann/json.hpp>

#include "brt/errors.hpp"
#include "brt/util.hpp"

namespace brt {

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::branches: return "branches";
        case Statistic::at_least_k: return "atleast";
        case Statistic::exactly_k: return "exactly";
        case Statistic::depth_of_n: return "depth";
        case Statistic::position_of_n: return "position";
    }
    return "?";
}

Statistic statistic_from_name(const std::string& name) {
    if (name == "branches") return Statistic::branches;
    if (name == "atleast") return Statistic::at_least_k;
    if (name == "exactly") return Statistic::exactly_k;
    if (name == "depth") return Statistic::depth_of_n;
    if (name == "position") return Statistic::position_of_n;
    throw usage_error("unknown statistic '" + name +
                      "' (expected branches|atleast|exactly|depth|position)");
}

bool statistic_uses_k(Statistic s) {
    return s == Statistic::at_least_k || s == Statistic::exactly_k;
}

void DistributionTable::validate() const {
    if (support.size() != prob.size())
        throw usage_error("distribution table: support/probability length mismatch");
    if (support.empty()) throw usage_error("distribution table: empty support");
    KahanSum total;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && support[i] <= support[i - 1])
            throw usage_error("distribution table: support not sorted strictly");
        if (prob[i] < 0.0) throw usage_error("distribution table: negative probability");
        total.add(prob[i]);
    }
    if (std::abs(total.value() - 1.0) > 1e-10)
        throw usage_error("distribution table: probabilities do not sum to 1");
}

double DistributionTable::mean() const {
    KahanSum acc;
    for (std::size_t i = 0; i < support.size(); ++i) acc.add(double(support[i]) * prob[i]);
    return acc.value();
}

double DistributionTable::variance() const {
    double m = mean();
    KahanSum acc;
    for (std::size_t i = 0; i < support.size(); ++i) {
        double d = double(support[i]) - m;
        acc.add(d * d * prob[i]);
    }
    return acc.value();
}

std::string DistributionTable::statistic_label() const {
    std::string s = statistic_name(stat);
    if (statistic_uses_k(stat)) s += "-" + std::to_string(k);
    return s;
}

std::string DistributionTable::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["n"] = n;
    j["params"] = params;
    j["statistic"] = statistic_label();
    j["support"] = support;
    j["prob"] = prob;
    return j.dump();
}

double exact_tv_distance(const DistributionTable& d1, const DistributionTable& d2) {
    if (d1.stat != d2.stat || d1.k != d2.k || d1.n != d2.n)
        throw usage_error("exact_tv_distance: tables describe different statistics");
    d1.validate();
    d2.validate();
    KahanSum acc;
    std::size_t i = 0, j = 0;
    while (i < d1.support.size() || j < d2.support.size()) {
        if (j == d2.support.size() ||
            (i < d1.support.size() && d1.support[i] < d2.support[j])) {
            acc.add(d1.prob[i++]);
        } else if (i == d1.support.size() || d2.support[j] < d1.support[i]) {
            acc.add(d2.prob[j++]);
        } else {
            acc.add(std::abs(d1.prob[i++] - d2.prob[j++]));
        }
    }
    return 0.5 * acc.value();
}

}  // namespace brt
