#include "brt/prob.hpp"

#include <cmath>
#include <string>

#include "brt/errors.hpp"
#include "brt/util.hpp"

namespace brt {

ProbabilityVector::ProbabilityVector(std::vector<double> weights) {
    if (weights.empty()) throw usage_error("probability vector must have at least one entry");
    KahanSum total;
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw usage_error("probability entries must be strictly positive (got " +
                              std::to_string(w) + "); use ProbabilityVector::normalized to strip zeros");
        }
        total.add(w);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) {
        throw usage_error("probability entries sum to " + std::to_string(total.value()) +
                          ", expected 1 within 1e-12; use ProbabilityVector::normalized to rescale");
    }
    a_ = static_cast<std::int64_t>(weights.size());
    p_ = std::move(weights);

    q_.resize(a_ + 1);
    q_[0] = 0.0;
    KahanSum run;
    for (std::int64_t s = 1; s <= a_; ++s) {
        run.add(p_[s - 1]);
        q_[s] = run.value();
    }
    t_.resize(a_ + 1);
    t_[a_] = 0.0;  // suffix(a+1)
    KahanSum back;
    for (std::int64_t s = a_; s >= 1; --s) {
        back.add(p_[s - 1]);
        t_[s - 1] = back.value();
    }

    uniform_ = true;
    for (std::int64_t s = 1; s < a_; ++s) {
        if (p_[s - 1] != p_[0]) {
            uniform_ = false;
            break;
        }
    }
}

ProbabilityVector ProbabilityVector::uniform(std::int64_t a) {
    if (a < 1) throw usage_error("uniform probability vector needs a >= 1");
    ProbabilityVector v;
    v.a_ = a;
    v.uniform_ = true;
    v.p_.assign(a, 1.0 / double(a));
    v.q_.resize(a + 1);
    v.t_.resize(a + 1);
    // Exact ratios beat running sums here: s/a is correctly rounded per entry.
    for (std::int64_t s = 0; s <= a; ++s) {
        v.q_[s] = double(s) / double(a);
        v.t_[s] = double(a - s) / double(a);  // t_[s] = suffix(s+1)
    }
    return v;
}

ProbabilityVector ProbabilityVector::normalized(std::vector<double> weights) {
    std::vector<double> kept;
    kept.reserve(weights.size());
    KahanSum total;
    for (double w : weights) {
        if (w < 0.0) throw usage_error("weights must be nonnegative");
        if (w > 0.0) {
            kept.push_back(w);
            total.add(w);
        }
    }
    if (kept.empty()) throw usage_error("all weights are zero");
    for (double& w : kept) w /= total.value();
    // Nudge the largest entry so the compensated sum is 1 within 1e-12 even
    // after the per-entry divisions round.
    KahanSum check;
    for (double w : kept) check.add(w);
    double err = check.value() - 1.0;
    if (err != 0.0) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < kept.size(); ++i)
            if (kept[i] > kept[arg]) arg = i;
        kept[arg] -= err;
    }
    return ProbabilityVector(std::move(kept));
}

}  // namespace brt
