#include "oausa/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace oausa::sensing {

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

ChannelPrior::ChannelPrior(double pi0_, double pi1_) : pi0(pi0_), pi1(pi1_) {
    require_probability(pi0, "pi0");
    require_probability(pi1, "pi1");
    if (std::abs(pi0 + pi1 - 1.0) > 1e-12)
        throw std::invalid_argument("pi0 + pi1 must equal 1");
}

SensorProfile::SensorProfile(double pf_, double pd_) : pf(pf_), pd(pd_) {
    require_probability(pf, "pf");
    require_probability(pd, "pd");
    if (pd <= pf)
        std::fprintf(stderr,
                     "oausa: warning: sensor with pd=%g <= pf=%g is uninformative\n",
                     pd, pf);
}

DeviationPolicy::DeviationPolicy(double a1, double a2) : alpha1(a1), alpha2(a2) {
    require_probability(alpha1, "alpha1");
    require_probability(alpha2, "alpha2");
}

double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c *= static_cast<double>(n - k + i) / i;
    return c;
}

double binomial_pmf(int n, int k, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    return binomial_coefficient(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

double binomial_tail(int k, int n, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    // term_{i+1} = term_i * (n-i)/(i+1) * p/(1-p), starting at i = k
    const double ratio = p / (1.0 - p);
    double term = binomial_pmf(n, k, p);
    double sum = term;
    for (int i = k; i < n; ++i) {
        term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * ratio;
        sum += term;
        if (term == 0.0) break;
    }
    return std::min(sum, 1.0);
}

int optimal_k(const ChannelPrior& prior, const SensorProfile& sensor, int n) {
    if (n < 1) throw std::invalid_argument("optimal_k: n must be positive");
    if (!sensor.informative())
        throw std::domain_error("k-out-of-N optimum undefined for degenerate sensor");
    const double num = std::log(prior.pi1 / prior.pi0) +
                       n * std::log((1.0 - sensor.pf) / (1.0 - sensor.pd));
    const double den = std::log(sensor.pd * (1.0 - sensor.pf) /
                                (sensor.pf * (1.0 - sensor.pd)));
    const double raw = num / den;
    const int k = static_cast<int>(std::ceil(raw));
    return std::clamp(k, 1, n);
}

GlobalRoc global_roc(int k, int n, const SensorProfile& sensor) {
    if (n < 1 || k < 1 || k > n)
        throw std::invalid_argument("global_roc: require 1 <= k <= n");
    return {binomial_tail(k, n, sensor.pf), binomial_tail(k, n, sensor.pd)};
}

JointProbs joint_probs(const ChannelPrior& prior, double qf, double qd) {
    require_probability(qf, "qf");
    require_probability(qd, "qd");
    return {prior.pi0 * (1.0 - qf), prior.pi1 * (1.0 - qd)};
}

FusionStats fusion_stats(const ChannelPrior& prior, const SensorProfile& sensor,
                         int k, int n) {
    const GlobalRoc roc = global_roc(k, n, sensor);
    const JointProbs jp = joint_probs(prior, roc.qf, roc.qd);
    FusionStats st;
    st.qf = roc.qf;
    st.qd = roc.qd;
    st.q0 = jp.q0;
    st.q1 = jp.q1;
    st.k = k;
    st.n_used = n;
    return st;
}

bool fuse(std::span<const std::uint8_t> decisions, int k) {
    if (decisions.empty()) throw std::invalid_argument("fuse: empty decision vector");
    if (k < 1 || static_cast<std::size_t>(k) > decisions.size())
        throw std::invalid_argument("fuse: require 1 <= k <= len(decisions)");
    int ones = 0;
    for (std::uint8_t d : decisions) ones += d ? 1 : 0;
    return ones >= k;
}

bool strategy_proof_fuse(std::span<const std::uint8_t> decisions,
                         std::span<const std::size_t> excluded, int k_reduced) {
    if (decisions.empty()) throw std::invalid_argument("fuse: empty decision vector");
    std::vector<bool> skip(decisions.size(), false);
    std::size_t n_excluded = 0;
    for (std::size_t idx : excluded) {
        if (idx >= decisions.size())
            throw std::invalid_argument("strategy_proof_fuse: excluded index out of range");
        if (!skip[idx]) {
            skip[idx] = true;
            ++n_excluded;
        }
    }
    const std::size_t remaining = decisions.size() - n_excluded;
    if (remaining == 0) throw std::invalid_argument("no sensing input");
    if (k_reduced < 1 || static_cast<std::size_t>(k_reduced) > remaining)
        throw std::invalid_argument("strategy_proof_fuse: k out of range for remaining decisions");
    int ones = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i)
        if (!skip[i] && decisions[i]) ++ones;
    return ones >= k_reduced;
}

double falsified_qf(const SensorProfile& sensor, const DeviationPolicy& policy,
                    int k, int n) {
    if (n < 2 || k < 1 || k > n)
        throw std::invalid_argument("falsified_qf: require n >= 2 and 1 <= k <= n");
    const double pf = sensor.pf;
    const double pf_tilde = policy.alpha1 + (1.0 - policy.alpha1 - policy.alpha2) * pf;
    return pf_tilde * binomial_pmf(n - 1, k - 1, pf) + binomial_tail(k, n - 1, pf);
}

double utility_gap_bound(const ChannelPrior& prior, const SensorProfile& sensor,
                         int k, int n, double expected_wmax, double c_coll) {
    if (n < 1 || k < 1 || k > n)
        throw std::invalid_argument("utility_gap_bound: require 1 <= k <= n");
    const double pf = sensor.pf, pd = sensor.pd;
    double bound = std::abs(prior.pi0 * expected_wmax * std::pow(pf, n) -
                            prior.pi1 * c_coll * std::pow(pd, n));
    for (int j = k; j <= n - 1; ++j) {
        bound += prior.pi1 * c_coll * binomial_coefficient(n - 1, j) *
                 std::pow(pd, j) * std::pow(1.0 - pd, n - 1 - j);
        bound += prior.pi0 * expected_wmax * binomial_coefficient(n - 1, j - 1) *
                 std::pow(pf, j) * std::pow(1.0 - pf, n - 1 - j);
    }
    return bound;
}

}  // namespace oausa::sensing
