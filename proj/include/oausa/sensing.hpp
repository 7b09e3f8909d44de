#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oausa::sensing {

// Prior distribution of the primary-user channel state.
// pi0 = P(H0, channel idle), pi1 = P(H1, channel busy).
struct ChannelPrior {
    double pi0;
    double pi1;

    ChannelPrior(double pi0_, double pi1_);
    static ChannelPrior from_pi0(double pi0_) { return {pi0_, 1.0 - pi0_}; }
};

// Local detector operating point of one radio: false-alarm and detection
// probabilities. A profile with pd <= pf is accepted (the fusion formulas stay
// well defined) but a warning is emitted since such a sensor carries no
// information.
struct SensorProfile {
    double pf;
    double pd;

    SensorProfile(double pf_, double pd_);
    bool informative() const {
        return pf > 0.0 && pf < 1.0 && pd > 0.0 && pd < 1.0 && pd > pf;
    }
};

// Fusion-rule operating point at the moderator plus the joint probabilities
// that drive the auction: q0 = P(decide idle and idle), q1 = P(decide idle
// and busy).
struct FusionStats {
    double qf = 0;
    double qd = 0;
    double q0 = 0;
    double q1 = 0;
    int k = 0;
    int n_used = 0;
};

// Stochastic flipping model for a unilaterally deviating radio:
// alpha1 = P(report 1 | local decision 0), alpha2 = P(report 0 | local 1).
struct DeviationPolicy {
    double alpha1;
    double alpha2;

    DeviationPolicy(double a1, double a2);
};

// Binomial helpers. Computed with the multiplicative coefficient and an
// upward term recurrence; exact to ~1e-14 for n <= 64, no factorials.
double binomial_coefficient(int n, int k);
double binomial_pmf(int n, int k, double p);
// sum_{i=k}^{n} C(n,i) p^i (1-p)^(n-i)
double binomial_tail(int k, int n, double p);

// Bayes-optimal threshold of the k-out-of-N rule,
// ceil((log(pi1/pi0) + N log((1-Pf)/(1-Pd))) / log(Pd(1-Pf)/(Pf(1-Pd)))),
// clamped to [1, N]. Requires an informative sensor.
int optimal_k(const ChannelPrior& prior, const SensorProfile& sensor, int n);

struct GlobalRoc {
    double qf;
    double qd;
};

// Moderator-level ROC of the k-out-of-n rule for n identical sensors.
GlobalRoc global_roc(int k, int n, const SensorProfile& sensor);

struct JointProbs {
    double q0;
    double q1;
};

JointProbs joint_probs(const ChannelPrior& prior, double qf, double qd);

// global_roc + joint_probs bundled.
FusionStats fusion_stats(const ChannelPrior& prior, const SensorProfile& sensor,
                         int k, int n);

// k-out-of-N rule: true (decide H1, busy) iff at least k decisions equal 1.
bool fuse(std::span<const std::uint8_t> decisions, int k);

// Winner-excluded fusion: applies the counting rule to the decisions whose
// index is not excluded. The result cannot depend on any excluded bit.
bool strategy_proof_fuse(std::span<const std::uint8_t> decisions,
                         std::span<const std::size_t> excluded, int k_reduced);

// Moderator false-alarm probability when one radio reports through the
// flipping policy and the other n-1 report truthfully with the same profile.
double falsified_qf(const SensorProfile& sensor, const DeviationPolicy& policy,
                    int k, int n);

// Upper bound on |U0 - U0~| between the full rule and the winner-excluded
// rule (threshold k kept, one sensor removed).
double utility_gap_bound(const ChannelPrior& prior, const SensorProfile& sensor,
                         int k, int n, double expected_wmax, double c_coll);

}  // namespace oausa::sensing
