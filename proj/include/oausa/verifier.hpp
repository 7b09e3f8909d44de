#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oausa/auction.hpp"
#include "oausa/comparison.hpp"

namespace oausa::verifier {

using auction::Scenario;
using sensing::DeviationPolicy;

enum class Mechanism { oausa, oausa_paper_literal, vcg, first_price };

const char* mechanism_name(Mechanism m);
Mechanism mechanism_from_name(const std::string& name);

// One (radio, true value) row of the misreport scan. The paired estimate
// flags a violation when the best misreport beats truth by more than three
// standard errors of the paired difference.
struct DeviationReport {
    std::size_t cr_index = 0;
    double true_value = 0;
    double best_misreport = 0;
    double utility_truth = 0;
    double utility_best_misreport = 0;
    double standard_error = 0;
    bool violated = false;
};

// Misreport scan under the expected-utility metric q0 psi_i t - b_i - c_p,
// paired over common peer-valuation draws. grid_t spans each radio's true
// values, grid_v the candidate misreports, both across [a_i, z_i].
std::vector<DeviationReport> check_ic(const Scenario& sc, Mechanism mech, int grid_t,
                                      int grid_v, std::size_t n_trials,
                                      std::uint64_t seed,
                                      mc::Exec exec = mc::Exec::parallel);

struct IrReport {
    std::size_t cr_index = 0;
    double min_utility = 0;     // min over the true-value grid
    double min_utility_se = 0;
    double min_at_value = 0;
    double utility_at_a = 0;    // should vanish at the support bottom
    double utility_at_a_se = 0;
    double utility_at_z = 0;
    bool violated = false;      // min below -3 standard errors
};

std::vector<IrReport> check_ir(const Scenario& sc, Mechanism mech, int grid_t,
                               std::size_t n_trials, std::uint64_t seed,
                               mc::Exec exec = mc::Exec::parallel);

struct AllocationCurve {
    std::size_t cr_index = 0;
    std::vector<double> v_grid;
    std::vector<double> psi;      // q0-weighted expected allocation
    std::vector<double> se;
    bool monotone_within_ci = true;
};

// Expected allocation Psi_i(v) over a report grid, with paired adjacent-point
// monotonicity.
AllocationCurve expected_allocation(const Scenario& sc, Mechanism mech,
                                    std::size_t cr_index, int grid_size,
                                    std::size_t n_trials, std::uint64_t seed,
                                    mc::Exec exec = mc::Exec::parallel);

struct SensingDeviationResult {
    DeviationPolicy policy;
    double delta_mean = 0;  // deviator's realized utility gain vs truth
    double delta_se = 0;
};

// Realized-utility gain of the top-virtual-valuation radio when its reported
// sensing bit goes through the flipping policy, everything else common across
// policies. Under the scenario's standard rule the always-zero policy gains;
// under the winner-excluded rule every delta is identically zero.
std::vector<SensingDeviationResult> check_sensing_truthfulness(
    const Scenario& sc, std::span<const DeviationPolicy> policies,
    std::size_t n_trials, std::uint64_t seed, mc::Exec exec = mc::Exec::parallel);

// Beyond-paper check: the top radio misreports its valuation (scaled toward
// the support bottom or top) and flips its sensing bit in the same round.
struct JointDeviationResult {
    DeviationPolicy policy;
    double misreport_factor = 1.0;
    double delta_mean = 0;
    double delta_se = 0;
};

std::vector<JointDeviationResult> check_joint_deviation(
    const Scenario& sc, std::span<const DeviationPolicy> policies,
    std::span<const double> misreport_factors, std::size_t n_trials,
    std::uint64_t seed, mc::Exec exec = mc::Exec::parallel);

// ---- exact tiny-instance oracle (N = 2) ----

struct ExactIcVerdict {
    std::size_t cr_index = 0;
    double true_value = 0;
    double best_misreport = 0;
    double utility_truth = 0;
    double utility_best_misreport = 0;
    bool violated = false;
};

// Exact expected utilities for two radios whose opponent valuation is uniform
// over the given atoms; no sampling, enumeration only.
std::vector<ExactIcVerdict> exact_ic_n2(const Scenario& sc, Mechanism mech,
                                        std::span<const double> atoms);

// Monte-Carlo twin of exact_ic_n2 on the same atom distribution; verdicts must
// agree with the enumeration.
std::vector<DeviationReport> check_ic_discrete_n2(const Scenario& sc, Mechanism mech,
                                                  std::span<const double> atoms,
                                                  std::size_t n_trials,
                                                  std::uint64_t seed,
                                                  mc::Exec exec = mc::Exec::parallel);

bool any_violation(std::span<const DeviationReport> reports);
bool any_violation(std::span<const IrReport> reports);

}  // namespace oausa::verifier
