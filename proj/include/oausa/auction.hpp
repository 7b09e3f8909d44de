#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oausa/montecarlo.hpp"
#include "oausa/rng.hpp"
#include "oausa/sensing.hpp"
#include "oausa/valuation.hpp"

namespace oausa::auction {

using sensing::ChannelPrior;
using sensing::FusionStats;
using sensing::SensorProfile;
using valuation::ValuationModel;

struct CostModel {
    double c_p = 0;
    double c_coll = 0;

    CostModel() = default;
    CostModel(double c_p_, double c_coll_);
};

// One sealed-bid round: revealed valuations, revealed sensing bits, and the
// per-radio valuation models the moderator prices against.
struct BidProfile {
    std::vector<double> valuations;
    std::vector<std::uint8_t> decisions;
    std::vector<ValuationModel> models;

    void validate() const;
    std::size_t size() const { return valuations.size(); }
};

enum class FusionMode { standard, strategy_proof };

struct AuctionConfig {
    bool use_reserve = true;            // virtual-valuation floor (q1/q0) c_coll
    bool paper_literal_payments = false;  // drop the reserve term from critical values
    FusionMode fusion_mode = FusionMode::standard;
    bool sp_keep_k = false;  // strategy-proof gate: keep the design k instead of
                             // recomputing the optimum for N-1 sensors
};

// Full mechanism configuration. k is the design threshold of the k-out-of-N
// rule (normally optimal_k).
struct Scenario {
    ChannelPrior prior;
    SensorProfile sensor;
    std::vector<ValuationModel> models;
    CostModel costs;
    int k = 1;
    AuctionConfig config;

    std::size_t n() const { return models.size(); }
};

// Per-scenario constants derived once and shared by every trial. `full` is the
// design rule (k over N); `reduced` is the winner-excluded rule used by the
// strategy-proof gate (k_eff over N-1). Payments and the reserve use the stats
// of whichever rule actually gates allocation.
struct ScenarioTables {
    FusionStats full;
    FusionStats reduced;          // n() >= 2 only
    bool reduced_valid = false;
    double reserve_w = 0;         // active reserve level (0 when disabled)
    std::vector<double> t_reserve;  // per-radio inverse_virtual(reserve_w); empty
                                    // when the reserve or corrected payments are off

    const FusionStats& effective(const Scenario& sc) const {
        return sc.config.fusion_mode == FusionMode::strategy_proof ? reduced : full;
    }
};

ScenarioTables precompute(const Scenario& sc);

struct WinnerSet {
    std::vector<std::size_t> winners;   // argmax of w, subject to the reserve
    std::optional<double> t_star;       // valuation with the second-largest w
};

// Winner determination. reserve_w may be -infinity to reproduce the
// reserve-free variant. Ties on the maximum (exact float equality) are all
// included.
WinnerSet winner_set(std::span<const double> v, std::span<const ValuationModel> models,
                     double reserve_w);

// psi from a winner set; `delta` (aligned with ws.winners) must sum to 1 over
// the winners, default is the equal split.
std::vector<double> allocate(const WinnerSet& ws, std::size_t n,
                             std::span<const double> delta = {});

// Four-case payments. t_reserve (per radio) carries the reserve-corrected
// critical floor; pass an empty span for the literal rule.
std::vector<double> payments(std::span<const double> v,
                             std::span<const ValuationModel> models,
                             const WinnerSet& ws, std::span<const double> psi,
                             double q0, const CostModel& costs,
                             std::span<const double> t_reserve);

// Valuation-only half of a mechanism: winners, split, payments. Reused by the
// Monte-Carlo engines, so outputs live in a caller-owned scratch.
struct StageResult {
    std::vector<double> psi;
    std::vector<double> payments;
    WinnerSet ws;
    bool any_winner = false;

    double sum_payments() const;
    double sum_psi() const;
};

void oausa_stage(std::span<const double> v, const Scenario& sc,
                 const ScenarioTables& tb, StageResult& out);

struct AuctionOutcome {
    std::vector<double> psi;
    std::vector<double> payments;
    std::vector<std::size_t> winners;
    std::optional<double> t_star;
    bool allocated = false;  // fused inference was idle and a winner exists
    double reserve_w = 0;
};

// The single-shot mechanism: fuse, then (on an idle inference) allocate and
// price; on a busy inference everyone gets psi = 0 and the c_p rebate. In
// strategy-proof mode winners are determined first and their sensing bits are
// excluded from the fusion gate.
AuctionOutcome run_oausa(const BidProfile& bids, const Scenario& sc,
                         const ScenarioTables& tb);
AuctionOutcome run_oausa(const BidProfile& bids, const Scenario& sc);

// ---- Monte-Carlo expected utilities ----

// One trial's random draws, generated in a fixed order from the trial stream:
// hypothesis, then N sensing bits, then N valuations.
struct TrialDraws {
    bool pu_present = false;
    std::vector<std::uint8_t> decisions;
    std::vector<double> valuations;
};

void draw_trial(Rng& rng, const Scenario& sc, TrialDraws& out);

// Applies the fusion gate of the scenario's mode to a trial, excluding stage
// winners in strategy-proof mode.
bool fused_busy(const TrialDraws& d, const StageResult& stage, const Scenario& sc,
                const ScenarioTables& tb);

// Expected-revenue accounting: payments are priced (and charged) by the
// valuation stage every round, scaled by the rule's q0; the fusion gate only
// decides whether the spectrum is handed over. Moderator value per trial is
// sum(b) - c_coll * sum(psi) when a collision happens; radio i's value is
// 1{idle and handed over} psi_i t_i - b_i - c_p.
double trial_moderator_utility(const TrialDraws& d, bool busy, const StageResult& stage,
                               const Scenario& sc);
void trial_cr_utilities(const TrialDraws& d, bool busy, const StageResult& stage,
                        const Scenario& sc, std::span<double> out);

struct UtilityReport {
    double u0 = 0;            // mean moderator utility
    std::vector<double> ui;   // mean per-radio utilities
    double t_term = 0;        // closed-form q0 E[w_max] - q1 c_coll - N c_p
    std::size_t n_trials = 0;
    double ci95 = 0;
};

UtilityReport expected_utilities(const Scenario& sc, std::size_t n_trials,
                                 std::uint64_t seed,
                                 mc::Exec exec = mc::Exec::parallel);

// ---- E[w_max] and feasibility ----

enum class WmaxMethod { closed_form_uniform_iid, monte_carlo };

// E[max(max_i w_i(t_i), clamp_at)] for iid uniform[0,1] models, closed form.
double expected_wmax_closed_form_uniform01(int n, double clamp_at = 0.0);

double expected_wmax_mc(std::span<const ValuationModel> models, double clamp_at,
                        std::size_t n_samples, std::uint64_t seed,
                        mc::Exec exec = mc::Exec::parallel);

double expected_wmax(std::span<const ValuationModel> models, double clamp_at,
                     WmaxMethod method, std::size_t n_samples = 1u << 20,
                     std::uint64_t seed = 0x0a05a);

// E[w_max] >= N c_p / q0 + (q1 / q0) c_coll; q0 == 0 counts as infeasible.
bool feasibility_check(double expected_wmax_value, double q0, double q1,
                       const CostModel& costs, int n);

}  // namespace oausa::auction
