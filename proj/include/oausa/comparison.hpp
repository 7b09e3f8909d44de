#pragma once

#include <span>

#include "oausa/auction.hpp"

namespace oausa::comparison {

using auction::AuctionOutcome;
using auction::BidProfile;
using auction::CostModel;
using auction::Scenario;
using auction::ScenarioTables;
using auction::StageResult;
using auction::UtilityReport;
using sensing::ChannelPrior;
using valuation::ValuationModel;

// Fusion-gated second-price baseline ("modified VCG"): winner is the argmax of
// revealed valuations, pays q0 times the second-highest valuation (the support
// floor with no competitor), losers get the c_p rebate, no reserve. Ties split
// the spectrum equally and pay q0 * delta * v, mirroring the main mechanism.
// The paper never pins this baseline down; this is the artifact's definition.
void vcg_stage(std::span<const double> v, const Scenario& sc,
               const ScenarioTables& tb, StageResult& out);

AuctionOutcome run_modified_vcg(const BidProfile& bids, const Scenario& sc,
                                const ScenarioTables& tb);
AuctionOutcome run_modified_vcg(const BidProfile& bids, const Scenario& sc);

struct TraditionalUtilities {
    double u0_hat;            // U0 - (pi1 - q1) c_coll + N c_p
    double cr_bound_factor;   // (1 - q0); radio i's gain is below (1-q0) t_i
};

TraditionalUtilities traditional_utilities(const UtilityReport& report,
                                           const ChannelPrior& prior, double q0,
                                           double q1, const CostModel& costs, int n);

// Collaborative sensing beats the always-allocate auction only when
// q1 <= pi1 - N c_p / c_coll. A free spectrum-sensing stage (c_p = 0) is the
// only way to profit when collisions cost nothing.
bool sensing_merit(const ChannelPrior& prior, double q1, const CostModel& costs, int n);

struct ThroughputRecord {
    double x_oausa;      // throughput of the virtual-valuation winner
    double x_vcg;        // throughput of the max-valuation radio
    double lower_bound;  // x_vcg - (1 - F(t_k)) / (c p(t_k)) at t_k = c x_vcg
    bool holds;          // lower_bound <= x_oausa <= x_vcg
    std::size_t idx_oausa;
    std::size_t idx_vcg;
};

// Throughput positions of one realized round under the shared scale t = c x.
ThroughputRecord throughput_bound_check(std::span<const ValuationModel> models,
                                        double c, std::span<const double> valuations);

}  // namespace oausa::comparison
