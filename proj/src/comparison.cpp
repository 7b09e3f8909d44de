#include "oausa/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oausa::comparison {

void vcg_stage(std::span<const double> v, const Scenario& sc,
               const ScenarioTables& tb, StageResult& out) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("vcg_stage: empty round");
    const double q0 = tb.effective(sc).q0;

    double v_max = v[0];
    for (double vi : v) v_max = std::max(v_max, vi);
    out.ws.winners.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] == v_max) out.ws.winners.push_back(i);

    out.ws.t_star.reset();
    if (n >= 2) {
        double second = -std::numeric_limits<double>::infinity();
        bool got = false;
        std::size_t skipped = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] == v_max && skipped == 0) {
                skipped = 1;
                continue;
            }
            if (!got || v[i] > second) {
                second = v[i];
                got = true;
            }
        }
        out.ws.t_star = second;
    }

    out.psi = auction::allocate(out.ws, n);
    out.payments.assign(n, -sc.costs.c_p);
    if (out.ws.winners.size() >= 2) {
        for (std::size_t i : out.ws.winners)
            out.payments[i] = q0 * out.psi[i] * v[i] - sc.costs.c_p;
    } else {
        const std::size_t i = out.ws.winners.front();
        const double price = n >= 2 ? *out.ws.t_star : sc.models[i].a();
        out.payments[i] = q0 * price - sc.costs.c_p;
    }
    out.any_winner = true;
}

AuctionOutcome run_modified_vcg(const BidProfile& bids, const Scenario& sc,
                                const ScenarioTables& tb) {
    bids.validate();
    AuctionOutcome o;
    o.reserve_w = 0.0;
    if (sensing::fuse(bids.decisions, sc.k)) {
        o.psi.assign(bids.size(), 0.0);
        o.payments.assign(bids.size(), -sc.costs.c_p);
        o.allocated = false;
        return o;
    }
    StageResult stage;
    vcg_stage(bids.valuations, sc, tb, stage);
    o.psi = stage.psi;
    o.payments = stage.payments;
    o.winners = stage.ws.winners;
    o.t_star = stage.ws.t_star;
    o.allocated = stage.any_winner;
    return o;
}

AuctionOutcome run_modified_vcg(const BidProfile& bids, const Scenario& sc) {
    return run_modified_vcg(bids, sc, auction::precompute(sc));
}

TraditionalUtilities traditional_utilities(const UtilityReport& report,
                                           const ChannelPrior& prior, double q0,
                                           double q1, const CostModel& costs, int n) {
    TraditionalUtilities t;
    t.u0_hat = report.u0 - (prior.pi1 - q1) * costs.c_coll + n * costs.c_p;
    t.cr_bound_factor = 1.0 - q0;
    return t;
}

bool sensing_merit(const ChannelPrior& prior, double q1, const CostModel& costs, int n) {
    if (costs.c_coll == 0.0) return costs.c_p == 0.0;
    return q1 <= prior.pi1 - n * costs.c_p / costs.c_coll;
}

ThroughputRecord throughput_bound_check(std::span<const ValuationModel> models,
                                        double c, std::span<const double> valuations) {
    const std::size_t n = valuations.size();
    if (n == 0 || models.size() != n)
        throw std::invalid_argument("throughput_bound_check: need aligned inputs");
    if (!(c > 0)) throw std::invalid_argument("throughput_bound_check: require c > 0");

    std::size_t j = 0, k = 0;
    double best_w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = models[i].virtual_valuation(valuations[i]);
        if (w > best_w) {
            best_w = w;
            j = i;
        }
        if (valuations[i] > valuations[k]) k = i;
    }

    ThroughputRecord rec;
    rec.idx_oausa = j;
    rec.idx_vcg = k;
    rec.x_oausa = valuations[j] / c;
    rec.x_vcg = valuations[k] / c;
    const double t_k = valuations[k];
    rec.lower_bound =
        rec.x_vcg - (1.0 - models[k].cdf(t_k)) / (c * models[k].pdf(t_k));
    rec.holds = rec.lower_bound <= rec.x_oausa + 1e-12 &&
                rec.x_oausa <= rec.x_vcg + 1e-12;
    return rec;
}

}  // namespace oausa::comparison
