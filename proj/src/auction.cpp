#include "oausa/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oausa::auction {

CostModel::CostModel(double c_p_, double c_coll_) : c_p(c_p_), c_coll(c_coll_) {
    if (!(c_p >= 0)) throw std::invalid_argument("CostModel: require c_p >= 0");
    if (!(c_coll >= 0)) throw std::invalid_argument("CostModel: require c_coll >= 0");
}

void BidProfile::validate() const {
    const std::size_t n = valuations.size();
    if (n == 0 || decisions.size() != n || models.size() != n)
        throw std::invalid_argument("BidProfile: need N >= 1 aligned valuations/decisions/models");
    for (std::size_t i = 0; i < n; ++i)
        if (!(valuations[i] >= models[i].a() && valuations[i] <= models[i].z()))
            throw std::invalid_argument("BidProfile: valuation outside model support");
}

ScenarioTables precompute(const Scenario& sc) {
    const int n = static_cast<int>(sc.n());
    if (n < 1) throw std::invalid_argument("Scenario: no radios");
    if (sc.k < 1 || sc.k > n) throw std::invalid_argument("Scenario: k out of [1, N]");

    ScenarioTables tb;
    tb.full = sensing::fusion_stats(sc.prior, sc.sensor, sc.k, n);
    if (sc.config.fusion_mode == FusionMode::strategy_proof) {
        if (n < 2)
            throw std::invalid_argument("strategy-proof fusion needs at least two radios");
        const int k_eff = sc.config.sp_keep_k
                              ? std::min(sc.k, n - 1)
                              : sensing::optimal_k(sc.prior, sc.sensor, n - 1);
        tb.reduced = sensing::fusion_stats(sc.prior, sc.sensor, k_eff, n - 1);
        tb.reduced_valid = true;
    }

    const FusionStats& st = tb.effective(sc);
    if (sc.config.use_reserve) {
        if (!(st.q0 > 0)) throw std::domain_error("no allocation regime: q0 = 0");
        tb.reserve_w = st.q1 / st.q0 * sc.costs.c_coll;
        if (!sc.config.paper_literal_payments) {
            tb.t_reserve.reserve(sc.n());
            for (const auto& m : sc.models)
                tb.t_reserve.push_back(valuation::inverse_virtual(m, tb.reserve_w).t);
        }
    }
    return tb;
}

WinnerSet winner_set(std::span<const double> v, std::span<const ValuationModel> models,
                     double reserve_w) {
    const std::size_t n = v.size();
    if (n == 0 || models.size() != n)
        throw std::invalid_argument("winner_set: need aligned valuations and models");

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = models[i].virtual_valuation(v[i]);

    double w_max = -std::numeric_limits<double>::infinity();
    for (double wi : w) w_max = std::max(w_max, wi);

    WinnerSet ws;
    if (w_max >= reserve_w)
        for (std::size_t i = 0; i < n; ++i)
            if (w[i] == w_max) ws.winners.push_back(i);

    if (n >= 2) {
        // valuation of the second-largest element of w; for a tied maximum
        // this is another maximizer's valuation
        std::size_t first = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (w[i] > w[first]) first = i;
        double second = -std::numeric_limits<double>::infinity();
        std::size_t second_idx = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == first) continue;
            if (second_idx == n || w[i] > second) {
                second = w[i];
                second_idx = i;
            }
        }
        ws.t_star = v[second_idx];
    }
    return ws;
}

std::vector<double> allocate(const WinnerSet& ws, std::size_t n,
                             std::span<const double> delta) {
    std::vector<double> psi(n, 0.0);
    if (ws.winners.empty()) return psi;
    if (delta.empty()) {
        const double share = 1.0 / static_cast<double>(ws.winners.size());
        for (std::size_t i : ws.winners) psi[i] = share;
        return psi;
    }
    if (delta.size() != ws.winners.size())
        throw std::invalid_argument("allocate: delta must align with the winner set");
    double sum = 0;
    for (double d : delta) {
        if (!(d >= 0)) throw std::invalid_argument("allocate: negative share");
        sum += d;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("allocate: delta must sum to 1 over the winners");
    for (std::size_t j = 0; j < delta.size(); ++j) psi[ws.winners[j]] = delta[j];
    return psi;
}

std::vector<double> payments(std::span<const double> v,
                             std::span<const ValuationModel> models,
                             const WinnerSet& ws, std::span<const double> psi,
                             double q0, const CostModel& costs,
                             std::span<const double> t_reserve) {
    const std::size_t n = v.size();
    std::vector<double> b(n, -costs.c_p);  // CASE-1
    if (ws.winners.empty()) return b;

    if (ws.winners.size() >= 2) {
        for (std::size_t i : ws.winners) b[i] = q0 * psi[i] * v[i] - costs.c_p;  // CASE-2
        return b;
    }

    const std::size_t i = ws.winners.front();
    if (!ws.t_star.has_value() && n > 1)
        throw std::logic_error("payments: missing t_star for a contested single winner");
    const double a_i = models[i].a();
    const double floor_i = t_reserve.empty() ? a_i : std::max(a_i, t_reserve[i]);
    double critical;
    if (ws.t_star.has_value() && *ws.t_star >= a_i)
        critical = std::max(*ws.t_star, floor_i);  // CASE-3
    else
        critical = floor_i;                        // CASE-4
    b[i] = q0 * critical - costs.c_p;
    return b;
}

double StageResult::sum_payments() const {
    double s = 0;
    for (double x : payments) s += x;
    return s;
}

double StageResult::sum_psi() const {
    double s = 0;
    for (double x : psi) s += x;
    return s;
}

void oausa_stage(std::span<const double> v, const Scenario& sc,
                 const ScenarioTables& tb, StageResult& out) {
    const double reserve = sc.config.use_reserve
                               ? tb.reserve_w
                               : -std::numeric_limits<double>::infinity();
    out.ws = winner_set(v, sc.models, reserve);
    out.psi = allocate(out.ws, v.size());
    const double q0 = tb.effective(sc).q0;
    std::span<const double> t_res =
        (sc.config.use_reserve && !sc.config.paper_literal_payments)
            ? std::span<const double>(tb.t_reserve)
            : std::span<const double>{};
    out.payments = payments(v, sc.models, out.ws, out.psi, q0, sc.costs, t_res);
    out.any_winner = !out.ws.winners.empty();
}

namespace {

AuctionOutcome busy_outcome(std::size_t n, const Scenario& sc, const ScenarioTables& tb,
                            WinnerSet ws = {}) {
    AuctionOutcome o;
    o.psi.assign(n, 0.0);
    o.payments.assign(n, -sc.costs.c_p);
    o.winners = std::move(ws.winners);
    o.t_star = ws.t_star;
    o.allocated = false;
    o.reserve_w = sc.config.use_reserve ? tb.reserve_w : 0.0;
    return o;
}

AuctionOutcome stage_outcome(const StageResult& stage, bool allocated,
                             const Scenario& sc, const ScenarioTables& tb) {
    AuctionOutcome o;
    o.psi = stage.psi;
    o.payments = stage.payments;
    o.winners = stage.ws.winners;
    o.t_star = stage.ws.t_star;
    o.allocated = allocated && stage.any_winner;
    o.reserve_w = sc.config.use_reserve ? tb.reserve_w : 0.0;
    return o;
}

}  // namespace

AuctionOutcome run_oausa(const BidProfile& bids, const Scenario& sc,
                         const ScenarioTables& tb) {
    bids.validate();
    if (bids.size() != sc.n())
        throw std::invalid_argument("run_oausa: bid profile size differs from scenario");

    if (sc.config.fusion_mode == FusionMode::standard) {
        if (sensing::fuse(bids.decisions, sc.k))
            return busy_outcome(bids.size(), sc, tb);
        StageResult stage;
        oausa_stage(bids.valuations, sc, tb, stage);
        return stage_outcome(stage, true, sc, tb);
    }

    // strategy-proof: winners from valuations alone, then the gate ignores
    // their sensing bits
    StageResult stage;
    oausa_stage(bids.valuations, sc, tb, stage);
    const bool busy = fused_busy(TrialDraws{false, bids.decisions, bids.valuations},
                                 stage, sc, tb);
    if (busy) return busy_outcome(bids.size(), sc, tb, stage.ws);
    return stage_outcome(stage, true, sc, tb);
}

AuctionOutcome run_oausa(const BidProfile& bids, const Scenario& sc) {
    return run_oausa(bids, sc, precompute(sc));
}

void draw_trial(Rng& rng, const Scenario& sc, TrialDraws& out) {
    const std::size_t n = sc.n();
    out.decisions.resize(n);
    out.valuations.resize(n);
    out.pu_present = rng.bernoulli(sc.prior.pi1);
    const double p_one = out.pu_present ? sc.sensor.pd : sc.sensor.pf;
    for (std::size_t i = 0; i < n; ++i) out.decisions[i] = rng.bernoulli(p_one) ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) out.valuations[i] = sc.models[i].sample(rng);
}

bool fused_busy(const TrialDraws& d, const StageResult& stage, const Scenario& sc,
                const ScenarioTables& tb) {
    if (sc.config.fusion_mode == FusionMode::standard)
        return sensing::fuse(d.decisions, sc.k);
    // winner-excluded gate; with a tied winner set the threshold still fits
    // because |M| >= 2 only shrinks the pool further
    const auto& winners = stage.ws.winners;
    const std::size_t remaining = d.decisions.size() - winners.size();
    if (remaining == 0)
        throw std::invalid_argument("no sensing input");
    const int k_eff = std::min(tb.reduced.k, static_cast<int>(remaining));
    return sensing::strategy_proof_fuse(d.decisions, winners, k_eff);
}

double trial_moderator_utility(const TrialDraws& d, bool busy, const StageResult& stage,
                               const Scenario& sc) {
    const bool allocated = !busy && stage.any_winner;
    double u0 = stage.sum_payments();
    if (d.pu_present && allocated) u0 -= sc.costs.c_coll * stage.sum_psi();
    return u0;
}

void trial_cr_utilities(const TrialDraws& d, bool busy, const StageResult& stage,
                        const Scenario& sc, std::span<double> out) {
    const bool handed_over = !busy && stage.any_winner && !d.pu_present;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double gain = handed_over ? stage.psi[i] * d.valuations[i] : 0.0;
        out[i] = gain - stage.payments[i] - sc.costs.c_p;
    }
}

UtilityReport expected_utilities(const Scenario& sc, std::size_t n_trials,
                                 std::uint64_t seed, mc::Exec exec) {
    if (n_trials < 1) throw std::invalid_argument("expected_utilities: n_trials >= 1");
    const std::size_t n = sc.n();
    const ScenarioTables tb = precompute(sc);

    struct Scratch {
        TrialDraws draws;
        StageResult stage;
        std::vector<double> ui;
    };
    // accumulator row: [sum u0, sum u0^2, sum ui...]
    const std::size_t width = 2 + n;
    auto acc = mc::blocked_accumulate<Scratch>(
        n_trials, width, exec,
        [&](std::size_t trial, Scratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            draw_trial(rng, sc, s.draws);
            oausa_stage(s.draws.valuations, sc, tb, s.stage);
            const bool busy = fused_busy(s.draws, s.stage, sc, tb);
            const double u0 = trial_moderator_utility(s.draws, busy, s.stage, sc);
            s.ui.resize(n);
            trial_cr_utilities(s.draws, busy, s.stage, sc, s.ui);
            row[0] += u0;
            row[1] += u0 * u0;
            for (std::size_t i = 0; i < n; ++i) row[2 + i] += s.ui[i];
        });

    const auto moments = mc::summarize_moments(acc[0], acc[1], n_trials);
    UtilityReport rep;
    rep.u0 = moments.mean;
    rep.ci95 = moments.ci95;
    rep.n_trials = n_trials;
    rep.ui.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        rep.ui[i] = acc[2 + i] / static_cast<double>(n_trials);

    const FusionStats& st = tb.effective(sc);
    const double ew =
        valuation::all_uniform01(sc.models)
            ? expected_wmax_closed_form_uniform01(static_cast<int>(n))
            : expected_wmax_mc(sc.models, 0.0, 1u << 19, derive_seed(seed, 0xE77), exec);
    rep.t_term = st.q0 * ew - st.q1 * sc.costs.c_coll -
                 static_cast<double>(n) * sc.costs.c_p;
    return rep;
}

double expected_wmax_closed_form_uniform01(int n, double clamp_at) {
    if (n < 1) throw std::invalid_argument("expected_wmax: n >= 1");
    if (!(clamp_at >= 0.0 && clamp_at < 1.0))
        throw std::invalid_argument("expected_wmax: clamp level must lie in [0, 1)");
    // w_max = 2 max(t) - 1 with max(t) ~ Beta(N, 1);
    // E[max(w_max, r)] = r s^N + 2N/(N+1) (1 - s^(N+1)) - (1 - s^N), s = (1+r)/2
    const double nn = n;
    const double s = 0.5 * (1.0 + clamp_at);
    return clamp_at * std::pow(s, nn) +
           2.0 * nn / (nn + 1.0) * (1.0 - std::pow(s, nn + 1.0)) -
           (1.0 - std::pow(s, nn));
}

double expected_wmax_mc(std::span<const ValuationModel> models, double clamp_at,
                        std::size_t n_samples, std::uint64_t seed, mc::Exec exec) {
    if (models.empty()) throw std::invalid_argument("expected_wmax: no models");
    struct Scratch {};
    auto acc = mc::blocked_accumulate<Scratch>(
        n_samples, 1, exec, [&](std::size_t trial, Scratch&, std::span<double> row) {
            Rng rng(derive_seed(seed, trial, 0x3aa));
            double w_max = clamp_at;
            for (const auto& m : models)
                w_max = std::max(w_max, m.virtual_valuation(m.sample(rng)));
            row[0] += w_max;
        });
    return acc[0] / static_cast<double>(n_samples);
}

double expected_wmax(std::span<const ValuationModel> models, double clamp_at,
                     WmaxMethod method, std::size_t n_samples, std::uint64_t seed) {
    if (method == WmaxMethod::closed_form_uniform_iid) {
        if (!valuation::all_uniform01(models))
            throw std::invalid_argument(
                "expected_wmax: closed form requires iid uniform[0,1] models");
        return expected_wmax_closed_form_uniform01(static_cast<int>(models.size()),
                                                   clamp_at);
    }
    return expected_wmax_mc(models, clamp_at, n_samples, seed);
}

bool feasibility_check(double expected_wmax_value, double q0, double q1,
                       const CostModel& costs, int n) {
    if (!(q0 > 0)) return false;  // the moderator never allocates
    return expected_wmax_value >= n * costs.c_p / q0 + q1 / q0 * costs.c_coll;
}

}  // namespace oausa::auction
