#include "oausa/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace oausa::verifier {

namespace {

using auction::ScenarioTables;
using auction::StageResult;

// Absolute floor below which a paired difference is rounding residue, not a
// mechanism property. The 3-standard-error rule alone misfires when the mean
// and its standard error are both accumulated float dust (~1e-19).
constexpr double kFpNoise = 1e-12;

// first-price negative control: argmax-v winners pay their own (scaled) bid
void first_price_stage(std::span<const double> v, const Scenario& sc,
                       const ScenarioTables& tb, StageResult& out) {
    const std::size_t n = v.size();
    const double q0 = tb.effective(sc).q0;
    double v_max = v[0];
    for (double vi : v) v_max = std::max(v_max, vi);
    out.ws.winners.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] == v_max) out.ws.winners.push_back(i);
    out.ws.t_star.reset();
    out.psi = auction::allocate(out.ws, n);
    out.payments.assign(n, -sc.costs.c_p);
    for (std::size_t i : out.ws.winners)
        out.payments[i] = q0 * out.psi[i] * v[i] - sc.costs.c_p;
    out.any_winner = true;
}

void run_stage(Mechanism mech, std::span<const double> v, const Scenario& sc,
               const ScenarioTables& tb, StageResult& out) {
    switch (mech) {
        case Mechanism::oausa:
        case Mechanism::oausa_paper_literal:
            auction::oausa_stage(v, sc, tb, out);
            return;
        case Mechanism::vcg:
            comparison::vcg_stage(v, sc, tb, out);
            return;
        case Mechanism::first_price:
            first_price_stage(v, sc, tb, out);
            return;
    }
}

// The valuation game is analyzed under the standard gate; mechanism flags
// override the scenario's payment configuration.
Scenario configure(const Scenario& base, Mechanism mech) {
    Scenario sc = base;
    sc.config.fusion_mode = auction::FusionMode::standard;
    switch (mech) {
        case Mechanism::oausa:
            sc.config.use_reserve = true;
            sc.config.paper_literal_payments = false;
            break;
        case Mechanism::oausa_paper_literal:
            sc.config.use_reserve = true;
            sc.config.paper_literal_payments = true;
            break;
        case Mechanism::vcg:
        case Mechanism::first_price:
            break;
    }
    return sc;
}

std::vector<double> support_grid(const valuation::ValuationModel& m, int points) {
    std::vector<double> g(points);
    for (int j = 0; j < points; ++j)
        g[j] = m.a() + (m.z() - m.a()) * j / (points - 1.0);
    return g;
}

struct StageScratch {
    std::vector<double> v;
    StageResult stage;
    std::vector<double> psi_t, pay_t, psi_v, pay_v;
};

}  // namespace

const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::oausa: return "oausa";
        case Mechanism::oausa_paper_literal: return "oausa-paper-literal";
        case Mechanism::vcg: return "vcg";
        case Mechanism::first_price: return "first-price";
    }
    return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
    if (name == "oausa") return Mechanism::oausa;
    if (name == "oausa-paper-literal") return Mechanism::oausa_paper_literal;
    if (name == "vcg") return Mechanism::vcg;
    if (name == "first-price") return Mechanism::first_price;
    throw std::invalid_argument("unknown mechanism: " + name);
}

std::vector<DeviationReport> check_ic(const Scenario& base, Mechanism mech, int grid_t,
                                      int grid_v, std::size_t n_trials,
                                      std::uint64_t seed, mc::Exec exec) {
    if (grid_t < 8 || grid_v < 8)
        throw std::invalid_argument("check_ic: grids need at least 8 points");
    const Scenario sc = configure(base, mech);
    const ScenarioTables tb = auction::precompute(sc);
    const double q0 = tb.effective(sc).q0;
    const std::size_t n = sc.n();

    std::vector<std::vector<double>> tg(n), vg(n);
    for (std::size_t i = 0; i < n; ++i) {
        tg[i] = support_grid(sc.models[i], grid_t);
        vg[i] = support_grid(sc.models[i], grid_v);
    }

    // row: per (i, t): [sum u_truth, sum u_truth^2], then per (i, t, v):
    // [sum d, sum d^2] with d the paired misreport-minus-truth difference
    const std::size_t gt = static_cast<std::size_t>(grid_t);
    const std::size_t gv = static_cast<std::size_t>(grid_v);
    const std::size_t truth_off = 0;
    const std::size_t dev_off = 2 * n * gt;
    const std::size_t width = 2 * n * gt + 2 * n * gt * gv;

    auto acc = mc::blocked_accumulate<StageScratch>(
        n_trials, width, exec,
        [&](std::size_t trial, StageScratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            s.v.resize(n);
            for (std::size_t i = 0; i < n; ++i) s.v[i] = sc.models[i].sample(rng);
            s.psi_t.resize(gt);
            s.pay_t.resize(gt);
            s.psi_v.resize(gv);
            s.pay_v.resize(gv);
            for (std::size_t i = 0; i < n; ++i) {
                const double keep = s.v[i];
                for (std::size_t j = 0; j < gt; ++j) {
                    s.v[i] = tg[i][j];
                    run_stage(mech, s.v, sc, tb, s.stage);
                    s.psi_t[j] = s.stage.psi[i];
                    s.pay_t[j] = s.stage.payments[i];
                }
                for (std::size_t j = 0; j < gv; ++j) {
                    s.v[i] = vg[i][j];
                    run_stage(mech, s.v, sc, tb, s.stage);
                    s.psi_v[j] = s.stage.psi[i];
                    s.pay_v[j] = s.stage.payments[i];
                }
                s.v[i] = keep;
                for (std::size_t j = 0; j < gt; ++j) {
                    const double t = tg[i][j];
                    const double u_truth =
                        q0 * s.psi_t[j] * t - s.pay_t[j] - sc.costs.c_p;
                    double* cell = &row[truth_off + 2 * (i * gt + j)];
                    cell[0] += u_truth;
                    cell[1] += u_truth * u_truth;
                    for (std::size_t j2 = 0; j2 < gv; ++j2) {
                        const double u_dev =
                            q0 * s.psi_v[j2] * t - s.pay_v[j2] - sc.costs.c_p;
                        const double d = u_dev - u_truth;
                        double* dc = &row[dev_off + 2 * ((i * gt + j) * gv + j2)];
                        dc[0] += d;
                        dc[1] += d * d;
                    }
                }
            }
        });

    std::vector<DeviationReport> reports;
    reports.reserve(n * gt);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < gt; ++j) {
            DeviationReport rep;
            rep.cr_index = i;
            rep.true_value = tg[i][j];
            const double* cell = &acc[truth_off + 2 * (i * gt + j)];
            rep.utility_truth = cell[0] / static_cast<double>(n_trials);
            double best_d = -std::numeric_limits<double>::infinity();
            double best_se = 0, best_v = tg[i][j];
            for (std::size_t j2 = 0; j2 < gv; ++j2) {
                const double* dc = &acc[dev_off + 2 * ((i * gt + j) * gv + j2)];
                const auto m = mc::summarize_moments(dc[0], dc[1], n_trials);
                if (m.mean > best_d) {
                    best_d = m.mean;
                    best_se = m.se;
                    best_v = vg[i][j2];
                }
            }
            rep.best_misreport = best_v;
            rep.utility_best_misreport = rep.utility_truth + best_d;
            rep.standard_error = best_se;
            rep.violated = best_d > 3.0 * best_se + kFpNoise;
            reports.push_back(rep);
        }
    }
    return reports;
}

std::vector<IrReport> check_ir(const Scenario& base, Mechanism mech, int grid_t,
                               std::size_t n_trials, std::uint64_t seed,
                               mc::Exec exec) {
    if (grid_t < 8) throw std::invalid_argument("check_ir: grid needs at least 8 points");
    const Scenario sc = configure(base, mech);
    const ScenarioTables tb = auction::precompute(sc);
    const double q0 = tb.effective(sc).q0;
    const std::size_t n = sc.n();
    const std::size_t gt = static_cast<std::size_t>(grid_t);

    std::vector<std::vector<double>> tg(n);
    for (std::size_t i = 0; i < n; ++i) tg[i] = support_grid(sc.models[i], grid_t);

    const std::size_t width = 2 * n * gt;
    auto acc = mc::blocked_accumulate<StageScratch>(
        n_trials, width, exec,
        [&](std::size_t trial, StageScratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            s.v.resize(n);
            for (std::size_t i = 0; i < n; ++i) s.v[i] = sc.models[i].sample(rng);
            for (std::size_t i = 0; i < n; ++i) {
                const double keep = s.v[i];
                for (std::size_t j = 0; j < gt; ++j) {
                    s.v[i] = tg[i][j];
                    run_stage(mech, s.v, sc, tb, s.stage);
                    const double u = q0 * s.stage.psi[i] * tg[i][j] -
                                     s.stage.payments[i] - sc.costs.c_p;
                    row[2 * (i * gt + j)] += u;
                    row[2 * (i * gt + j) + 1] += u * u;
                }
                s.v[i] = keep;
            }
        });

    std::vector<IrReport> reports(n);
    for (std::size_t i = 0; i < n; ++i) {
        IrReport& rep = reports[i];
        rep.cr_index = i;
        rep.min_utility = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < gt; ++j) {
            const auto m = mc::summarize_moments(acc[2 * (i * gt + j)],
                                                 acc[2 * (i * gt + j) + 1], n_trials);
            if (j == 0) {
                rep.utility_at_a = m.mean;
                rep.utility_at_a_se = m.se;
            }
            if (j == gt - 1) rep.utility_at_z = m.mean;
            if (m.mean < rep.min_utility) {
                rep.min_utility = m.mean;
                rep.min_utility_se = m.se;
                rep.min_at_value = tg[i][j];
            }
        }
        rep.violated = rep.min_utility < -(3.0 * rep.min_utility_se + kFpNoise);
    }
    return reports;
}

AllocationCurve expected_allocation(const Scenario& base, Mechanism mech,
                                    std::size_t cr_index, int grid_size,
                                    std::size_t n_trials, std::uint64_t seed,
                                    mc::Exec exec) {
    const Scenario sc = configure(base, mech);
    const ScenarioTables tb = auction::precompute(sc);
    const double q0 = tb.effective(sc).q0;
    const std::size_t n = sc.n();
    if (cr_index >= n) throw std::invalid_argument("expected_allocation: bad index");
    const std::size_t g = static_cast<std::size_t>(grid_size);

    AllocationCurve curve;
    curve.cr_index = cr_index;
    curve.v_grid = support_grid(sc.models[cr_index], grid_size);

    // row: per grid point [sum psi, sum psi^2], then per adjacent pair
    // [sum diff, sum diff^2]
    const std::size_t pair_off = 2 * g;
    const std::size_t width = 2 * g + 2 * (g - 1);
    auto acc = mc::blocked_accumulate<StageScratch>(
        n_trials, width, exec,
        [&](std::size_t trial, StageScratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            s.v.resize(n);
            for (std::size_t i = 0; i < n; ++i) s.v[i] = sc.models[i].sample(rng);
            s.psi_t.resize(g);
            for (std::size_t j = 0; j < g; ++j) {
                s.v[cr_index] = curve.v_grid[j];
                run_stage(mech, s.v, sc, tb, s.stage);
                s.psi_t[j] = q0 * s.stage.psi[cr_index];
                row[2 * j] += s.psi_t[j];
                row[2 * j + 1] += s.psi_t[j] * s.psi_t[j];
            }
            for (std::size_t j = 0; j + 1 < g; ++j) {
                const double diff = s.psi_t[j + 1] - s.psi_t[j];
                row[pair_off + 2 * j] += diff;
                row[pair_off + 2 * j + 1] += diff * diff;
            }
        });

    curve.psi.resize(g);
    curve.se.resize(g);
    for (std::size_t j = 0; j < g; ++j) {
        const auto m = mc::summarize_moments(acc[2 * j], acc[2 * j + 1], n_trials);
        curve.psi[j] = m.mean;
        curve.se[j] = m.se;
    }
    for (std::size_t j = 0; j + 1 < g; ++j) {
        const auto m = mc::summarize_moments(acc[pair_off + 2 * j],
                                             acc[pair_off + 2 * j + 1], n_trials);
        if (m.mean < -(3.0 * m.se + kFpNoise)) curve.monotone_within_ci = false;
    }
    return curve;
}

std::vector<SensingDeviationResult> check_sensing_truthfulness(
    const Scenario& sc, std::span<const DeviationPolicy> policies,
    std::size_t n_trials, std::uint64_t seed, mc::Exec exec) {
    const ScenarioTables tb = auction::precompute(sc);
    const std::size_t n = sc.n();
    const std::size_t np = policies.size();

    struct Scratch {
        auction::TrialDraws draws;
        StageResult stage;
        std::vector<std::uint8_t> reported;
    };

    // row: per policy [sum delta, sum delta^2]
    auto acc = mc::blocked_accumulate<Scratch>(
        n_trials, 2 * np, exec,
        [&](std::size_t trial, Scratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            auction::draw_trial(rng, sc, s.draws);
            const double u_flip = rng.uniform();  // common across policies

            auction::oausa_stage(s.draws.valuations, sc, tb, s.stage);
            // deviator: the radio holding the maximum virtual valuation
            std::size_t dev = 0;
            double w_best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double w = sc.models[i].virtual_valuation(s.draws.valuations[i]);
                if (w > w_best) {
                    w_best = w;
                    dev = i;
                }
            }

            const bool busy_truth = auction::fused_busy(s.draws, s.stage, sc, tb);
            const bool idle_truth = !busy_truth && s.stage.any_winner;
            const double value_term =
                !s.draws.pu_present ? s.stage.psi[dev] * s.draws.valuations[dev] : 0.0;
            const double u_truth = (idle_truth ? value_term : 0.0) -
                                   s.stage.payments[dev] - sc.costs.c_p;

            s.reported = s.draws.decisions;
            for (std::size_t p = 0; p < np; ++p) {
                const auto& pol = policies[p];
                const std::uint8_t u_true = s.draws.decisions[dev];
                const std::uint8_t u_rep =
                    u_true == 0 ? (u_flip < pol.alpha1 ? 1 : 0)
                                : (u_flip < pol.alpha2 ? 0 : 1);
                s.reported[dev] = u_rep;
                auction::TrialDraws deviated{s.draws.pu_present, s.reported,
                                             s.draws.valuations};
                const bool busy_dev = auction::fused_busy(deviated, s.stage, sc, tb);
                const bool idle_dev = !busy_dev && s.stage.any_winner;
                const double u_dev = (idle_dev ? value_term : 0.0) -
                                     s.stage.payments[dev] - sc.costs.c_p;
                const double delta = u_dev - u_truth;
                row[2 * p] += delta;
                row[2 * p + 1] += delta * delta;
                s.reported[dev] = u_true;
            }
        });

    std::vector<SensingDeviationResult> out;
    out.reserve(np);
    for (std::size_t p = 0; p < np; ++p) {
        const auto m = mc::summarize_moments(acc[2 * p], acc[2 * p + 1], n_trials);
        out.push_back({policies[p], m.mean, m.se});
    }
    return out;
}

std::vector<JointDeviationResult> check_joint_deviation(
    const Scenario& sc, std::span<const DeviationPolicy> policies,
    std::span<const double> misreport_factors, std::size_t n_trials,
    std::uint64_t seed, mc::Exec exec) {
    const ScenarioTables tb = auction::precompute(sc);
    const std::size_t n = sc.n();
    const std::size_t np = policies.size();
    const std::size_t nf = misreport_factors.size();

    struct Scratch {
        auction::TrialDraws draws;
        StageResult stage_truth, stage_dev;
        std::vector<std::uint8_t> reported;
        std::vector<double> v_dev;
    };

    auto acc = mc::blocked_accumulate<Scratch>(
        n_trials, 2 * np * nf, exec,
        [&](std::size_t trial, Scratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            auction::draw_trial(rng, sc, s.draws);
            const double u_flip = rng.uniform();

            auction::oausa_stage(s.draws.valuations, sc, tb, s.stage_truth);
            std::size_t dev = 0;
            double w_best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double w = sc.models[i].virtual_valuation(s.draws.valuations[i]);
                if (w > w_best) {
                    w_best = w;
                    dev = i;
                }
            }
            const double t_dev = s.draws.valuations[dev];

            const bool busy_truth = auction::fused_busy(s.draws, s.stage_truth, sc, tb);
            const bool idle_truth = !busy_truth && s.stage_truth.any_winner;
            const double u_truth =
                (idle_truth && !s.draws.pu_present ? s.stage_truth.psi[dev] * t_dev
                                                   : 0.0) -
                s.stage_truth.payments[dev] - sc.costs.c_p;

            s.reported = s.draws.decisions;
            s.v_dev = s.draws.valuations;
            const auto& model = sc.models[dev];
            for (std::size_t p = 0; p < np; ++p) {
                const auto& pol = policies[p];
                const std::uint8_t u_true = s.draws.decisions[dev];
                s.reported[dev] = u_true == 0 ? (u_flip < pol.alpha1 ? 1 : 0)
                                              : (u_flip < pol.alpha2 ? 0 : 1);
                for (std::size_t f = 0; f < nf; ++f) {
                    const double scaled =
                        model.a() + misreport_factors[f] * (t_dev - model.a());
                    s.v_dev[dev] = std::clamp(scaled, model.a(), model.z());
                    auction::oausa_stage(s.v_dev, sc, tb, s.stage_dev);
                    auction::TrialDraws deviated{s.draws.pu_present, s.reported,
                                                 s.v_dev};
                    const bool busy_dev =
                        auction::fused_busy(deviated, s.stage_dev, sc, tb);
                    const bool idle_dev = !busy_dev && s.stage_dev.any_winner;
                    const double u_dev =
                        (idle_dev && !s.draws.pu_present
                             ? s.stage_dev.psi[dev] * t_dev
                             : 0.0) -
                        s.stage_dev.payments[dev] - sc.costs.c_p;
                    const double delta = u_dev - u_truth;
                    row[2 * (p * nf + f)] += delta;
                    row[2 * (p * nf + f) + 1] += delta * delta;
                }
                s.v_dev[dev] = t_dev;
                s.reported[dev] = u_true;
            }
        });

    std::vector<JointDeviationResult> out;
    out.reserve(np * nf);
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t f = 0; f < nf; ++f) {
            const auto m = mc::summarize_moments(acc[2 * (p * nf + f)],
                                                 acc[2 * (p * nf + f) + 1], n_trials);
            out.push_back({policies[p], misreport_factors[f], m.mean, m.se});
        }
    return out;
}

std::vector<ExactIcVerdict> exact_ic_n2(const Scenario& base, Mechanism mech,
                                        std::span<const double> atoms) {
    if (base.n() != 2) throw std::invalid_argument("exact_ic_n2: N must be 2");
    if (atoms.empty()) throw std::invalid_argument("exact_ic_n2: no atoms");
    const Scenario sc = configure(base, mech);
    const ScenarioTables tb = auction::precompute(sc);
    const double q0 = tb.effective(sc).q0;
    const double p_atom = 1.0 / static_cast<double>(atoms.size());

    std::vector<ExactIcVerdict> verdicts;
    StageResult stage;
    std::vector<double> v(2);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t peer = 1 - i;
        // exact expected (psi_i, b_i) for each own report
        std::vector<double> mean_psi(atoms.size(), 0.0), mean_pay(atoms.size(), 0.0);
        for (std::size_t r = 0; r < atoms.size(); ++r) {
            for (double peer_v : atoms) {
                v[i] = atoms[r];
                v[peer] = peer_v;
                run_stage(mech, v, sc, tb, stage);
                mean_psi[r] += p_atom * stage.psi[i];
                mean_pay[r] += p_atom * stage.payments[i];
            }
        }
        for (std::size_t jt = 0; jt < atoms.size(); ++jt) {
            const double t = atoms[jt];
            ExactIcVerdict verdict;
            verdict.cr_index = i;
            verdict.true_value = t;
            verdict.utility_truth =
                q0 * mean_psi[jt] * t - mean_pay[jt] - sc.costs.c_p;
            verdict.best_misreport = t;
            verdict.utility_best_misreport = verdict.utility_truth;
            for (std::size_t jv = 0; jv < atoms.size(); ++jv) {
                const double u = q0 * mean_psi[jv] * t - mean_pay[jv] - sc.costs.c_p;
                if (u > verdict.utility_best_misreport) {
                    verdict.utility_best_misreport = u;
                    verdict.best_misreport = atoms[jv];
                }
            }
            verdict.violated = verdict.utility_best_misreport - verdict.utility_truth >
                               1e-12 * std::max(1.0, std::abs(verdict.utility_truth));
            verdicts.push_back(verdict);
        }
    }
    return verdicts;
}

std::vector<DeviationReport> check_ic_discrete_n2(const Scenario& base, Mechanism mech,
                                                  std::span<const double> atoms,
                                                  std::size_t n_trials,
                                                  std::uint64_t seed, mc::Exec exec) {
    if (base.n() != 2) throw std::invalid_argument("check_ic_discrete_n2: N must be 2");
    const Scenario sc = configure(base, mech);
    const ScenarioTables tb = auction::precompute(sc);
    const double q0 = tb.effective(sc).q0;
    const std::size_t na = atoms.size();

    // row: per (i, t): [sum u_truth], then per (i, t, v): [sum d, sum d^2]
    const std::size_t truth_off = 0;
    const std::size_t dev_off = 2 * na;
    const std::size_t width = 2 * na + 2 * 2 * na * na;

    auto acc = mc::blocked_accumulate<StageScratch>(
        n_trials, width, exec,
        [&](std::size_t trial, StageScratch& s, std::span<double> row) {
            Rng rng(derive_seed(seed, trial));
            // common peer draw per radio
            s.v.resize(2);
            s.psi_v.resize(na);
            s.pay_v.resize(na);
            for (std::size_t i = 0; i < 2; ++i) {
                const std::size_t peer = 1 - i;
                const auto bin = std::min<std::size_t>(
                    static_cast<std::size_t>(rng.uniform() * na), na - 1);
                s.v[peer] = atoms[bin];
                for (std::size_t r = 0; r < na; ++r) {
                    s.v[i] = atoms[r];
                    run_stage(mech, s.v, sc, tb, s.stage);
                    s.psi_v[r] = s.stage.psi[i];
                    s.pay_v[r] = s.stage.payments[i];
                }
                for (std::size_t jt = 0; jt < na; ++jt) {
                    const double t = atoms[jt];
                    const double u_truth =
                        q0 * s.psi_v[jt] * t - s.pay_v[jt] - sc.costs.c_p;
                    row[truth_off + i * na + jt] += u_truth;
                    for (std::size_t jv = 0; jv < na; ++jv) {
                        const double u_dev =
                            q0 * s.psi_v[jv] * t - s.pay_v[jv] - sc.costs.c_p;
                        const double d = u_dev - u_truth;
                        double* dc = &row[dev_off + 2 * ((i * na + jt) * na + jv)];
                        dc[0] += d;
                        dc[1] += d * d;
                    }
                }
            }
        });

    std::vector<DeviationReport> reports;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t jt = 0; jt < na; ++jt) {
            DeviationReport rep;
            rep.cr_index = i;
            rep.true_value = atoms[jt];
            rep.utility_truth =
                acc[truth_off + i * na + jt] / static_cast<double>(n_trials);
            double best_d = -std::numeric_limits<double>::infinity();
            double best_se = 0, best_v = atoms[jt];
            for (std::size_t jv = 0; jv < na; ++jv) {
                const double* dc = &acc[dev_off + 2 * ((i * na + jt) * na + jv)];
                const auto m = mc::summarize_moments(dc[0], dc[1], n_trials);
                if (m.mean > best_d) {
                    best_d = m.mean;
                    best_se = m.se;
                    best_v = atoms[jv];
                }
            }
            rep.best_misreport = best_v;
            rep.utility_best_misreport = rep.utility_truth + best_d;
            rep.standard_error = best_se;
            rep.violated = best_d > 3.0 * best_se + kFpNoise;
            reports.push_back(rep);
        }
    return reports;
}

bool any_violation(std::span<const DeviationReport> reports) {
    return std::any_of(reports.begin(), reports.end(),
                       [](const DeviationReport& r) { return r.violated; });
}

bool any_violation(std::span<const IrReport> reports) {
    return std::any_of(reports.begin(), reports.end(),
                       [](const IrReport& r) { return r.violated; });
}

}  // namespace oausa::verifier
