#include "oausa/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "oausa/comparison.hpp"

namespace oausa::experiments {

const char* sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::pf: return "pf";
        case SweepParam::pd: return "pd";
        case SweepParam::c_p: return "c_p";
        case SweepParam::c_coll: return "c_coll";
    }
    return "?";
}

SweepParam sweep_param_from_name(const std::string& name) {
    if (name == "pf") return SweepParam::pf;
    if (name == "pd") return SweepParam::pd;
    if (name == "c_p") return SweepParam::c_p;
    if (name == "c_coll") return SweepParam::c_coll;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

ValuationModel parse_model_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ':')) parts.push_back(token);
    if (parts.empty()) throw std::invalid_argument("empty model spec");
    try {
        if (parts[0] == "uniform" && parts.size() == 3)
            return ValuationModel::uniform(std::stod(parts[1]), std::stod(parts[2]));
        if (parts[0] == "texp" && parts.size() == 4)
            return ValuationModel::truncated_exponential(
                std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]));
        if (parts[0] == "grid" && parts.size() == 2)
            return ValuationModel::empirical_from_csv(parts[1]);
    } catch (const std::invalid_argument&) {
        throw;
    }
    throw std::invalid_argument("bad model spec: " + spec +
                                " (want uniform:a:z, texp:a:z:rate or grid:path)");
}

void SweepConfig::validate() const {
    if (n_crs < 1) throw std::invalid_argument("sweep: n_crs >= 1");
    if (sweep_steps < 2) throw std::invalid_argument("sweep: steps >= 2");
    if (!(sweep_lo < sweep_hi)) throw std::invalid_argument("sweep: lo < hi");
    if (n_trials < 1) throw std::invalid_argument("sweep: n_trials >= 1");
    const bool prob = sweep_param == SweepParam::pf || sweep_param == SweepParam::pd;
    if (prob && !(sweep_lo >= 0.0 && sweep_hi <= 1.0))
        throw std::invalid_argument("sweep: probability range outside [0, 1]");
    if (!prob && !(sweep_lo >= 0.0))
        throw std::invalid_argument("sweep: costs must be nonnegative");
    if (!models.empty() && models.size() != static_cast<std::size_t>(n_crs))
        throw std::invalid_argument("sweep: models list must have n_crs entries");
}

std::vector<ValuationModel> SweepConfig::resolved_models() const {
    if (!models.empty()) return models;
    return std::vector<ValuationModel>(static_cast<std::size_t>(n_crs),
                                       ValuationModel::uniform(0, 1));
}

SweepConfig SweepConfig::from_kv(config::KvReader& kv) {
    SweepConfig cfg;
    cfg.n_crs = kv.get_int("n_crs", cfg.n_crs);
    cfg.pi0 = kv.get_double("pi0", cfg.pi0);
    cfg.pf = kv.get_double("pf", cfg.pf);
    cfg.pd = kv.get_double("pd", cfg.pd);
    cfg.c_p = kv.get_double("c_p", cfg.c_p);
    cfg.c_coll = kv.get_double("c_coll", cfg.c_coll);
    cfg.sweep_param =
        sweep_param_from_name(kv.get_string("sweep_param", sweep_param_name(cfg.sweep_param)));
    cfg.sweep_lo = kv.get_double("sweep_lo", cfg.sweep_lo);
    cfg.sweep_hi = kv.get_double("sweep_hi", cfg.sweep_hi);
    cfg.sweep_steps = kv.get_int("sweep_steps", cfg.sweep_steps);
    cfg.n_trials = kv.get_u64("n_trials", cfg.n_trials);
    cfg.seed = kv.get_u64("seed", cfg.seed);

    const std::string mechanisms = kv.get_string("mechanisms", "oausa,vcg");
    cfg.run_vcg = mechanisms.find("vcg") != std::string::npos;

    const std::string mode = kv.get_string("fusion_mode", "standard");
    if (mode == "standard")
        cfg.auction.fusion_mode = auction::FusionMode::standard;
    else if (mode == "strategy-proof" || mode == "strategy_proof")
        cfg.auction.fusion_mode = auction::FusionMode::strategy_proof;
    else
        throw std::invalid_argument("fusion_mode must be standard or strategy-proof");
    cfg.auction.sp_keep_k = kv.get_bool("sp_keep_k", cfg.auction.sp_keep_k);
    cfg.auction.use_reserve = kv.get_bool("use_reserve", cfg.auction.use_reserve);
    cfg.auction.paper_literal_payments =
        kv.get_bool("paper_literal_payments", cfg.auction.paper_literal_payments);

    if (kv.has("valuation")) {
        const auto model = parse_model_spec(kv.get_string("valuation", ""));
        cfg.models.assign(static_cast<std::size_t>(cfg.n_crs), model);
    } else if (kv.has("models")) {
        const std::string list = kv.get_string("models", "");
        std::istringstream in(list);
        std::string spec;
        while (std::getline(in, spec, ';'))
            if (!spec.empty()) cfg.models.push_back(parse_model_spec(spec));
    }
    cfg.validate();
    return cfg;
}

SweepConfig SweepConfig::from_file(const std::string& path) {
    config::KvReader kv(config::parse_kv_file(path));
    SweepConfig cfg = from_kv(kv);
    kv.finish();
    return cfg;
}

namespace {

double apply_sweep(SweepParam p, double value, double* pf, double* pd, double* cp,
                   double* ccoll) {
    switch (p) {
        case SweepParam::pf: *pf = value; break;
        case SweepParam::pd: *pd = value; break;
        case SweepParam::c_p: *cp = value; break;
        case SweepParam::c_coll: *ccoll = value; break;
    }
    return value;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, mc::Exec exec) {
    config.validate();
    SweepResult result;
    result.config = config;
    result.rows.resize(static_cast<std::size_t>(config.sweep_steps));

    const auto models = config.resolved_models();
    const bool uniform01 = valuation::all_uniform01(models);
    const int n = config.n_crs;

    for (int s = 0; s < config.sweep_steps; ++s) {
        SweepRow& row = result.rows[static_cast<std::size_t>(s)];
        const double value = config.sweep_lo +
                             (config.sweep_hi - config.sweep_lo) * s /
                                 (config.sweep_steps - 1.0);
        row.sweep_value = value;

        double pf = config.pf, pd = config.pd, cp = config.c_p, ccoll = config.c_coll;
        apply_sweep(config.sweep_param, value, &pf, &pd, &cp, &ccoll);

        Scenario sc{sensing::ChannelPrior::from_pi0(config.pi0),
                    sensing::SensorProfile{pf, pd},
                    models,
                    CostModel{cp, ccoll},
                    1,
                    config.auction};
        try {
            sc.k = sensing::optimal_k(sc.prior, sc.sensor, n);
        } catch (const std::domain_error&) {
            row.valid = false;  // flagged, not fatal
            const double nan = std::nan("");
            row.qf = row.qd = row.q0 = row.q1 = nan;
            row.u0_mean = row.u0_ci95 = row.u0_vcg = row.u0_traditional = nan;
            continue;
        }
        const auto tb = auction::precompute(sc);
        const auto& st = tb.effective(sc);
        row.valid = true;
        row.k_opt = sc.k;
        row.qf = tb.full.qf;
        row.qd = tb.full.qd;
        row.q0 = tb.full.q0;
        row.q1 = tb.full.q1;

        struct Scratch {
            auction::TrialDraws draws;
            auction::StageResult oausa, vcg;
        };
        // [u0, u0^2, vcg, vcg^2, diff, diff^2, psi_sum]
        auto acc = mc::blocked_accumulate<Scratch>(
            config.n_trials, 7, exec,
            [&](std::size_t trial, Scratch& sm, std::span<double> out) {
                Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s), trial));
                auction::draw_trial(rng, sc, sm.draws);
                auction::oausa_stage(sm.draws.valuations, sc, tb, sm.oausa);
                const bool busy = auction::fused_busy(sm.draws, sm.oausa, sc, tb);
                const double u0 =
                    auction::trial_moderator_utility(sm.draws, busy, sm.oausa, sc);
                out[0] += u0;
                out[1] += u0 * u0;
                if (config.run_vcg) {
                    comparison::vcg_stage(sm.draws.valuations, sc, tb, sm.vcg);
                    const bool busy_vcg = sensing::fuse(sm.draws.decisions, sc.k);
                    const double uv = auction::trial_moderator_utility(
                        sm.draws, busy_vcg, sm.vcg, sc);
                    out[2] += uv;
                    out[3] += uv * uv;
                    const double diff = u0 - uv;
                    out[4] += diff;
                    out[5] += diff * diff;
                }
                out[6] += sm.oausa.sum_psi();
            });

        const auto mo = mc::summarize_moments(acc[0], acc[1], config.n_trials);
        row.u0_mean = mo.mean;
        row.u0_ci95 = mo.ci95;
        if (config.run_vcg) {
            const auto mv = mc::summarize_moments(acc[2], acc[3], config.n_trials);
            row.u0_vcg = mv.mean;
            row.u0_vcg_ci95 = mv.ci95;
            const auto md = mc::summarize_moments(acc[4], acc[5], config.n_trials);
            row.diff_mean = md.mean;
            row.diff_ci95 = md.ci95;
        } else {
            row.u0_vcg = std::nan("");
        }
        row.mean_psi_sum = acc[6] / static_cast<double>(config.n_trials);

        row.ewmax = uniform01
                        ? auction::expected_wmax_closed_form_uniform01(n)
                        : auction::expected_wmax_mc(
                              models, 0.0, 1u << 18,
                              derive_seed(config.seed, static_cast<std::uint64_t>(s),
                                          0xeefa),
                              exec);
        row.t_closed_form = st.q0 * row.ewmax - st.q1 * ccoll - n * cp;
        row.feasible =
            auction::feasibility_check(row.ewmax, st.q0, st.q1, sc.costs, n);

        auto trad = comparison::traditional_utilities(
            {row.u0_mean, {}, row.t_closed_form, config.n_trials, row.u0_ci95},
            sc.prior, st.q0, st.q1, sc.costs, n);
        row.u0_traditional = trad.u0_hat;
    }
    return result;
}

namespace {

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void append_row(std::string& out, const char* param, const SweepRow& row, char sep) {
    out += param;
    out += sep;
    out += format_g12(row.sweep_value);
    out += sep;
    out += std::to_string(row.k_opt);
    out += sep;
    out += format_g12(row.qf);
    out += sep;
    out += format_g12(row.qd);
    out += sep;
    out += format_g12(row.q0);
    out += sep;
    out += format_g12(row.q1);
    out += sep;
    out += format_g12(row.u0_mean);
    out += sep;
    out += format_g12(row.u0_ci95);
    out += sep;
    out += format_g12(row.u0_vcg);
    out += sep;
    out += format_g12(row.u0_traditional);
    out += sep;
    out += row.feasible ? '1' : '0';
    out += '\n';
}

}  // namespace

std::string to_csv(const SweepResult& result) {
    std::string out =
        "sweep_param,sweep_value,k_opt,qf,qd,q0,q1,u0_mean,u0_ci95,u0_vcg,"
        "u0_traditional,feasible\n";
    const char* param = sweep_param_name(result.config.sweep_param);
    for (const auto& row : result.rows) append_row(out, param, row, ',');
    return out;
}

std::string to_plot_dat(const SweepResult& result) {
    std::string out =
        "# sweep_param sweep_value k_opt qf qd q0 q1 u0_mean u0_ci95 u0_vcg "
        "u0_traditional feasible\n";
    const char* param = sweep_param_name(result.config.sweep_param);
    for (const auto& row : result.rows) append_row(out, param, row, ' ');
    return out;
}

FeasibilityMapResult feasibility_map(const Scenario& base, double cp_lo, double cp_hi,
                                     int nx, double ccoll_lo, double ccoll_hi,
                                     int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("feasibility_map: empty grid");
    const auto tb = auction::precompute(base);
    const auto& st = tb.effective(base);
    const int n = static_cast<int>(base.n());

    FeasibilityMapResult map;
    map.nx = nx;
    map.ny = ny;
    map.q0 = st.q0;
    map.q1 = st.q1;
    map.ewmax =
        valuation::all_uniform01(base.models)
            ? auction::expected_wmax_closed_form_uniform01(n)
            : auction::expected_wmax_mc(base.models, 0.0, 1u << 19, 0xfea51b1e);
    map.cells.reserve(static_cast<std::size_t>(nx) * ny);
    for (int ix = 0; ix < nx; ++ix) {
        const double cp = nx == 1 ? cp_lo : cp_lo + (cp_hi - cp_lo) * ix / (nx - 1.0);
        for (int iy = 0; iy < ny; ++iy) {
            const double ccoll =
                ny == 1 ? ccoll_lo : ccoll_lo + (ccoll_hi - ccoll_lo) * iy / (ny - 1.0);
            FeasibilityCell cell;
            cell.c_p = cp;
            cell.c_coll = ccoll;
            cell.rhs = n * cp / st.q0 + st.q1 / st.q0 * ccoll;
            cell.feasible = auction::feasibility_check(map.ewmax, st.q0, st.q1,
                                                       CostModel{cp, ccoll}, n);
            map.cells.push_back(cell);
        }
    }
    return map;
}

std::string to_csv(const FeasibilityMapResult& map) {
    std::string out = "c_p,c_coll,rhs,feasible\n";
    for (const auto& cell : map.cells) {
        out += format_g12(cell.c_p);
        out += ',';
        out += format_g12(cell.c_coll);
        out += ',';
        out += format_g12(cell.rhs);
        out += ',';
        out += cell.feasible ? '1' : '0';
        out += '\n';
    }
    return out;
}

ThroughputSummary throughput_experiment(const Scenario& sc, double c_scale,
                                        std::size_t n_trials, std::uint64_t seed,
                                        mc::Exec exec) {
    ThroughputSummary summary;
    summary.n_trials = n_trials;
    summary.regular = true;
    for (const auto& m : sc.models)
        if (!valuation::regularity_check(m)) summary.regular = false;

    const auto tb = auction::precompute(sc);
    const auto& st = tb.effective(sc);
    const double ewmax =
        valuation::all_uniform01(sc.models)
            ? auction::expected_wmax_closed_form_uniform01(static_cast<int>(sc.n()))
            : auction::expected_wmax_mc(sc.models, 0.0, 1u << 19,
                                        derive_seed(seed, 0x7b), exec);
    summary.feasible = auction::feasibility_check(ewmax, st.q0, st.q1, sc.costs,
                                                  static_cast<int>(sc.n()));
    if (!summary.regular || !summary.feasible) return summary;

    struct Scratch {
        std::vector<double> v;
    };
    // [holds, equal, gap]
    auto acc = mc::blocked_accumulate<Scratch>(
        n_trials, 3, exec, [&](std::size_t trial, Scratch& s, std::span<double> out) {
            Rng rng(derive_seed(seed, trial));
            s.v.resize(sc.n());
            for (std::size_t i = 0; i < sc.n(); ++i) s.v[i] = sc.models[i].sample(rng);
            const auto rec = comparison::throughput_bound_check(sc.models, c_scale, s.v);
            out[0] += rec.holds ? 1.0 : 0.0;
            out[1] += rec.idx_oausa == rec.idx_vcg ? 1.0 : 0.0;
            out[2] += rec.x_vcg - rec.x_oausa;
        });
    summary.n_holds = static_cast<std::size_t>(acc[0]);
    summary.n_equal = static_cast<std::size_t>(acc[1]);
    summary.mean_gap = acc[2] / static_cast<double>(n_trials);
    summary.all_hold = summary.n_holds == n_trials;
    return summary;
}

}  // namespace oausa::experiments
