// Command-line driver: single auction rounds, Monte-Carlo sweeps, mechanism
// verification, feasibility maps and throughput comparisons, all from flat
// key=value config files.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oausa/auction.hpp"
#include "oausa/comparison.hpp"
#include "oausa/experiments.hpp"
#include "oausa/verifier.hpp"

namespace fs = std::filesystem;
using namespace oausa;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool serial = false;
    bool no_reserve = false;
    bool paper_literal = false;
    std::string fusion_mode = "standard";
};

mc::Exec exec_policy(const GlobalOptions& opt) {
    return opt.serial ? mc::Exec::serial : mc::Exec::parallel;
}

void apply_threads(const GlobalOptions& opt) {
#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#else
    (void)opt;
#endif
}

std::uint64_t resolve_seed(const GlobalOptions& opt, bool config_had_seed,
                           std::uint64_t config_seed) {
    if (opt.seed) return *opt.seed;
    if (config_had_seed) return config_seed;
    if (const char* env = std::getenv("OAUSA_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
        throw std::runtime_error("OAUSA_SEED is not an integer");
    }
    return config_seed;
}

auction::FusionMode parse_fusion_mode(const std::string& mode) {
    if (mode == "standard") return auction::FusionMode::standard;
    if (mode == "strategy-proof" || mode == "strategy_proof")
        return auction::FusionMode::strategy_proof;
    throw std::runtime_error("fusion mode must be standard or strategy-proof");
}

void apply_flags(auction::AuctionConfig& cfg, const GlobalOptions& opt) {
    if (opt.no_reserve) cfg.use_reserve = false;
    if (opt.paper_literal) cfg.paper_literal_payments = true;
    cfg.fusion_mode = parse_fusion_mode(opt.fusion_mode);
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0')
            throw std::runtime_error(std::string("bad ") + what + " entry: " + token);
        out.push_back(v);
    }
    if (out.empty()) throw std::runtime_error(std::string("empty ") + what + " list");
    return out;
}

std::vector<valuation::ValuationModel> models_from_kv(config::KvReader& kv, int n) {
    if (kv.has("valuation")) {
        auto model = experiments::parse_model_spec(kv.get_string("valuation", ""));
        return std::vector<valuation::ValuationModel>(static_cast<std::size_t>(n),
                                                      model);
    }
    if (kv.has("models")) {
        std::vector<valuation::ValuationModel> models;
        std::istringstream in(kv.get_string("models", ""));
        std::string spec;
        while (std::getline(in, spec, ';'))
            if (!spec.empty()) models.push_back(experiments::parse_model_spec(spec));
        if (models.size() != static_cast<std::size_t>(n))
            throw std::runtime_error("models list must have n_crs entries");
        return models;
    }
    return std::vector<valuation::ValuationModel>(static_cast<std::size_t>(n),
                                                  valuation::ValuationModel::uniform(0, 1));
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

// ---- run ----

int cmd_run(const GlobalOptions& opt) {
    config::KvReader kv(config::parse_kv_file(opt.config_path));
    const auto decisions_text = kv.get_string("decisions", "");
    const auto valuations_text = kv.get_string("valuations", "");
    if (decisions_text.empty() || valuations_text.empty())
        throw std::runtime_error("run config needs decisions and valuations lists");

    auction::BidProfile bids;
    bids.valuations = parse_double_list(valuations_text, "valuations");
    for (double d : parse_double_list(decisions_text, "decisions")) {
        if (d != 0.0 && d != 1.0) throw std::runtime_error("decisions must be bits");
        bids.decisions.push_back(static_cast<std::uint8_t>(d));
    }
    const int n = kv.get_int("n_crs", static_cast<int>(bids.valuations.size()));
    if (n != static_cast<int>(bids.valuations.size()) ||
        bids.valuations.size() != bids.decisions.size())
        throw std::runtime_error("decisions/valuations must both have n_crs entries");

    auction::Scenario sc{
        sensing::ChannelPrior::from_pi0(kv.get_double("pi0", 0.8)),
        sensing::SensorProfile{kv.get_double("pf", 0.1), kv.get_double("pd", 0.9)},
        models_from_kv(kv, n),
        auction::CostModel{kv.get_double("c_p", 0.02), kv.get_double("c_coll", 5.0)},
        0,
        {}};
    sc.k = kv.get_int("k", sensing::optimal_k(sc.prior, sc.sensor, n));
    kv.finish();
    apply_flags(sc.config, opt);
    bids.models = sc.models;

    const auto tb = auction::precompute(sc);
    const auto outcome = auction::run_oausa(bids, sc, tb);

    std::printf("round: N=%d k=%d q0=%.6g q1=%.6g reserve_w=%.6g\n", n, sc.k,
                tb.effective(sc).q0, tb.effective(sc).q1, outcome.reserve_w);
    std::printf("inference: %s\n", outcome.allocated ? "idle (allocated)"
                                                     : "busy or withheld (no allocation)");
    if (!outcome.winners.empty()) {
        std::printf("winners:");
        for (std::size_t i : outcome.winners) std::printf(" %zu", i);
        std::printf("\n");
    }
    if (outcome.t_star) std::printf("t_star: %.12g\n", *outcome.t_star);
    std::printf("%-4s %-12s %-9s %-12s %-12s\n", "cr", "valuation", "decision", "psi",
                "payment");
    for (std::size_t i = 0; i < bids.size(); ++i)
        std::printf("%-4zu %-12.6g %-9d %-12.6g %-12.6g\n", i, bids.valuations[i],
                    static_cast<int>(bids.decisions[i]), outcome.psi[i],
                    outcome.payments[i]);

    std::string csv = "cr,valuation,decision,psi,payment,winner\n";
    for (std::size_t i = 0; i < bids.size(); ++i) {
        char buf[160];
        const bool winner = outcome.psi[i] > 0;
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%d,%.12g,%.12g,%d\n", i,
                      bids.valuations[i], static_cast<int>(bids.decisions[i]),
                      outcome.psi[i], outcome.payments[i], winner ? 1 : 0);
        csv += buf;
    }
    write_file(fs::path(opt.output_dir) / "outcome.csv", csv);
    return 0;
}

// ---- sweep ----

int cmd_sweep(const GlobalOptions& opt) {
    config::KvReader kv(config::parse_kv_file(opt.config_path));
    const bool had_seed = kv.has("seed");
    auto cfg = experiments::SweepConfig::from_kv(kv);
    kv.finish();
    cfg.seed = resolve_seed(opt, had_seed, cfg.seed);
    apply_flags(cfg.auction, opt);

    const auto result = experiments::run_sweep(cfg, exec_policy(opt));

    const std::string stem = std::string(experiments::sweep_param_name(cfg.sweep_param)) +
                             "_sweep";
    const fs::path csv_path = fs::path(opt.output_dir) / (stem + ".csv");
    const fs::path dat_path = fs::path(opt.output_dir) / (stem + ".dat");
    write_file(csv_path, experiments::to_csv(result));
    write_file(dat_path, experiments::to_plot_dat(result));

    std::size_t valid = 0, feasible = 0;
    for (const auto& row : result.rows) {
        valid += row.valid;
        feasible += row.feasible;
    }
    std::printf("sweep %s over [%.6g, %.6g] x %d, %zu trials/point, seed %llu\n",
                experiments::sweep_param_name(cfg.sweep_param), cfg.sweep_lo,
                cfg.sweep_hi, cfg.sweep_steps, cfg.n_trials,
                static_cast<unsigned long long>(cfg.seed));
    std::printf("rows: %zu valid, %zu feasible\n", valid, feasible);
    std::printf("wrote %s and %s\n", csv_path.string().c_str(),
                dat_path.string().c_str());
    return 0;
}

// ---- verify ----

int cmd_verify(const GlobalOptions& opt, const std::string& mechanism_name) {
    config::KvReader kv(config::parse_kv_file(opt.config_path));
    const int n = kv.get_int("n_crs", 3);
    const bool had_seed = kv.has("seed");
    const std::uint64_t cfg_seed = kv.get_u64("seed", 1);
    const int grid_t = kv.get_int("grid_t", 16);
    const int grid_v = kv.get_int("grid_v", 16);
    const std::size_t n_trials = kv.get_u64("n_trials", 100000);

    auction::Scenario sc{
        sensing::ChannelPrior::from_pi0(kv.get_double("pi0", 0.8)),
        sensing::SensorProfile{kv.get_double("pf", 0.1), kv.get_double("pd", 0.9)},
        models_from_kv(kv, n),
        auction::CostModel{kv.get_double("c_p", 0.02), kv.get_double("c_coll", 5.0)},
        0,
        {}};
    sc.k = kv.get_int("k", sensing::optimal_k(sc.prior, sc.sensor, n));
    kv.finish();
    apply_flags(sc.config, opt);

    const std::uint64_t seed = resolve_seed(opt, had_seed, cfg_seed);
    const auto mech = verifier::mechanism_from_name(mechanism_name);
    const auto exec = exec_policy(opt);

    std::printf("verify %s: N=%d grids %dx%d trials %zu seed %llu\n",
                mechanism_name.c_str(), n, grid_t, grid_v, n_trials,
                static_cast<unsigned long long>(seed));

    const auto ic = verifier::check_ic(sc, mech, grid_t, grid_v, n_trials, seed, exec);
    const auto ir = verifier::check_ir(sc, mech, grid_t, n_trials,
                                       derive_seed(seed, 0x17), exec);

    std::size_t ic_violations = 0;
    double worst_gain = 0;
    for (const auto& r : ic) {
        ic_violations += r.violated;
        worst_gain = std::max(worst_gain, r.utility_best_misreport - r.utility_truth);
    }
    std::size_t ir_violations = 0;
    for (const auto& r : ir) ir_violations += r.violated;

    std::printf("incentive compatibility: %zu/%zu violations, worst gain %.3g\n",
                ic_violations, ic.size(), worst_gain);
    std::printf("individual rationality:  %zu/%zu violations\n", ir_violations,
                ir.size());

    bool violated = ic_violations > 0 || ir_violations > 0;

    if (mech == verifier::Mechanism::oausa) {
        const std::vector<sensing::DeviationPolicy> policies{
            {0.0, 0.0}, {0.0, 0.5}, {0.0, 1.0}, {0.5, 0.0},
            {0.5, 0.5}, {0.5, 1.0}, {1.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}};
        const auto sensing_res = verifier::check_sensing_truthfulness(
            sc, policies, n_trials, derive_seed(seed, 0x23), exec);
        double best = 0, best_se = 0;
        for (const auto& r : sensing_res)
            if (r.delta_mean > best) {
                best = r.delta_mean;
                best_se = r.delta_se;
            }
        if (sc.config.fusion_mode == auction::FusionMode::strategy_proof) {
            const bool gain = best > 3.0 * best_se;
            std::printf("sensing truthfulness:    best deviation gain %.3g (%s)\n", best,
                        gain ? "VIOLATED" : "none beyond noise");
            violated = violated || gain;

            const std::vector<double> factors{0.8, 0.9, 1.0, 1.1, 1.2};
            const auto joint = verifier::check_joint_deviation(
                sc, policies, factors, n_trials / 2, derive_seed(seed, 0x29), exec);
            double jbest = 0, jbest_se = 0;
            for (const auto& r : joint)
                if (r.delta_mean > jbest) {
                    jbest = r.delta_mean;
                    jbest_se = r.delta_se;
                }
            const bool jgain = jbest > 3.0 * jbest_se;
            std::printf(
                "joint deviation (beyond-paper check): best gain %.3g (%s)\n", jbest,
                jgain ? "VIOLATED" : "none beyond noise");
            violated = violated || jgain;
        } else {
            std::printf(
                "sensing truthfulness:    best deviation gain %.3g under the standard "
                "gate (expected; use --fusion-mode strategy-proof to remove it)\n",
                best);
        }
    }

    std::string csv =
        "mechanism,check,cr_index,true_value,best_misreport,utility_truth,"
        "utility_best,standard_error,violated\n";
    char buf[256];
    for (const auto& r : ic) {
        std::snprintf(buf, sizeof buf, "%s,ic,%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                      mechanism_name.c_str(), r.cr_index, r.true_value,
                      r.best_misreport, r.utility_truth, r.utility_best_misreport,
                      r.standard_error, r.violated ? 1 : 0);
        csv += buf;
    }
    for (const auto& r : ir) {
        std::snprintf(buf, sizeof buf, "%s,ir,%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                      mechanism_name.c_str(), r.cr_index, r.min_at_value,
                      r.min_at_value, r.min_utility, r.utility_at_a,
                      r.min_utility_se, r.violated ? 1 : 0);
        csv += buf;
    }
    write_file(fs::path(opt.output_dir) / "verify_report.csv", csv);

    std::printf("verdict: %s\n", violated ? "VIOLATIONS FOUND" : "clean");
    return violated ? 1 : 0;
}

// ---- feasibility ----

int cmd_feasibility(const GlobalOptions& opt) {
    config::KvReader kv(config::parse_kv_file(opt.config_path));
    const int n = kv.get_int("n_crs", 10);
    auction::Scenario sc{
        sensing::ChannelPrior::from_pi0(kv.get_double("pi0", 0.8)),
        sensing::SensorProfile{kv.get_double("pf", 0.1), kv.get_double("pd", 0.9)},
        models_from_kv(kv, n),
        auction::CostModel{0, 0},
        0,
        {}};
    sc.k = kv.get_int("k", sensing::optimal_k(sc.prior, sc.sensor, n));
    const double cp_lo = kv.get_double("cp_lo", 0.0);
    const double cp_hi = kv.get_double("cp_hi", 0.1);
    const int cp_steps = kv.get_int("cp_steps", 20);
    const double ccoll_lo = kv.get_double("ccoll_lo", 0.0);
    const double ccoll_hi = kv.get_double("ccoll_hi", 1000.0);
    const int ccoll_steps = kv.get_int("ccoll_steps", 20);
    kv.finish();
    apply_flags(sc.config, opt);

    const auto map = experiments::feasibility_map(sc, cp_lo, cp_hi, cp_steps, ccoll_lo,
                                                  ccoll_hi, ccoll_steps);
    write_file(fs::path(opt.output_dir) / "feasibility.csv",
               experiments::to_csv(map));

    std::size_t feasible = 0;
    for (const auto& cell : map.cells) feasible += cell.feasible;
    std::printf("feasibility map %dx%d: E[w_max]=%.6g q0=%.6g q1=%.6g\n", map.nx,
                map.ny, map.ewmax, map.q0, map.q1);
    std::printf("boundary: N c_p + q1 c_coll = q0 E[w_max] = %.6g\n",
                map.q0 * map.ewmax);
    std::printf("%zu/%zu cells feasible; wrote feasibility.csv\n", feasible,
                map.cells.size());
    return 0;
}

// ---- throughput ----

int cmd_throughput(const GlobalOptions& opt) {
    config::KvReader kv(config::parse_kv_file(opt.config_path));
    const int n = kv.get_int("n_crs", 10);
    const bool had_seed = kv.has("seed");
    const std::uint64_t cfg_seed = kv.get_u64("seed", 1);
    const std::size_t n_trials = kv.get_u64("n_trials", 10000);
    const double c_scale = kv.get_double("c_scale", 1.0);
    auction::Scenario sc{
        sensing::ChannelPrior::from_pi0(kv.get_double("pi0", 0.8)),
        sensing::SensorProfile{kv.get_double("pf", 0.1), kv.get_double("pd", 0.9)},
        models_from_kv(kv, n),
        auction::CostModel{kv.get_double("c_p", 0.02), kv.get_double("c_coll", 5.0)},
        0,
        {}};
    sc.k = kv.get_int("k", sensing::optimal_k(sc.prior, sc.sensor, n));
    kv.finish();
    apply_flags(sc.config, opt);

    const std::uint64_t seed = resolve_seed(opt, had_seed, cfg_seed);
    const auto summary =
        experiments::throughput_experiment(sc, c_scale, n_trials, seed, exec_policy(opt));

    std::printf("throughput: N=%d trials=%zu regular=%d feasible=%d\n", n,
                summary.n_trials, summary.regular, summary.feasible);
    if (summary.regular && summary.feasible) {
        std::printf("bound held on %zu/%zu trials (%s)\n", summary.n_holds,
                    summary.n_trials, summary.all_hold ? "all" : "NOT all");
        std::printf("same radio picked on %zu trials; mean throughput gap %.6g\n",
                    summary.n_equal, summary.mean_gap);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "n_trials,n_holds,n_equal,mean_gap,all_hold,regular,feasible\n"
                  "%zu,%zu,%zu,%.12g,%d,%d,%d\n",
                  summary.n_trials, summary.n_holds, summary.n_equal, summary.mean_gap,
                  summary.all_hold ? 1 : 0, summary.regular ? 1 : 0,
                  summary.feasible ? 1 : 0);
    write_file(fs::path(opt.output_dir) / "throughput.csv", buf);
    return summary.regular && summary.feasible && !summary.all_hold ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal spectrum auction simulator under uncertain availability"};
    app.require_subcommand(1);

    GlobalOptions opt;
    std::string mechanism = "oausa";

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* c = cmd->add_option("--config", opt.config_path, "key=value config file");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        cmd->add_option("--output-dir", opt.output_dir, "artifact directory");
        cmd->add_option("--seed", opt.seed, "seed override (beats config and OAUSA_SEED)");
        cmd->add_option("--threads", opt.threads, "cap OpenMP worker count");
        cmd->add_flag("--serial", opt.serial, "single-threaded execution");
        cmd->add_flag("--no-reserve", opt.no_reserve,
                      "drop the virtual-valuation reserve (literal algorithm)");
        cmd->add_flag("--paper-literal-payments", opt.paper_literal,
                      "critical values without the reserve floor");
        cmd->add_option("--fusion-mode", opt.fusion_mode,
                        "standard or strategy-proof");
    };

    auto* run = app.add_subcommand("run", "run one sealed-bid round from a config");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep to CSV");
    add_common(sweep);
    auto* verify =
        app.add_subcommand("verify", "incentive and rationality verification suite");
    add_common(verify);
    verify->add_option("--mechanism", mechanism,
                       "oausa | oausa-paper-literal | vcg | first-price");
    auto* feas = app.add_subcommand("feasibility", "feasibility verdict grid to CSV");
    add_common(feas);
    auto* thr = app.add_subcommand("throughput", "throughput bound experiment");
    add_common(thr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        apply_threads(opt);
        fs::create_directories(opt.output_dir);
        if (run->parsed()) return cmd_run(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (verify->parsed()) return cmd_verify(opt, mechanism);
        if (feas->parsed()) return cmd_feasibility(opt);
        if (thr->parsed()) return cmd_throughput(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
