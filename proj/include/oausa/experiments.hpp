#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oausa/auction.hpp"
#include "oausa/config.hpp"

namespace oausa::experiments {

using auction::AuctionConfig;
using auction::CostModel;
using auction::Scenario;
using valuation::ValuationModel;

enum class SweepParam { pf, pd, c_p, c_coll };

const char* sweep_param_name(SweepParam p);
SweepParam sweep_param_from_name(const std::string& name);

// "uniform:a:z", "texp:a:z:rate", or "grid:path.csv"
ValuationModel parse_model_spec(const std::string& spec);

struct SweepConfig {
    int n_crs = 10;
    double pi0 = 0.8;
    double pf = 0.1;
    double pd = 0.9;
    double c_p = 0.02;
    double c_coll = 5.0;
    SweepParam sweep_param = SweepParam::pf;
    double sweep_lo = 0.01;
    double sweep_hi = 0.5;
    int sweep_steps = 50;
    std::size_t n_trials = 10000;
    std::uint64_t seed = 1;
    bool run_vcg = true;
    AuctionConfig auction;
    std::vector<ValuationModel> models;  // empty = n_crs x uniform[0,1]

    void validate() const;
    std::vector<ValuationModel> resolved_models() const;

    static SweepConfig from_kv(config::KvReader& kv);
    static SweepConfig from_file(const std::string& path);
};

struct SweepRow {
    double sweep_value = 0;
    int k_opt = 0;  // 0 marks a flagged row (threshold undefined)
    double qf = 0, qd = 0, q0 = 0, q1 = 0;
    double u0_mean = 0, u0_ci95 = 0;
    double u0_vcg = 0;
    double u0_traditional = 0;
    bool feasible = false;
    bool valid = false;

    // diagnostics, not serialized
    double t_closed_form = 0;   // q0 E[w_max] - q1 c_coll - N c_p
    double ewmax = 0;
    double mean_psi_sum = 0;    // allocation mass of the pricing stage
    double u0_vcg_ci95 = 0;
    double diff_mean = 0;       // paired oausa - vcg
    double diff_ci95 = 0;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows;
};

// One Monte-Carlo sweep over the configured parameter; the fusion threshold,
// ROC and joint probabilities are recomputed per point. Degenerate points
// (optimal k undefined) are flagged, not fatal. Deterministic for a fixed
// (config, seed) regardless of execution policy.
SweepResult run_sweep(const SweepConfig& config, mc::Exec exec = mc::Exec::parallel);

// Header exactly:
// sweep_param,sweep_value,k_opt,qf,qd,q0,q1,u0_mean,u0_ci95,u0_vcg,u0_traditional,feasible
// with floats at 12 significant digits, LF line endings.
std::string to_csv(const SweepResult& result);
// same rows, whitespace-separated for gnuplot
std::string to_plot_dat(const SweepResult& result);

struct FeasibilityCell {
    double c_p = 0;
    double c_coll = 0;
    double rhs = 0;  // N c_p / q0 + (q1/q0) c_coll
    bool feasible = false;
};

struct FeasibilityMapResult {
    int nx = 0, ny = 0;
    double ewmax = 0, q0 = 0, q1 = 0;
    std::vector<FeasibilityCell> cells;  // row-major over (c_p, c_coll)
};

// Feasibility verdict over a (c_p, c_coll) grid at fixed sensing quality.
FeasibilityMapResult feasibility_map(const Scenario& base, double cp_lo, double cp_hi,
                                     int nx, double ccoll_lo, double ccoll_hi, int ny);

std::string to_csv(const FeasibilityMapResult& map);

struct ThroughputSummary {
    std::size_t n_trials = 0;
    std::size_t n_holds = 0;   // sandwich bound satisfied
    std::size_t n_equal = 0;   // same radio picked by both mechanisms
    double mean_gap = 0;       // x_vcg - x_oausa
    bool all_hold = false;
    bool regular = false;
    bool feasible = false;
};

// Per-trial throughput-bound accounting under a shared valuation scale.
ThroughputSummary throughput_experiment(const Scenario& sc, double c_scale,
                                        std::size_t n_trials, std::uint64_t seed,
                                        mc::Exec exec = mc::Exec::parallel);

}  // namespace oausa::experiments
