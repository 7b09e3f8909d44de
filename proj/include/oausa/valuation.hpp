#pragma once

#include <span>
#include <string>
#include <vector>

#include "oausa/rng.hpp"

namespace oausa::valuation {

enum class Family { uniform, truncated_exponential, empirical_grid };

// A bidder's valuation distribution on [a, z]: density, cdf, Myerson virtual
// valuation w(t) = t - (1 - F(t)) / p(t), and inverse-cdf sampling.
//
// Three families are provided. uniform and truncated_exponential have closed
// forms; empirical_grid carries a piecewise-constant density (piecewise-linear
// cdf) built from (t, pdf) samples and is the vehicle for irregular cases.
class ValuationModel {
public:
    static ValuationModel uniform(double a, double z);
    static ValuationModel truncated_exponential(double a, double z, double rate);
    // knots strictly increasing, densities >= 0 sampled at the knots; the
    // per-segment density is the midpoint average, normalized to unit mass.
    static ValuationModel empirical_grid(std::vector<double> knots,
                                         std::vector<double> densities);
    // two-column CSV "t,pdf"; '#' comments and blank lines ignored.
    static ValuationModel empirical_from_csv(const std::string& path);

    Family family() const { return family_; }
    double a() const { return a_; }
    double z() const { return z_; }
    double rate() const { return rate_; }

    double pdf(double t) const;  // throws outside [a, z]
    double cdf(double t) const;
    double virtual_valuation(double t) const;  // throws where pdf(t) == 0
    double sample(Rng& rng) const;             // consumes exactly one uniform

private:
    ValuationModel() = default;

    Family family_ = Family::uniform;
    double a_ = 0, z_ = 1, rate_ = 0;
    // empirical grid: segment s covers [knots_[s], knots_[s+1])
    std::vector<double> knots_;
    std::vector<double> seg_density_;
    std::vector<double> cum_;  // cdf at knots
};

bool is_uniform01(const ValuationModel& m);
bool all_uniform01(std::span<const ValuationModel> models);

struct InverseVirtual {
    double t;
    bool clamped;  // w_target fell outside [w(a), w(z)]
};

// Inverts the virtual valuation by bisection; requires a regular model.
// Out-of-range targets clamp to the matching support endpoint.
InverseVirtual inverse_virtual(const ValuationModel& model, double w_target);

// True iff w is strictly increasing across a uniform grid on [a, z].
bool regularity_check(const ValuationModel& model, int grid_size = 1024);

struct ThroughputParams {
    double c;
    double snr;

    ThroughputParams(double c_, double snr_);
};

// t = c * log(1 + snr), natural logarithm.
double throughput_valuation(const ThroughputParams& params);

}  // namespace oausa::valuation
