#include "oausa/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oausa::valuation {

namespace {

void require_support(double t, double a, double z) {
    if (!(t >= a && t <= z))
        throw std::domain_error("valuation outside support [a, z]");
}

}  // namespace

ValuationModel ValuationModel::uniform(double a, double z) {
    if (!(a < z)) throw std::invalid_argument("uniform: require a < z");
    ValuationModel m;
    m.family_ = Family::uniform;
    m.a_ = a;
    m.z_ = z;
    return m;
}

ValuationModel ValuationModel::truncated_exponential(double a, double z, double rate) {
    if (!(a < z)) throw std::invalid_argument("truncated_exponential: require a < z");
    if (!(rate > 0)) throw std::invalid_argument("truncated_exponential: require rate > 0");
    ValuationModel m;
    m.family_ = Family::truncated_exponential;
    m.a_ = a;
    m.z_ = z;
    m.rate_ = rate;
    return m;
}

ValuationModel ValuationModel::empirical_grid(std::vector<double> knots,
                                              std::vector<double> densities) {
    if (knots.size() < 2 || knots.size() != densities.size())
        throw std::invalid_argument("empirical_grid: need matching (t, pdf) columns, >= 2 rows");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("empirical_grid: knots must be strictly increasing");
    for (double d : densities)
        if (!(d >= 0)) throw std::invalid_argument("empirical_grid: negative density");

    const std::size_t segs = knots.size() - 1;
    std::vector<double> seg(segs);
    double mass = 0;
    for (std::size_t s = 0; s < segs; ++s) {
        seg[s] = 0.5 * (densities[s] + densities[s + 1]);
        mass += seg[s] * (knots[s + 1] - knots[s]);
    }
    if (!(mass > 0)) throw std::invalid_argument("empirical_grid: zero total mass");
    std::vector<double> cum(knots.size());
    cum[0] = 0;
    for (std::size_t s = 0; s < segs; ++s) {
        seg[s] /= mass;
        if (!(seg[s] > 0))
            throw std::invalid_argument("empirical_grid: density must be positive on (a, z)");
        cum[s + 1] = cum[s] + seg[s] * (knots[s + 1] - knots[s]);
    }
    cum.back() = 1.0;  // pin against rounding

    ValuationModel m;
    m.family_ = Family::empirical_grid;
    m.a_ = knots.front();
    m.z_ = knots.back();
    m.knots_ = std::move(knots);
    m.seg_density_ = std::move(seg);
    m.cum_ = std::move(cum);
    return m;
}

ValuationModel ValuationModel::empirical_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("empirical_from_csv: cannot open " + path);
    std::vector<double> t, d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double ti, di;
        if (!(row >> ti >> di))
            throw std::runtime_error("empirical_from_csv: bad row at line " +
                                     std::to_string(lineno));
        t.push_back(ti);
        d.push_back(di);
    }
    return empirical_grid(std::move(t), std::move(d));
}

double ValuationModel::pdf(double t) const {
    require_support(t, a_, z_);
    switch (family_) {
        case Family::uniform:
            return 1.0 / (z_ - a_);
        case Family::truncated_exponential:
            return rate_ * std::exp(-rate_ * (t - a_)) /
                   (-std::expm1(-rate_ * (z_ - a_)));
        case Family::empirical_grid: {
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
            std::size_t s = static_cast<std::size_t>(it - knots_.begin());
            s = s == 0 ? 0 : s - 1;
            if (s >= seg_density_.size()) s = seg_density_.size() - 1;  // t == z
            return seg_density_[s];
        }
    }
    return 0;
}

double ValuationModel::cdf(double t) const {
    require_support(t, a_, z_);
    switch (family_) {
        case Family::uniform:
            return (t - a_) / (z_ - a_);
        case Family::truncated_exponential:
            return std::expm1(-rate_ * (t - a_)) / std::expm1(-rate_ * (z_ - a_));
        case Family::empirical_grid: {
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
            std::size_t s = static_cast<std::size_t>(it - knots_.begin());
            s = s == 0 ? 0 : s - 1;
            if (s >= seg_density_.size()) return 1.0;  // t == z
            return cum_[s] + seg_density_[s] * (t - knots_[s]);
        }
    }
    return 0;
}

double ValuationModel::virtual_valuation(double t) const {
    const double p = pdf(t);
    if (!(p > 0)) throw std::domain_error("virtual valuation undefined: zero density");
    return t - (1.0 - cdf(t)) / p;
}

double ValuationModel::sample(Rng& rng) const {
    const double u = rng.uniform();
    switch (family_) {
        case Family::uniform:
            return a_ + u * (z_ - a_);
        case Family::truncated_exponential:
            // invert F: t = a - log(1 + u*(e^{-rate*(z-a)} - 1)) / rate
            return a_ - std::log1p(u * std::expm1(-rate_ * (z_ - a_))) / rate_;
        case Family::empirical_grid: {
            auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            std::size_t s = static_cast<std::size_t>(it - cum_.begin());
            s = s == 0 ? 0 : s - 1;
            if (s >= seg_density_.size()) s = seg_density_.size() - 1;
            return knots_[s] + (u - cum_[s]) / seg_density_[s];
        }
    }
    return a_;
}

bool is_uniform01(const ValuationModel& m) {
    return m.family() == Family::uniform && m.a() == 0.0 && m.z() == 1.0;
}

bool all_uniform01(std::span<const ValuationModel> models) {
    return std::all_of(models.begin(), models.end(),
                       [](const ValuationModel& m) { return is_uniform01(m); });
}

InverseVirtual inverse_virtual(const ValuationModel& model, double w_target) {
    const double wa = model.virtual_valuation(model.a());
    const double wz = model.virtual_valuation(model.z());
    if (w_target <= wa) return {model.a(), w_target < wa};
    if (w_target >= wz) return {model.z(), w_target > wz};
    double lo = model.a(), hi = model.z();
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double w = model.virtual_valuation(mid);
        if (std::abs(w - w_target) <= 1e-10) return {mid, false};
        (w < w_target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
    }
    return {0.5 * (lo + hi), false};
}

bool regularity_check(const ValuationModel& model, int grid_size) {
    if (grid_size < 16) throw std::invalid_argument("regularity_check: grid_size >= 16");
    const double a = model.a(), z = model.z();
    double prev = model.virtual_valuation(a);
    for (int i = 1; i < grid_size; ++i) {
        const double t = a + (z - a) * i / (grid_size - 1);
        const double w = model.virtual_valuation(t);
        if (!(w > prev)) return false;
        prev = w;
    }
    return true;
}

ThroughputParams::ThroughputParams(double c_, double snr_) : c(c_), snr(snr_) {
    if (!(c > 0)) throw std::invalid_argument("ThroughputParams: require c > 0");
    if (!(snr >= 0)) throw std::invalid_argument("ThroughputParams: require snr >= 0");
}

double throughput_valuation(const ThroughputParams& params) {
    return params.c * std::log1p(params.snr);
}

}  // namespace oausa::valuation
