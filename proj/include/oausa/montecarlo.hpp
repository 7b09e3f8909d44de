#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oausa::mc {

enum class Exec { serial, parallel };

// Number of accumulation blocks used by blocked reductions. Fixed (instead of
// one block per thread) so that sums are added in the same order no matter how
// many OpenMP threads run, keeping results bitwise reproducible.
inline constexpr std::size_t kBlocks = 256;

// Runs fn(trial) for every trial in [0, n). Each trial must derive its own RNG
// stream from the trial index; the two policies then produce identical values.
template <class Fn>
void for_each_trial(std::size_t n, Exec exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
        const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < nn; ++i) fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Blocked accumulation: trials are partitioned into kBlocks contiguous blocks,
// blocks run in parallel with their own scratch and accumulator row, and rows
// are merged serially in block order.
//
// fn(trial, scratch, acc_row) adds the trial's contribution into acc_row
// (a span of width doubles). Returns the merged row.
template <class Scratch, class Fn>
std::vector<double> blocked_accumulate(std::size_t n_trials, std::size_t width,
                                       Exec exec, Fn&& fn) {
    const std::size_t n_blocks = n_trials < kBlocks ? (n_trials ? n_trials : 1) : kBlocks;
    std::vector<double> block_acc(n_blocks * width, 0.0);

    auto run_block = [&](std::size_t b) {
        Scratch scratch;
        std::span<double> row(block_acc.data() + b * width, width);
        const std::size_t lo = n_trials * b / n_blocks;
        const std::size_t hi = n_trials * (b + 1) / n_blocks;
        for (std::size_t t = lo; t < hi; ++t) fn(t, scratch, row);
    };

#ifdef _OPENMP
    if (exec == Exec::parallel) {
        const long long nb = static_cast<long long>(n_blocks);
#pragma omp parallel for schedule(dynamic)
        for (long long b = 0; b < nb; ++b) run_block(static_cast<std::size_t>(b));
    } else
#endif
    {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    }

    std::vector<double> out(width, 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t j = 0; j < width; ++j) out[j] += block_acc[b * width + j];
    return out;
}

struct Summary {
    double mean = 0;
    double sd = 0;
    double se = 0;
    double ci95 = 0;
    std::size_t n = 0;
};

// Summary from accumulated (sum, sum of squares, n).
inline Summary summarize_moments(double sum, double sum_sq, std::size_t n) {
    Summary s;
    s.n = n;
    if (n == 0) return s;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double var = (sum_sq - sum * s.mean) / static_cast<double>(n - 1);
        if (var < 0) var = 0;  // rounding guard
        s.sd = std::sqrt(var);
        s.se = s.sd / std::sqrt(static_cast<double>(n));
        s.ci95 = 1.959963984540054 * s.se;
    }
    return s;
}

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double slope_se = 0;
};

// Ordinary least squares fit with slope standard error from residuals.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    LineFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    if (n > 2) f.slope_se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    return f;
}

}  // namespace oausa::mc
