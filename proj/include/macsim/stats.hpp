#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace macsim {

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double p10 = 0.0;
    double p90 = 0.0;
};

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

/// Percentile by linear interpolation between order statistics.
inline double percentile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    if (xs.size() == 1) return xs[0];
    const double rank = p / 100.0 * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

inline SummaryStats summarize(const std::vector<double>& xs) {
    SummaryStats s;
    s.count = xs.size();
    s.mean = mean_of(xs);
    s.stddev = sample_stddev(xs);
    s.p10 = percentile(xs, 10.0);
    s.p90 = percentile(xs, 90.0);
    return s;
}

/// Two-sided 95% Student-t critical value for the given degrees of freedom.
inline double student_t_975(std::size_t df) {
    static const double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df == 0) return table[0];
    if (df <= 30) return table[df - 1];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

/// Half-width of the 95% CI of the mean, relative to |mean|.
/// Returns 0 for degenerate inputs (the stop rule treats that as converged).
inline double relative_ci_margin(const std::vector<double>& replicate_means) {
    const std::size_t k = replicate_means.size();
    if (k < 2) return std::numeric_limits<double>::infinity();
    const double m = mean_of(replicate_means);
    const double s = sample_stddev(replicate_means);
    if (s == 0.0) return 0.0;
    const double half = student_t_975(k - 1) * s / std::sqrt(static_cast<double>(k));
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(half / m);
}

}  // namespace macsim
