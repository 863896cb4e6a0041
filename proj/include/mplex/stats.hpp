#pragma once

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace mplex {

struct undefined_correlation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorrelationReport {
    double rho = 0.0;
    double p_value = 1.0;
    double ci_low = -1.0;
    double ci_high = 1.0;
};

/// 1-based ranks with ties replaced by their average rank.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average of ranks i+1..j+1
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

/// Two-sided p-value for Spearman's rho via the t approximation with m-2 dof.
inline double spearman_p_value(double rho, int m) {
    if (m < 4) throw std::invalid_argument("spearman_p_value: need m >= 4");
    if (std::abs(rho) >= 1.0) return 0.0;
    const double t = rho * std::sqrt((m - 2) / (1.0 - rho * rho));
    boost::math::students_t_distribution<double> dist(m - 2);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

/// 95% confidence interval for rho via the Fisher z-transform.
inline std::pair<double, double> fisher_interval(double rho, int m) {
    if (m < 4) throw std::invalid_argument("fisher_interval: need m >= 4");
    if (std::abs(rho) >= 1.0) return {rho, rho};
    boost::math::normal_distribution<double> norm;
    const double q = boost::math::quantile(norm, 0.975);
    const double z = std::atanh(rho);
    const double se = 1.0 / std::sqrt(static_cast<double>(m - 3));
    return {std::tanh(z - q * se), std::tanh(z + q * se)};
}

// Spearman rank correlation: Pearson correlation of average ranks. Throws
// undefined_correlation when either input is constant.
inline CorrelationReport spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    const int m = static_cast<int>(xs.size());
    if (m < 4) throw std::invalid_argument("spearman: need at least 4 observations");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double mean = (m + 1) / 2.0;  // ranks always average to (m+1)/2
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (int i = 0; i < m; ++i) {
        const double a = rx[static_cast<std::size_t>(i)] - mean;
        const double b = ry[static_cast<std::size_t>(i)] - mean;
        num += a * b;
        dx += a * a;
        dy += b * b;
    }
    if (dx == 0.0 || dy == 0.0)
        throw undefined_correlation("spearman: constant input vector");
    const double rho = num / std::sqrt(dx * dy);
    const auto [lo, hi] = fisher_interval(rho, m);
    return {rho, spearman_p_value(rho, m), std::min(lo, rho), std::max(hi, rho)};
}

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample sd; 0 when fewer than 2 values
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Linear-interpolation quantile (R type 7) on a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline Summary summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(values.begin(), values.end());
    return {mean,
            sd,
            values.front(),
            quantile_sorted(values, 0.25),
            quantile_sorted(values, 0.5),
            quantile_sorted(values, 0.75),
            values.back()};
}

}  // namespace mplex
