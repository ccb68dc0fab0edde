#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace finder {

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are discarded, tied magnitudes receive average ranks. Up to 25 nonzero
/// differences the p-value is exact (full enumeration of the sign
/// distribution); beyond that the normal approximation with tie correction
/// and continuity correction is used. All differences zero yields p = 1 by
/// convention.
inline double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: samples must be paired");
    std::vector<double> diffs;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const size_t n = diffs.size();
    if (n == 0) return 1.0;

    // Average ranks of |d|, doubled so they stay integral under ties.
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t x, size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    std::vector<long long> rank2(n, 0);
    std::vector<long long> tie_sizes;
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n && std::abs(diffs[idx[j]]) == std::abs(diffs[idx[i]])) ++j;
        long long avg2 = static_cast<long long>(i + 1 + j);  // 2 * average of ranks i+1..j
        for (size_t t = i; t < j; ++t) rank2[idx[t]] = avg2;
        tie_sizes.push_back(static_cast<long long>(j - i));
        i = j;
    }

    long long w_plus2 = 0, total2 = 0;
    for (size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (diffs[i] > 0.0) w_plus2 += rank2[i];
    }

    if (n <= 25) {
        // Exact null distribution of 2*W+ by subset-sum counting. The
        // distribution is symmetric about total2/2, so doubling the small
        // tail gives the two-sided p.
        std::vector<double> count(static_cast<size_t>(total2) + 1, 0.0);
        count[0] = 1.0;
        for (size_t i = 0; i < n; ++i) {
            long long r = rank2[i];
            for (long long s = total2; s >= r; --s) count[s] += count[s - r];
        }
        long long w_small2 = std::min(w_plus2, total2 - w_plus2);
        double tail = 0.0;
        for (long long s = 0; s <= w_small2; ++s) tail += count[s];
        double p = 2.0 * tail / std::ldexp(1.0, static_cast<int>(n));
        return std::min(1.0, p);
    }

    // Normal approximation. mean(W+) = n(n+1)/4; the tie correction removes
    // sum(t^3 - t)/48 from the variance.
    double nn = static_cast<double>(n);
    double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (long long t : tie_sizes) var -= static_cast<double>(t * t * t - t) / 48.0;
    if (var <= 0.0) return 1.0;
    double w_plus = static_cast<double>(w_plus2) / 2.0;
    double delta = std::abs(w_plus - mean);
    double z = (delta - 0.5) / std::sqrt(var);  // continuity correction
    if (z < 0.0) z = 0.0;
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace finder
