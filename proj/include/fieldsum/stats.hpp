#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "fieldsum/law.hpp"

namespace fieldsum {

// Neumaier compensated summation; order-stable to ~1 ulp of the running sum.
struct NeumaierSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            compensation += (sum - t) + x;
        else
            compensation += (x - t) + sum;
        sum = t;
    }

    double value() const noexcept { return sum + compensation; }
};

inline double compensated_total(std::span<const double> xs) {
    NeumaierSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_mean of empty sample");
    return compensated_total(xs) / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance needs >= 2 samples");
    const double m = sample_mean(xs);
    NeumaierSum acc;
    for (double x : xs) acc.add((x - m) * (x - m));
    return acc.value() / static_cast<double>(xs.size() - 1);
}

inline double sample_median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_median of empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// normal-approximation standard error of the sample median
inline double median_standard_error(std::span<const double> xs) {
    return 1.2533141373155003 * std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

struct CovarianceEstimate {
    double value = 0.0;
    double se = 0.0;
};

inline CovarianceEstimate sample_covariance(std::span<const double> xs,
                                            std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("sample_covariance needs paired samples, >= 3");
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    const auto n = static_cast<double>(xs.size());
    NeumaierSum prod;
    for (std::size_t i = 0; i < xs.size(); ++i) prod.add((xs[i] - mx) * (ys[i] - my));
    const double cov = prod.value() / (n - 1.0);
    NeumaierSum sq;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double p = (xs[i] - mx) * (ys[i] - my) - cov;
        sq.add(p * p);
    }
    CovarianceEstimate est;
    est.value = cov;
    est.se = std::sqrt(sq.value() / (n - 1.0)) / std::sqrt(n);
    return est;
}

// one-sample Kolmogorov-Smirnov distance against N(0, variance)
inline double ks_distance_gaussian(std::vector<double> samples, double variance) {
    if (samples.empty()) throw std::invalid_argument("KS distance of empty sample");
    if (!(variance > 0.0)) throw std::invalid_argument("KS target variance must be > 0");
    std::sort(samples.begin(), samples.end());
    const double sigma = std::sqrt(variance);
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = standard_normal_cdf(samples[i] / sigma);
        const double lo = cdf - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - cdf;
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

// P(Binomial(n, q) >= k), exact in log space. The short side of the tail is
// summed: for k at or below the mean the k lower-tail terms are accumulated
// and complemented, otherwise upper-tail terms are added until they vanish.
inline double binomial_upper_tail(std::int64_t n, double q, std::int64_t k) {
    if (n < 1 || !(q >= 0.0) || !(q <= 1.0))
        throw std::invalid_argument("binomial_upper_tail needs n >= 1, q in [0,1]");
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    if (k == 1) return -std::expm1(static_cast<double>(n) * std::log1p(-q));
    const double nd = static_cast<double>(n);
    const double log_q = std::log(q);
    const double log_1mq = std::log1p(-q);
    const auto log_pmf = [&](std::int64_t j) {
        const double jd = static_cast<double>(j);
        return std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) +
               jd * log_q + (nd - jd) * log_1mq;
    };
    if (static_cast<double>(k) <= nd * q) {
        NeumaierSum lower;
        for (std::int64_t j = 0; j < k; ++j) lower.add(std::exp(log_pmf(j)));
        return std::max(0.0, 1.0 - lower.value());
    }
    NeumaierSum upper;
    for (std::int64_t j = k; j <= n; ++j) {
        const double term = std::exp(log_pmf(j));
        upper.add(term);
        if (j > k && term < 1e-18 * std::max(upper.value(), 1e-300)) break;
    }
    return std::min(1.0, upper.value());
}

// --- Orlicz / Luxemburg machinery -------------------------------------------

enum class Young { psi1, psi2 };  // psi1(x) = e^x - 1, psi2(x) = e^{x^2} - 1

inline double young(Young psi, double x) {
    const double arg = psi == Young::psi1 ? x : x * x;
    if (arg > 700.0) return std::numeric_limits<double>::infinity();
    return std::expm1(arg);
}

inline double young_inverse(Young psi, double y) {
    const double l = std::log1p(y);
    return psi == Young::psi1 ? l : std::sqrt(l);
}

// Luxemburg norm ||Z||_psi = inf{ c > 0 : mean psi(|Z_j|/c) <= 1 } of the
// empirical distribution, by monotone bisection. Relative tolerance 1e-8.
inline double luxemburg_norm(std::span<const double> samples, Young psi) {
    if (samples.empty()) throw std::invalid_argument("luxemburg_norm of empty sample");
    double zmax = 0.0;
    for (double z : samples) zmax = std::max(zmax, std::abs(z));
    if (zmax == 0.0) return 0.0;
    const auto mean_psi = [&](double c) {
        NeumaierSum acc;
        for (double z : samples) {
            const double v = young(psi, std::abs(z) / c);
            if (std::isinf(v)) return std::numeric_limits<double>::infinity();
            acc.add(v);
        }
        return acc.value() / static_cast<double>(samples.size());
    };
    double hi = zmax;
    while (mean_psi(hi) > 1.0) hi *= 2.0;
    double lo = hi * 0.5;
    while (mean_psi(lo) <= 1.0) {
        hi = lo;
        lo *= 0.5;
        if (lo < zmax * 1e-12) return hi;  // mean stays <= 1 arbitrarily far down
    }
    while ((hi - lo) > 1e-8 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mean_psi(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace fieldsum
