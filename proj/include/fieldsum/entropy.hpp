#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fieldsum/region.hpp"

namespace fieldsum {

enum class ProfileSource { greedy_empirical, analytic_bound };

// log covering numbers sampled on a decreasing epsilon grid
struct EntropyProfile {
    std::vector<double> eps;    // strictly decreasing, in (0,1]
    std::vector<double> log_n;  // nondecreasing along the grid (monotone envelope)
    ProfileSource source = ProfileSource::greedy_empirical;
};

inline std::vector<std::vector<double>> pairwise_rho(std::span<const Region> classe) {
    const std::size_t n = classe.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = rho(classe[i], classe[j]);
    return dist;
}

// Greedy covering with open rho-balls of radius eps: repeatedly add the
// center covering the most still-uncovered elements (lowest index on ties).
// Within an O(log |class|) factor of the minimal covering; deterministic
// given the input order.
inline int greedy_cover_count(const std::vector<std::vector<double>>& dist, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("covering radius must be > 0");
    const std::size_t n = dist.size();
    if (n == 0) return 0;
    std::vector<char> covered(n, 0);
    std::size_t remaining = n;
    int centers = 0;
    while (remaining > 0) {
        std::size_t best = 0;
        std::size_t best_gain = 0;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t gain = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (!covered[j] && dist[c][j] < eps) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        if (best_gain == 0)
            throw std::logic_error("greedy cover stalled; is eps positive?");  // unreachable: dist[j][j]=0 < eps
        for (std::size_t j = 0; j < n; ++j)
            if (!covered[j] && dist[best][j] < eps) {
                covered[j] = 1;
                --remaining;
            }
        ++centers;
    }
    return centers;
}

inline int greedy_cover(std::span<const Region> classe, double eps) {
    return greedy_cover_count(pairwise_rho(classe), eps);
}

inline EntropyProfile greedy_profile(std::span<const Region> classe,
                                     std::vector<double> eps_grid) {
    if (eps_grid.empty()) throw std::invalid_argument("entropy profile needs an epsilon grid");
    for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i + 1]))
            throw std::invalid_argument("epsilon grid must be strictly decreasing");
    if (!(eps_grid.front() <= 1.0 && eps_grid.back() > 0.0))
        throw std::invalid_argument("epsilon grid must lie in (0,1]");
    const auto dist = pairwise_rho(classe);
    EntropyProfile profile;
    profile.eps = std::move(eps_grid);
    profile.source = ProfileSource::greedy_empirical;
    profile.log_n.reserve(profile.eps.size());
    for (double eps : profile.eps)
        profile.log_n.push_back(std::log(std::max(1.0, static_cast<double>(
                                                            greedy_cover_count(dist, eps)))));
    // monotone envelope: covering numbers cannot shrink as eps decreases
    for (std::size_t i = 1; i < profile.log_n.size(); ++i)
        profile.log_n[i] = std::max(profile.log_n[i], profile.log_n[i - 1]);
    return profile;
}

struct EntropyIntegral {
    double value = 0.0;
    double eps_min = 0.0;          // smallest epsilon covered by the quadrature
    bool extended_to_zero = false; // true when a constant tail was continued to 0
};

// Trapezoidal quadrature of sqrt(log N) over the profile grid. The integral
// is continued below eps_min only when the profile is constant there;
// otherwise the partial integral on [eps_min, eps_max] is reported.
inline EntropyIntegral entropy_integral(const EntropyProfile& profile) {
    if (profile.eps.empty()) throw std::invalid_argument("entropy_integral of empty profile");
    EntropyIntegral out;
    out.eps_min = profile.eps.back();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < profile.eps.size(); ++i) {
        const double width = profile.eps[i] - profile.eps[i + 1];
        acc += 0.5 * width * (std::sqrt(profile.log_n[i]) + std::sqrt(profile.log_n[i + 1]));
    }
    const std::size_t last = profile.log_n.size() - 1;
    const bool constant_tail = profile.log_n.size() >= 2 &&
                               profile.log_n[last] == profile.log_n[last - 1];
    if (profile.log_n.size() == 1 || constant_tail) {
        acc += std::sqrt(profile.log_n[last]) * profile.eps.back();
        out.extended_to_zero = true;
    }
    out.value = acc;
    return out;
}

// Standard bracketing-entropy bound for the quadrant class: gridding the
// corner to mesh eps^2/d yields at most (d/eps^2)^d brackets.
inline double quadrant_bracket_entropy_bound(int dim, double eps) {
    if (dim < 1 || !(eps > 0.0)) throw std::invalid_argument("bad quadrant entropy arguments");
    return dim * std::log(std::max(1.0, static_cast<double>(dim) / (eps * eps)));
}

inline EntropyProfile quadrant_analytic_profile(int dim, std::vector<double> eps_grid) {
    EntropyProfile profile;
    profile.eps = std::move(eps_grid);
    profile.source = ProfileSource::analytic_bound;
    profile.log_n.reserve(profile.eps.size());
    for (double eps : profile.eps) profile.log_n.push_back(quadrant_bracket_entropy_bound(dim, eps));
    return profile;
}

// --- counter-example entropy arithmetic --------------------------------------
// Evaluated in floating point / log space directly (never through the exact
// integer scales), so arbitrary stages r are representable.

namespace detail {

inline void validate_ce(int p, int d, int r) {
    if (p < 1 || d < 1 || r < 1)
        throw std::invalid_argument("counterexample entropy arithmetic requires p, d, r >= 1");
}

inline double ce_log_side(int p, int r) {  // log n_r, n_r = 4^{rp}
    return 2.0 * r * p * std::log(2.0);
}

inline double ce_cell_count(int p, int d, int r) {  // k_r = max(1, 2^{rd(p-1)-1})
    const double e = static_cast<double>(r) * d * (p - 1) - 1.0;
    return e < 0.0 ? 1.0 : std::exp2(e);
}

inline double ce_radius(int p, int d, int r) {  // eps_r = 2^{-rd(p+1)/2}
    return std::exp2(-0.5 * static_cast<double>(r) * d * (p + 1));
}

}  // namespace detail

struct CounterexampleEntropyBound {
    double exact_log_count = 0.0;  // log(1 + 2 r n_r^{d k_r}), evaluated in log space
    double simplified = 0.0;       // 3 d k_r log n_r
};

inline CounterexampleEntropyBound counterexample_entropy_bound(int p, int d, int r) {
    detail::validate_ce(p, d, r);
    const double y = static_cast<double>(d) * detail::ce_cell_count(p, d, r) *
                     detail::ce_log_side(p, r);
    const double t = std::log(2.0 * r) + y;  // log(2 r n^{dk})
    CounterexampleEntropyBound bound;
    bound.exact_log_count = t + std::log1p(std::exp(-t));
    bound.simplified = 3.0 * y;
    return bound;
}

// Partial sums of sum_{r=2}^{R} eps_{r-1} sqrt(3 d k_r log n_r), together
// with the geometric majorant K sqrt(r) / 2^{rd} that certifies convergence.
struct CounterexampleSeries {
    std::vector<int> r;  // 2..R
    std::vector<double> terms;
    std::vector<double> partial_sums;
    std::vector<double> majorant_terms;
    double majorant_constant = 0.0;
};

inline double counterexample_series_term(int p, int d, int r) {
    detail::validate_ce(p, d, r);
    return detail::ce_radius(p, d, r - 1) *
           std::sqrt(3.0 * d * detail::ce_cell_count(p, d, r) * detail::ce_log_side(p, r));
}

inline CounterexampleSeries counterexample_series(int p, int d, int r_max) {
    if (r_max < 2) throw std::invalid_argument("counterexample_series needs R >= 2");
    CounterexampleSeries series;
    series.majorant_constant =
        std::exp2(0.5 * d * (p + 1)) * std::sqrt(3.0 * d * p * std::log(4.0));
    double acc = 0.0;
    for (int r = 2; r <= r_max; ++r) {
        const double term = counterexample_series_term(p, d, r);
        acc += term;
        series.r.push_back(r);
        series.terms.push_back(term);
        series.partial_sums.push_back(acc);
        series.majorant_terms.push_back(series.majorant_constant * std::sqrt(static_cast<double>(r)) *
                                        std::exp2(-static_cast<double>(r) * d));
    }
    return series;
}

}  // namespace fieldsum
