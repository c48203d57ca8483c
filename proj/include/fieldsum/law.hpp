#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "fieldsum/rng.hpp"

namespace fieldsum {

// Marginal laws of the field. All supported marginals are symmetric about 0.
enum class LawKind { gaussian, rademacher, pareto_tail, counterexample_integer, md_bounded };

struct Law {
    LawKind kind = LawKind::gaussian;
    double sigma2 = 1.0;      // gaussian variance
    double tail_alpha = 2.0;  // pareto_tail exponent, P(|X|>x) = min(1, x^-alpha)
    int tail_p = 1;           // counterexample integer law, P(|X|>=k) = k^-(p+1)
    double md_amplitude = 0.0;
    int md_window = 1;
    std::shared_ptr<const Law> md_base;  // innovation law of the martingale-difference field

    bool iid() const noexcept { return kind != LawKind::md_bounded; }
};

namespace laws {

inline Law gaussian(double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian law requires sigma2 > 0");
    Law law;
    law.kind = LawKind::gaussian;
    law.sigma2 = sigma2;
    return law;
}

inline Law rademacher() {
    Law law;
    law.kind = LawKind::rademacher;
    return law;
}

inline Law pareto_tail(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("pareto_tail law requires alpha > 0");
    Law law;
    law.kind = LawKind::pareto_tail;
    law.tail_alpha = alpha;
    return law;
}

inline Law counterexample_integer(int p) {
    if (p < 1) throw std::invalid_argument("counterexample_integer law requires integer p >= 1");
    Law law;
    law.kind = LawKind::counterexample_integer;
    law.tail_p = p;
    return law;
}

// base must be a zero-mean, unit-variance i.i.d. innovation: gaussian(1) or rademacher
inline Law md_bounded(const Law& base, double amplitude, int window) {
    if (!(amplitude >= 0.0 && amplitude < 1.0))
        throw std::invalid_argument("md_bounded requires modulation amplitude a in [0,1)");
    if (window < 1) throw std::invalid_argument("md_bounded requires window radius w >= 1");
    const bool unit_gaussian = base.kind == LawKind::gaussian && base.sigma2 == 1.0;
    const bool sign_law = base.kind == LawKind::rademacher;
    if (!unit_gaussian && !sign_law)
        throw std::invalid_argument(
            "md_bounded base innovation must be gaussian(1) or rademacher");
    Law law;
    law.kind = LawKind::md_bounded;
    law.md_amplitude = amplitude;
    law.md_window = window;
    law.md_base = std::make_shared<const Law>(base);
    return law;
}

}  // namespace laws

// P(|X| >= k) for the integer counterexample law
inline double integer_law_tail(int p, std::int64_t k) {
    if (k <= 1) return 1.0;
    return std::pow(static_cast<double>(k), -static_cast<double>(p + 1));
}

// one draw from an i.i.d. marginal, consuming from the given stream
inline double draw(const Law& law, CounterRng& rng) {
    switch (law.kind) {
        case LawKind::gaussian:
            return std::sqrt(law.sigma2) * rng.next_gaussian();
        case LawKind::rademacher:
            return rng.next_sign();
        case LawKind::pareto_tail: {
            const double magnitude = std::pow(rng.next_unit(), -1.0 / law.tail_alpha);
            return rng.next_sign() * magnitude;
        }
        case LawKind::counterexample_integer: {
            // inverse CDF on the integer tail: |X| = floor(U^{-1/(p+1)})
            const double u = rng.next_unit();
            const double magnitude =
                std::floor(std::pow(u, -1.0 / static_cast<double>(law.tail_p + 1)));
            return rng.next_sign() * magnitude;
        }
        case LawKind::md_bounded:
            throw std::invalid_argument("md_bounded has no i.i.d. marginal draw; use sample_md_field");
    }
    throw std::logic_error("unreachable law kind");
}

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

inline double standard_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.39894228040143267793994605993438;
}

// E[X^2 1{|X| < t}], exact per law (closed form or finite sum)
inline double truncated_second_moment(const Law& law, double t) {
    if (!(t > 0.0)) return 0.0;
    switch (law.kind) {
        case LawKind::gaussian: {
            const double sigma = std::sqrt(law.sigma2);
            const double z = t / sigma;
            return law.sigma2 *
                   (2.0 * standard_normal_cdf(z) - 1.0 - 2.0 * z * standard_normal_pdf(z));
        }
        case LawKind::rademacher:
            return t > 1.0 ? 1.0 : 0.0;
        case LawKind::pareto_tail: {
            if (t <= 1.0) return 0.0;
            const double a = law.tail_alpha;
            // density a*x^{-a-1} on |x| >= 1
            if (a == 2.0) return 2.0 * std::log(t);
            return a * (std::pow(t, 2.0 - a) - 1.0) / (2.0 - a);
        }
        case LawKind::counterexample_integer: {
            const auto kmax = static_cast<std::int64_t>(std::ceil(t)) - 1;  // strict |X| < t
            if (kmax > 50'000'000)
                throw std::invalid_argument("counterexample truncated moment: threshold too large");
            double sum = 0.0;
            for (std::int64_t k = 1; k <= kmax; ++k) {
                const double pmf = integer_law_tail(law.tail_p, k) - integer_law_tail(law.tail_p, k + 1);
                sum += static_cast<double>(k) * static_cast<double>(k) * pmf;
            }
            return sum;
        }
        case LawKind::md_bounded:
            throw std::invalid_argument("truncated_second_moment requires an i.i.d. law");
    }
    throw std::logic_error("unreachable law kind");
}

// E[X 1{lo <= |X| < hi}]. Every supported marginal is symmetric about zero,
// so the band mean vanishes identically; the arguments are validated anyway.
inline double band_mean(const Law& law, double lo, double hi) {
    if (!(lo >= 0.0) || !(hi >= lo)) throw std::invalid_argument("band_mean: need 0 <= lo <= hi");
    (void)law;
    return 0.0;
}

// E[X^2]; nullopt when infinite (pareto alpha <= 2, counterexample p <= 1)
// or with no closed form (md_bounded)
inline std::optional<double> second_moment(const Law& law) {
    switch (law.kind) {
        case LawKind::gaussian:
            return law.sigma2;
        case LawKind::rademacher:
            return 1.0;
        case LawKind::pareto_tail:
            if (law.tail_alpha <= 2.0) return std::nullopt;
            return law.tail_alpha / (law.tail_alpha - 2.0);
        case LawKind::counterexample_integer: {
            if (law.tail_p <= 1) return std::nullopt;
            // sum k^2 pmf(k) by Abel summation: 2*zeta(p) - zeta(p+1)
            const double p = static_cast<double>(law.tail_p);
            return 2.0 * std::riemann_zeta(p) - std::riemann_zeta(p + 1.0);
        }
        case LawKind::md_bounded:
            return std::nullopt;
    }
    throw std::logic_error("unreachable law kind");
}

// P(|X| > x) for i.i.d. laws
inline double upper_tail(const Law& law, double x) {
    if (x < 0.0) return 1.0;
    switch (law.kind) {
        case LawKind::gaussian:
            return 2.0 * (1.0 - standard_normal_cdf(x / std::sqrt(law.sigma2)));
        case LawKind::rademacher:
            return x < 1.0 ? 1.0 : 0.0;
        case LawKind::pareto_tail:
            return std::min(1.0, std::pow(x, -law.tail_alpha));
        case LawKind::counterexample_integer:
            return integer_law_tail(law.tail_p, static_cast<std::int64_t>(std::floor(x)) + 1);
        case LawKind::md_bounded:
            throw std::invalid_argument("upper_tail requires an i.i.d. law");
    }
    throw std::logic_error("unreachable law kind");
}

}  // namespace fieldsum
