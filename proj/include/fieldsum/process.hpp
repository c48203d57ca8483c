#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fieldsum/field.hpp"
#include "fieldsum/region.hpp"
#include "fieldsum/stats.hpp"

namespace fieldsum {

// S_n(A) = sum_i lambda(nA meet R_i) X_i. Only cells with positive weight are
// visited; accumulation is compensated so the result is summation-order
// stable to well below 1e-9 relative.
inline double partial_sum(const Field& field, const Region& region) {
    if (field.dim != region.dim)
        throw std::invalid_argument("partial_sum: field and region dimension mismatch");
    NeumaierSum acc;
    for_each_weighted_cell(region, field.side, [&](std::int64_t flat, double w) {
        acc.add(w * field.values[static_cast<std::size_t>(flat)]);
    });
    return acc.value();
}

// U_n = sqrt(sum of squared field values over the whole lattice)
inline double self_normalizer(const Field& field) {
    NeumaierSum acc;
    for (double x : field.values) acc.add(x * x);
    return std::sqrt(std::max(0.0, acc.value()));
}

// --- norming constants b_n ---------------------------------------------------

// Solves v = n^d E[X^2 1{|X| < sqrt v}] for the largest fixed point (v = b_n^2).
// The map is nondecreasing in v, so iterating downward from an upper starting
// point converges monotonically onto the top fixed point; for laws whose
// truncated second moment is piecewise constant the iteration is exact.
inline double norming_constant_squared(const Law& law, int dim, std::int64_t side) {
    if (!law.iid()) throw std::invalid_argument("norming constant requires an i.i.d. law");
    const double cells = static_cast<double>(lattice_size(dim, side));
    const auto map = [&](double v) { return cells * truncated_second_moment(law, std::sqrt(v)); };
    double v = cells;
    for (int i = 0; i < 200 && map(v) > v; ++i) v *= 4.0;
    if (map(v) > v) throw std::invalid_argument("norming constant: no finite fixed point found");
    for (int i = 0; i < 10000; ++i) {
        const double next = map(v);
        if (!(next > 0.0))
            throw std::invalid_argument("norming constant undefined: truncated variance vanishes");
        if (std::abs(next - v) <= 1e-12 * v) return next;
        v = next;
    }
    throw std::runtime_error("norming constant iteration did not reach tolerance");
}

inline double norming_constant(const Law& law, int dim, std::int64_t side) {
    return std::sqrt(norming_constant_squared(law, dim, side));
}

struct NormingTable {
    Law law;
    int dim = 1;
    std::vector<std::pair<std::int64_t, double>> values;  // (n, b_n)
};

inline NormingTable norming_table(const Law& law, int dim, std::span<const std::int64_t> sides) {
    NormingTable table;
    table.law = law;
    table.dim = dim;
    table.values.reserve(sides.size());
    for (std::int64_t n : sides) table.values.emplace_back(n, norming_constant(law, dim, n));
    return table;
}

// Gamma_n(A) = nA meet {1..n}^d, as sorted flat indices
inline std::vector<std::int64_t> gamma_set(const Region& region, std::int64_t side) {
    return scaled_lattice_points(region, side);
}

// --- self-normalized statistics ----------------------------------------------

struct TStatistics {
    double t1 = 0.0;         // sum over Gamma / sqrt(sum of squares over Gamma)
    double t2_squared = 0.0; // sum of squares over Gamma / sum of squares over the lattice
    bool defined = false;    // false when Gamma is empty or carries only zeros
};

inline TStatistics t_statistics(const Field& field, const Region& region) {
    if (field.dim != region.dim)
        throw std::invalid_argument("t_statistics: field and region dimension mismatch");
    TStatistics stats;
    const auto gamma = gamma_set(region, field.side);
    if (gamma.empty()) return stats;
    NeumaierSum sum_gamma;
    NeumaierSum sq_gamma;
    for (std::int64_t flat : gamma) {
        const double x = field.values[static_cast<std::size_t>(flat)];
        sum_gamma.add(x);
        sq_gamma.add(x * x);
    }
    NeumaierSum sq_all;
    for (double x : field.values) sq_all.add(x * x);
    const double gamma_square = sq_gamma.value();
    if (!(gamma_square > 0.0)) return stats;
    stats.t1 = sum_gamma.value() / std::sqrt(gamma_square);
    stats.t2_squared = gamma_square / sq_all.value();
    stats.defined = true;
    return stats;
}

// --- truncated pieces of the chaining decomposition ---------------------------

enum class Centering { none, mean, conditional_mean };

// Theta_n(A, alpha, beta) = c_n^{-1} sum_i lambda(nA meet R_i)
//                           [X_i 1{band} - centering term].
// `mean` subtracts the exact marginal band mean (i.i.d. laws); `conditional_mean`
// subtracts sigma_i E[eps 1{band scaled}] and is only defined for md fields.
inline double truncated_piece_process(const Field& field, const Region& region,
                                      const TruncationPiece& piece, Centering centering) {
    if (field.dim != region.dim)
        throw std::invalid_argument("truncated_piece_process: dimension mismatch");
    const double lo = piece.lower();
    const double hi = piece.upper();
    double marginal_center = 0.0;
    if (centering == Centering::mean) {
        if (!field.law.iid())
            throw std::invalid_argument("mean centering requires an i.i.d. field");
        marginal_center = band_mean(field.law, lo, hi);
    }
    if (centering == Centering::conditional_mean && field.cond_sigma.empty())
        throw std::invalid_argument("conditional-mean centering requires an md_bounded field");
    NeumaierSum acc;
    for_each_weighted_cell(region, field.side, [&](std::int64_t flat, double w) {
        const auto i = static_cast<std::size_t>(flat);
        double center = marginal_center;
        if (centering == Centering::conditional_mean) {
            const double sigma = field.cond_sigma[i];
            center = sigma * band_mean(*field.law.md_base, lo / sigma, hi / sigma);
        }
        acc.add(w * (piece.apply(field.values[i]) - center));
    });
    return acc.value() / piece.c_n;
}

// --- modulus of continuity -----------------------------------------------------

// sup over pairs with rho(A,B) < delta of |v_A - v_B| on a finite class
inline double modulus(std::span<const Region> classe, std::span<const double> values,
                      double delta) {
    if (classe.size() != values.size())
        throw std::invalid_argument("modulus: one value per region required");
    double sup = 0.0;
    for (std::size_t i = 0; i < classe.size(); ++i)
        for (std::size_t j = i + 1; j < classe.size(); ++j)
            if (rho(classe[i], classe[j]) < delta)
                sup = std::max(sup, std::abs(values[i] - values[j]));
    return sup;
}

// --- packaged evaluations ------------------------------------------------------

enum class Normalization { standard, norming, self };

struct ProcessEvaluation {
    int dim = 1;
    std::int64_t side = 1;
    std::uint64_t seed = 0;
    Normalization normalization = Normalization::standard;
    double scale = 1.0;       // n^{d/2}, b_n, or U_n
    bool degenerate = false;  // self-normalization with U_n = 0
    std::vector<double> raw;
    std::vector<double> normalized;
};

// Evaluate S_n(A) over a region list and normalize. For `norming` the caller
// passes b_n (solved once per (law, d, n), not per field).
inline ProcessEvaluation evaluate_process(const Field& field, std::span<const Region> classe,
                                          Normalization normalization, double norming_b = 0.0) {
    ProcessEvaluation eval;
    eval.dim = field.dim;
    eval.side = field.side;
    eval.seed = field.seed;
    eval.normalization = normalization;
    switch (normalization) {
        case Normalization::standard:
            eval.scale = std::sqrt(static_cast<double>(lattice_size(field.dim, field.side)));
            break;
        case Normalization::norming:
            if (!(norming_b > 0.0))
                throw std::invalid_argument("norming normalization requires b_n > 0");
            eval.scale = norming_b;
            break;
        case Normalization::self:
            eval.scale = self_normalizer(field);
            eval.degenerate = !(eval.scale > 0.0);
            break;
    }
    eval.raw.reserve(classe.size());
    eval.normalized.reserve(classe.size());
    for (const Region& region : classe) {
        const double s = partial_sum(field, region);
        eval.raw.push_back(s);
        eval.normalized.push_back(eval.degenerate
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : s / eval.scale);
    }
    return eval;
}

}  // namespace fieldsum
