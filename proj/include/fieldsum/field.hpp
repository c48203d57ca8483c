#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fieldsum/lattice.hpp"
#include "fieldsum/law.hpp"
#include "fieldsum/rng.hpp"

namespace fieldsum {

// Realized field on {1..n}^d, values stored in lexicographic order.
// Regeneration from (law, dim, side, seed) is bit-identical.
struct Field {
    int dim = 1;
    std::int64_t side = 1;
    std::uint64_t seed = 0;
    Law law;
    std::vector<double> values;
    std::vector<double> cond_sigma;  // md fields: realized conditional std dev per site

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(values.size()); }
};

namespace detail {
constexpr std::int64_t kMaxFieldCells = std::int64_t{1} << 28;

inline std::int64_t validated_cells(int dim, std::int64_t side) {
    const std::int64_t cells = lattice_size(dim, side);
    if (cells > kMaxFieldCells)
        throw std::invalid_argument("field of " + std::to_string(cells) +
                                    " cells exceeds the per-field limit");
    return cells;
}
}  // namespace detail

inline Field sample_iid_field(const Law& law, int dim, std::int64_t side, std::uint64_t seed) {
    if (!law.iid())
        throw std::invalid_argument("sample_iid_field rejects md_bounded laws; use sample_md_field");
    const std::int64_t cells = detail::validated_cells(dim, side);
    Field field;
    field.dim = dim;
    field.side = side;
    field.seed = seed;
    field.law = law;
    field.values.resize(static_cast<std::size_t>(cells));
    for (std::int64_t flat = 0; flat < cells; ++flat) {
        CounterRng rng(seed, static_cast<std::uint64_t>(flat));
        field.values[static_cast<std::size_t>(flat)] = draw(law, rng);
    }
    return field;
}

namespace detail {
// offsets o in [-w,w]^d \ {0} whose first nonzero coordinate is negative,
// i.e. i+o <_lex i
inline std::vector<std::vector<std::int64_t>> lex_predecessor_offsets(int dim, int window) {
    std::vector<std::vector<std::int64_t>> offsets;
    std::vector<std::int64_t> lo(static_cast<std::size_t>(dim), -window);
    std::vector<std::int64_t> hi(static_cast<std::size_t>(dim), window);
    std::vector<std::int64_t> off = lo;
    do {
        int first_nonzero = 0;
        for (std::size_t j = 0; j < off.size(); ++j) {
            if (off[j] != 0) {
                first_nonzero = off[j] < 0 ? -1 : 1;
                break;
            }
        }
        if (first_nonzero < 0) offsets.push_back(off);
    } while (next_index(off, lo, hi));
    return offsets;
}
}  // namespace detail

// Martingale-difference field: sweeping in lexicographic order,
// X_i = sigma_i * eps_i with a fresh innovation eps_i and
// sigma_i = 1 + a*tanh(mean of already-generated values in the window).
// E(X_i | lex past) = 0 exactly and sigma_i^2 <= (1+a)^2 everywhere.
inline Field sample_md_field(const Law& law, int dim, std::int64_t side, std::uint64_t seed) {
    if (law.kind != LawKind::md_bounded)
        throw std::invalid_argument("sample_md_field requires an md_bounded law");
    const std::int64_t cells = detail::validated_cells(dim, side);
    const Law& innovation = *law.md_base;
    const auto offsets = detail::lex_predecessor_offsets(dim, law.md_window);

    Field field;
    field.dim = dim;
    field.side = side;
    field.seed = seed;
    field.law = law;
    field.values.resize(static_cast<std::size_t>(cells));
    field.cond_sigma.resize(static_cast<std::size_t>(cells));

    std::vector<std::int64_t> index;
    std::vector<std::int64_t> neighbor(static_cast<std::size_t>(dim));
    for (std::int64_t flat = 0; flat < cells; ++flat) {
        unflatten(flat, dim, side, index);
        double sum = 0.0;
        int count = 0;
        for (const auto& off : offsets) {
            bool inside = true;
            for (std::size_t j = 0; j < off.size(); ++j) {
                neighbor[j] = index[j] + off[j];
                if (neighbor[j] < 1 || neighbor[j] > side) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            sum += field.values[static_cast<std::size_t>(flatten(neighbor, side))];
            ++count;
        }
        const double window_mean = count > 0 ? sum / count : 0.0;
        const double sigma = 1.0 + law.md_amplitude * std::tanh(window_mean);
        CounterRng rng(seed, static_cast<std::uint64_t>(flat));
        field.cond_sigma[static_cast<std::size_t>(flat)] = sigma;
        field.values[static_cast<std::size_t>(flat)] = sigma * draw(innovation, rng);
    }
    return field;
}

inline Field sample_field(const Law& law, int dim, std::int64_t side, std::uint64_t seed) {
    return law.iid() ? sample_iid_field(law, dim, side, seed)
                     : sample_md_field(law, dim, side, seed);
}

// Band truncation x -> x 1{alpha tau c_n <= |x| < beta tau c_n}.
// alpha=0, beta=1 is the plain truncation at tau c_n.
struct TruncationPiece {
    double tau;
    double c_n;
    double alpha;
    double beta;

    TruncationPiece(double tau_, double c_n_, double alpha_, double beta_)
        : tau(tau_), c_n(c_n_), alpha(alpha_), beta(beta_) {
        if (!(tau > 0.0 && tau <= 1.0))
            throw std::invalid_argument("truncation piece requires tau in (0,1]");
        if (!(c_n > 0.0)) throw std::invalid_argument("truncation piece requires c_n > 0");
        if (!(alpha >= 0.0 && beta <= 1.0 && alpha <= beta))
            throw std::invalid_argument("truncation piece requires 0 <= alpha <= beta <= 1");
    }

    double lower() const noexcept { return alpha * tau * c_n; }
    double upper() const noexcept { return beta * tau * c_n; }

    double apply(double x) const noexcept {
        const double magnitude = std::abs(x);
        return (magnitude >= lower() && magnitude < upper()) ? x : 0.0;
    }
};

inline Field apply_truncation(const Field& field, const TruncationPiece& piece) {
    Field out = field;
    for (auto& value : out.values) value = piece.apply(value);
    return out;
}

}  // namespace fieldsum
