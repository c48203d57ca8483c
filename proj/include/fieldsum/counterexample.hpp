#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldsum/field.hpp"
#include "fieldsum/region.hpp"

namespace fieldsum {

// Scales of the non-tightness construction at stage r:
//   n_r = 4^{rp},  beta_r = 2^{rd},  eps_r = 2^{-rd(p+1)/2},
//   k_r = ceil(n_r^d beta_r^{-p-1} / 2) = max(1, 2^{rd(p-1)-1}).
// k_r keeps E[#exceedances] = n_r^d P(X >= beta_r) equal to k_r and keeps
// the key identity n_r^{-d/2} k_r beta_r >= 1/2 exact.
struct CounterexampleParams {
    int p = 1;
    int d = 1;
    int r = 1;
    std::int64_t side = 0;           // n_r
    std::int64_t threshold = 0;      // beta_r
    std::int64_t cell_count = 0;     // k_r
    double radius = 0.0;             // eps_r
    std::int64_t lattice_cells = 0;  // n_r^d
    double exceed_prob = 0.0;        // q = P(X_0 >= beta_r) = beta_r^{-p-1}/2
};

inline CounterexampleParams counterexample_params(int p, int d, int r) {
    if (p < 1 || d < 1 || r < 1)
        throw std::invalid_argument("counterexample_params requires p, d, r >= 1");
    const auto exp2_checked = [&](std::int64_t e, const char* what) -> std::int64_t {
        if (e >= 62)
            throw std::overflow_error(std::string(what) + " = 2^" + std::to_string(e) +
                                      " overflows at p=" + std::to_string(p) + ", d=" +
                                      std::to_string(d) + ", r=" + std::to_string(r) +
                                      "; choose smaller p, d or r");
        return std::int64_t{1} << e;
    };
    CounterexampleParams params;
    params.p = p;
    params.d = d;
    params.r = r;
    params.side = exp2_checked(std::int64_t{2} * r * p, "n_r");
    params.lattice_cells = exp2_checked(std::int64_t{2} * r * p * d, "n_r^d");
    params.threshold = exp2_checked(std::int64_t{1} * r * d, "beta_r");
    const std::int64_t ke = std::int64_t{1} * r * d * (p - 1) - 1;
    params.cell_count = ke < 0 ? 1 : exp2_checked(ke, "k_r");
    params.radius = std::exp2(-0.5 * static_cast<double>(r) * d * (p + 1));
    params.exceed_prob = std::exp2(-static_cast<double>(std::int64_t{1} * r * d * (p + 1) + 1));
    return params;
}

// The adaptive bad set A_r(omega): the union of the k_r grid cells at the
// first (lex order) k_r sites with X_i >= beta_r, or nothing when fewer
// than k_r sites exceed the threshold.
inline std::optional<Region> adaptive_region(const Field& field,
                                             const CounterexampleParams& params) {
    if (field.dim != params.d || field.side != params.side)
        throw std::invalid_argument("adaptive_region: field lattice does not match n_r, d");
    const auto threshold = static_cast<double>(params.threshold);
    std::vector<std::int64_t> picked;
    picked.reserve(static_cast<std::size_t>(params.cell_count));
    for (std::int64_t flat = 0; flat < field.size(); ++flat) {
        if (field.values[static_cast<std::size_t>(flat)] >= threshold) {
            picked.push_back(flat);
            if (static_cast<std::int64_t>(picked.size()) == params.cell_count) break;
        }
    }
    if (static_cast<std::int64_t>(picked.size()) < params.cell_count) return std::nullopt;
    return regions::cell_union_flat(field.dim, params.side, std::move(picked));
}

}  // namespace fieldsum
