#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fieldsum {

// Lattice sites are multi-indices i in {1..n}^d. Flat storage follows the
// lexicographic order (first coordinate most significant), so
// increasing flat index == increasing lex order.

inline std::int64_t checked_pow(std::int64_t base, int exponent) {
    if (base < 0 || exponent < 0) throw std::invalid_argument("checked_pow: negative input");
    std::int64_t result = 1;
    for (int e = 0; e < exponent; ++e) {
        if (base != 0 && result > (std::int64_t{1} << 62) / base)
            throw std::overflow_error("checked_pow: " + std::to_string(base) + "^" +
                                      std::to_string(exponent) + " overflows 64-bit range");
        result *= base;
    }
    return result;
}

inline std::int64_t lattice_size(int dim, std::int64_t side) {
    if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (side < 1) throw std::invalid_argument("lattice side must be >= 1");
    std::int64_t cells = 1;
    for (int j = 0; j < dim; ++j) {
        if (cells > (std::int64_t{1} << 62) / side)
            throw std::overflow_error("lattice " + std::to_string(side) + "^" +
                                      std::to_string(dim) + " exceeds addressable range");
        cells *= side;
    }
    return cells;
}

inline std::int64_t flatten(const std::vector<std::int64_t>& index, std::int64_t side) {
    std::int64_t flat = 0;
    for (std::size_t j = 0; j < index.size(); ++j) flat = flat * side + (index[j] - 1);
    return flat;
}

inline void unflatten(std::int64_t flat, int dim, std::int64_t side,
                      std::vector<std::int64_t>& index) {
    index.resize(static_cast<std::size_t>(dim));
    for (int j = dim - 1; j >= 0; --j) {
        index[static_cast<std::size_t>(j)] = flat % side + 1;
        flat /= side;
    }
}

// advance a 1-based multi-index within per-coordinate bounds [lo_j, hi_j];
// returns false after the last index
inline bool next_index(std::vector<std::int64_t>& index, const std::vector<std::int64_t>& lo,
                       const std::vector<std::int64_t>& hi) {
    for (int j = static_cast<int>(index.size()) - 1; j >= 0; --j) {
        auto uj = static_cast<std::size_t>(j);
        if (index[uj] < hi[uj]) {
            ++index[uj];
            return true;
        }
        index[uj] = lo[uj];
    }
    return false;
}

}  // namespace fieldsum
