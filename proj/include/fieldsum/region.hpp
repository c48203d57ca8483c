#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldsum/lattice.hpp"

namespace fieldsum {

// Borel subsets of [0,1]^d with exact measure arithmetic. Every supported
// shape decomposes into finitely many axis-aligned boxes, which keeps
// lambda(A), lambda(A meet B) and the weights lambda(nA meet R_i) closed-form.
enum class ShapeKind { empty, quadrant, box, cell_union };

struct Region {
    int dim = 1;
    ShapeKind kind = ShapeKind::empty;
    std::vector<double> lower;        // box
    std::vector<double> upper;        // box / quadrant corner t
    std::int64_t resolution = 0;      // cell_union grid resolution m
    std::vector<std::int64_t> cells;  // cell_union: sorted distinct flat indices in {0..m^d-1}
};

namespace regions {

inline Region empty(int dim) {
    if (dim < 1) throw std::invalid_argument("region dimension must be >= 1");
    Region r;
    r.dim = dim;
    r.kind = ShapeKind::empty;
    return r;
}

// lower-left quadrant [0,t_1] x ... x [0,t_d]
inline Region quadrant(std::vector<double> t) {
    if (t.empty()) throw std::invalid_argument("quadrant needs at least one coordinate");
    for (double tj : t)
        if (!(tj >= 0.0 && tj <= 1.0))
            throw std::invalid_argument("quadrant corner must lie in [0,1]^d");
    Region r;
    r.dim = static_cast<int>(t.size());
    r.kind = ShapeKind::quadrant;
    r.upper = std::move(t);
    return r;
}

inline Region box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("box needs matching lower/upper corners");
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (!(lo[j] >= 0.0 && lo[j] <= hi[j] && hi[j] <= 1.0))
            throw std::invalid_argument("box requires 0 <= lower <= upper <= 1 coordinatewise");
    Region r;
    r.dim = static_cast<int>(lo.size());
    r.kind = ShapeKind::box;
    r.lower = std::move(lo);
    r.upper = std::move(hi);
    return r;
}

inline Region cell_union_flat(int dim, std::int64_t resolution, std::vector<std::int64_t> flats) {
    if (dim < 1) throw std::invalid_argument("region dimension must be >= 1");
    if (resolution < 1) throw std::invalid_argument("cell_union resolution must be >= 1");
    const std::int64_t total = lattice_size(dim, resolution);
    for (std::int64_t f : flats)
        if (f < 0 || f >= total)
            throw std::invalid_argument("cell index outside {1..m}^d");
    std::sort(flats.begin(), flats.end());
    if (std::adjacent_find(flats.begin(), flats.end()) != flats.end())
        throw std::invalid_argument("cell_union cells must be distinct");
    Region r;
    r.dim = dim;
    r.kind = ShapeKind::cell_union;
    r.resolution = resolution;
    r.cells = std::move(flats);
    return r;
}

inline Region cell_union(int dim, std::int64_t resolution,
                         const std::vector<std::vector<std::int64_t>>& cell_indices) {
    std::vector<std::int64_t> flats;
    flats.reserve(cell_indices.size());
    for (const auto& cell : cell_indices) {
        if (static_cast<int>(cell.size()) != dim)
            throw std::invalid_argument("cell index arity does not match dimension");
        for (std::int64_t c : cell)
            if (c < 1 || c > resolution)
                throw std::invalid_argument("cell coordinate outside {1..m}");
        flats.push_back(flatten(cell, resolution));
    }
    return cell_union_flat(dim, resolution, std::move(flats));
}

}  // namespace regions

inline double lebesgue(const Region& r) {
    switch (r.kind) {
        case ShapeKind::empty:
            return 0.0;
        case ShapeKind::quadrant: {
            double v = 1.0;
            for (double t : r.upper) v *= t;
            return v;
        }
        case ShapeKind::box: {
            double v = 1.0;
            for (std::size_t j = 0; j < r.upper.size(); ++j) v *= r.upper[j] - r.lower[j];
            return v;
        }
        case ShapeKind::cell_union:
            return static_cast<double>(r.cells.size()) /
                   static_cast<double>(lattice_size(r.dim, r.resolution));
    }
    throw std::logic_error("unreachable shape kind");
}

namespace detail {

// visit the component boxes of a region as (lo, hi) coordinate vectors
template <class F>
void for_each_component_box(const Region& r, F&& visit) {
    const auto d = static_cast<std::size_t>(r.dim);
    switch (r.kind) {
        case ShapeKind::empty:
            return;
        case ShapeKind::quadrant: {
            std::vector<double> lo(d, 0.0);
            visit(lo, r.upper);
            return;
        }
        case ShapeKind::box:
            visit(r.lower, r.upper);
            return;
        case ShapeKind::cell_union: {
            std::vector<double> lo(d), hi(d);
            std::vector<std::int64_t> index;
            const auto m = static_cast<double>(r.resolution);
            for (std::int64_t flat : r.cells) {
                unflatten(flat, r.dim, r.resolution, index);
                for (std::size_t j = 0; j < d; ++j) {
                    lo[j] = static_cast<double>(index[j] - 1) / m;
                    hi[j] = static_cast<double>(index[j]) / m;
                }
                visit(lo, hi);
            }
            return;
        }
    }
}

inline double box_overlap_volume(const std::vector<double>& alo, const std::vector<double>& ahi,
                                 const std::vector<double>& blo, const std::vector<double>& bhi) {
    double v = 1.0;
    for (std::size_t j = 0; j < alo.size(); ++j) {
        const double len = std::min(ahi[j], bhi[j]) - std::max(alo[j], blo[j]);
        if (len <= 0.0) return 0.0;
        v *= len;
    }
    return v;
}

}  // namespace detail

inline double intersection_volume(const Region& a, const Region& b) {
    if (a.dim != b.dim) throw std::invalid_argument("intersection of regions of different dimension");
    if (a.kind == ShapeKind::empty || b.kind == ShapeKind::empty) return 0.0;
    if (a.kind == ShapeKind::cell_union && b.kind == ShapeKind::cell_union &&
        a.resolution == b.resolution) {
        // exact integer path on the common grid
        std::vector<std::int64_t> common;
        std::set_intersection(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(),
                              std::back_inserter(common));
        return static_cast<double>(common.size()) /
               static_cast<double>(lattice_size(a.dim, a.resolution));
    }
    double volume = 0.0;
    detail::for_each_component_box(a, [&](const std::vector<double>& alo,
                                          const std::vector<double>& ahi) {
        detail::for_each_component_box(b, [&](const std::vector<double>& blo,
                                              const std::vector<double>& bhi) {
            volume += detail::box_overlap_volume(alo, ahi, blo, bhi);
        });
    });
    return volume;
}

// pseudo-metric rho(A,B) = sqrt(lambda(A delta B))
inline double rho(const Region& a, const Region& b) {
    const double sym = lebesgue(a) + lebesgue(b) - 2.0 * intersection_volume(a, b);
    return std::sqrt(std::max(0.0, sym));
}

// Smoothing weights w_i = lambda(nA meet R_i) with R_i = ]i-1, i] per axis.
struct WeightGrid {
    int dim = 1;
    std::int64_t side = 1;
    std::vector<double> w;
};

namespace detail {

// per-axis overlap length of ]i-1, i] with the interval (alo, ahi)
inline double axis_overlap(std::int64_t i, double alo, double ahi) {
    const double len = std::min(static_cast<double>(i), ahi) -
                       std::max(static_cast<double>(i - 1), alo);
    return len > 0.0 ? len : 0.0;
}

// traversal over the lattice cells a scaled box (alo_j, ahi_j) touches;
// emits (flat, weight) with weight > 0
template <class F>
void scan_scaled_box(int dim, std::int64_t n, const std::vector<double>& alo,
                     const std::vector<double>& ahi, F&& emit) {
    const auto d = static_cast<std::size_t>(dim);
    std::vector<std::int64_t> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(alo[j])) + 1);
        hi[j] = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::ceil(ahi[j])));
        if (lo[j] > hi[j]) return;
    }
    std::vector<std::int64_t> index = lo;
    do {
        double w = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            w *= axis_overlap(index[j], alo[j], ahi[j]);
            if (w == 0.0) break;
        }
        if (w > 0.0) emit(flatten(index, n), w);
    } while (next_index(index, lo, hi));
}

}  // namespace detail

// Visit every (flat cell index, positive weight) pair of lambda(nA meet R_i).
// For cell unions a lattice cell may be visited once per overlapping region
// cell; the weights of the visits sum to lambda(nA meet R_i).
template <class F>
void for_each_weighted_cell(const Region& r, std::int64_t n, F&& emit) {
    if (n < 1) throw std::invalid_argument("weight grid needs n >= 1");
    const auto d = static_cast<std::size_t>(r.dim);
    switch (r.kind) {
        case ShapeKind::empty:
            return;
        case ShapeKind::quadrant: {
            std::vector<double> alo(d, 0.0), ahi(d);
            for (std::size_t j = 0; j < d; ++j) ahi[j] = static_cast<double>(n) * r.upper[j];
            detail::scan_scaled_box(r.dim, n, alo, ahi, emit);
            return;
        }
        case ShapeKind::box: {
            std::vector<double> alo(d), ahi(d);
            for (std::size_t j = 0; j < d; ++j) {
                alo[j] = static_cast<double>(n) * r.lower[j];
                ahi[j] = static_cast<double>(n) * r.upper[j];
            }
            detail::scan_scaled_box(r.dim, n, alo, ahi, emit);
            return;
        }
        case ShapeKind::cell_union: {
            std::vector<double> alo(d), ahi(d);
            std::vector<std::int64_t> index;
            for (std::int64_t flat : r.cells) {
                unflatten(flat, r.dim, r.resolution, index);
                for (std::size_t j = 0; j < d; ++j) {
                    // exact: products fit in 64 bits, division is correctly rounded
                    alo[j] = static_cast<double>(n * (index[j] - 1)) /
                             static_cast<double>(r.resolution);
                    ahi[j] = static_cast<double>(n * index[j]) / static_cast<double>(r.resolution);
                }
                detail::scan_scaled_box(r.dim, n, alo, ahi, emit);
            }
            return;
        }
    }
}

inline WeightGrid weight_grid(const Region& r, std::int64_t n) {
    WeightGrid grid;
    grid.dim = r.dim;
    grid.side = n;
    grid.w.assign(static_cast<std::size_t>(lattice_size(r.dim, n)), 0.0);
    for_each_weighted_cell(r, n, [&](std::int64_t flat, double w) {
        grid.w[static_cast<std::size_t>(flat)] += w;
    });
    return grid;
}

// lattice points of nA (intersected with {1..n}^d), sorted in lex order
inline std::vector<std::int64_t> scaled_lattice_points(const Region& r, std::int64_t n) {
    std::vector<std::int64_t> points;
    const auto d = static_cast<std::size_t>(r.dim);
    switch (r.kind) {
        case ShapeKind::empty:
            return points;
        case ShapeKind::quadrant:
        case ShapeKind::box: {
            std::vector<std::int64_t> lo(d), hi(d);
            for (std::size_t j = 0; j < d; ++j) {
                const double a = r.kind == ShapeKind::quadrant
                                     ? 0.0
                                     : static_cast<double>(n) * r.lower[j];
                const double b = static_cast<double>(n) * r.upper[j];
                lo[j] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(a)));
                hi[j] = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor(b)));
                if (lo[j] > hi[j]) return points;
            }
            std::vector<std::int64_t> index = lo;
            do {
                points.push_back(flatten(index, n));
            } while (next_index(index, lo, hi));
            std::sort(points.begin(), points.end());
            return points;
        }
        case ShapeKind::cell_union: {
            // i/n in cell c  <=>  (c-1)*n < i*m <= c*n, evaluated in integers
            std::vector<std::int64_t> lo(d), hi(d);
            std::vector<std::int64_t> index;
            const std::int64_t m = r.resolution;
            for (std::int64_t flat : r.cells) {
                unflatten(flat, r.dim, m, index);
                bool empty_range = false;
                for (std::size_t j = 0; j < d; ++j) {
                    lo[j] = ((index[j] - 1) * n) / m + 1;
                    hi[j] = std::min<std::int64_t>(n, (index[j] * n) / m);
                    if (lo[j] > hi[j]) {
                        empty_range = true;
                        break;
                    }
                }
                if (empty_range) continue;
                std::vector<std::int64_t> point = lo;
                do {
                    points.push_back(flatten(point, n));
                } while (next_index(point, lo, hi));
            }
            std::sort(points.begin(), points.end());
            return points;
        }
    }
    throw std::logic_error("unreachable shape kind");
}

// --- class enumeration ------------------------------------------------------

struct EnumerationLimits {
    std::int64_t cap = 100000;
};

namespace detail {

inline std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

constexpr unsigned __int128 kCountSaturation =
    static_cast<unsigned __int128>(1) << 100;

inline unsigned __int128 binomial_count(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        if (acc > kCountSaturation) return kCountSaturation;
        acc = acc * static_cast<unsigned __int128>(n - k + i);
        acc /= static_cast<unsigned __int128>(i);
    }
    return acc;
}

}  // namespace detail

// all quadrants with corner on the grid {0, 1/m, ..., 1}^d, lex order
inline std::vector<Region> enumerate_quadrant_grid(int dim, std::int64_t m,
                                                   EnumerationLimits limits = {}) {
    if (dim < 1 || m < 1) throw std::invalid_argument("quadrant grid needs d >= 1, m >= 1");
    unsigned __int128 count = 1;
    for (int j = 0; j < dim; ++j) count *= static_cast<unsigned __int128>(m + 1);
    if (count > static_cast<unsigned __int128>(limits.cap))
        throw std::length_error("quadrant_grid enumeration of " + detail::u128_to_string(count) +
                                " regions exceeds cap " + std::to_string(limits.cap));
    std::vector<Region> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::int64_t> lo(static_cast<std::size_t>(dim), 0);
    std::vector<std::int64_t> hi(static_cast<std::size_t>(dim), m);
    std::vector<std::int64_t> g = lo;
    do {
        std::vector<double> t(static_cast<std::size_t>(dim));
        for (std::size_t j = 0; j < t.size(); ++j)
            t[j] = static_cast<double>(g[j]) / static_cast<double>(m);
        out.push_back(regions::quadrant(std::move(t)));
    } while (next_index(g, lo, hi));
    return out;
}

// all unions of exactly k distinct cells of the {1..m}^d grid, lex order
inline std::vector<Region> enumerate_cell_unions(int dim, std::int64_t m, std::int64_t k,
                                                 EnumerationLimits limits = {}) {
    if (dim < 1 || m < 1 || k < 1) throw std::invalid_argument("cell_unions needs d,m,k >= 1");
    const std::int64_t total = lattice_size(dim, m);
    if (k > total) throw std::invalid_argument("cell_unions: k exceeds the number of grid cells");
    const unsigned __int128 count = detail::binomial_count(total, k);
    if (count > static_cast<unsigned __int128>(limits.cap)) {
        const std::string shown = count >= detail::kCountSaturation
                                      ? std::string("more than 2^100")
                                      : detail::u128_to_string(count);
        throw std::length_error("cell_unions enumeration of " + shown + " regions exceeds cap " +
                                std::to_string(limits.cap));
    }
    std::vector<Region> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::int64_t> combo(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(regions::cell_union_flat(dim, m, combo));
        // next k-combination of {0..total-1} in lex order
        std::int64_t pos = k - 1;
        while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == total - k + pos) --pos;
        if (pos < 0) break;
        ++combo[static_cast<std::size_t>(pos)];
        for (std::int64_t j = pos + 1; j < k; ++j)
            combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace fieldsum
