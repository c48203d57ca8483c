#pragma once

#include <cmath>
#include <cstdint>

namespace fieldsum {

// SplitMix64 finalizer (Steele/Lea/Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counter-based stream: draw j of stream (seed, stream) is mix64(key + j*phi),
// i.e. SplitMix64 with a per-stream start. Any draw is addressable without
// generating its predecessors, so lattice sites can be filled in any order
// (or in parallel) with identical results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(seed ^ mix64(stream + kGolden))) {}

    std::uint64_t next_u64() noexcept {
        counter_ += kGolden;
        return mix64(key_ + counter_);
    }

    // uniform on the open interval (0,1); never returns an endpoint
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (cosine branch)
    double next_gaussian() noexcept {
        const double u = next_unit();
        const double v = next_unit();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
    }

    // fair coin as +/-1
    double next_sign() noexcept {
        return (next_u64() >> 63) ? 1.0 : -1.0;
    }

private:
    static constexpr double kTwoPi = 6.28318530717958647692528676655900577;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream id conventions: replication j of a master seed gets its own seed,
// each lattice site consumes from the stream keyed by its flat index.
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) noexcept {
    return mix64(master_seed + kGolden * (replication + 1));
}

}  // namespace fieldsum
