#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sarfx {

/// Philox4x32-10 counter-based block cipher (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Output depends only on (counter, key), so
/// any pixel's draw can be recomputed independently of scheduling.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept;
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential stream over Philox keyed by a 64-bit seed and a 32-bit stream id.
/// Splitting = choosing a different stream id; streams never overlap.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0) noexcept
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept { return to_unit(next_u64()); }
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
    double normal(double mean, double stddev) noexcept;
    /// Laplace(location, scale b); variance is 2 b^2.
    double laplace(double location, double scale) noexcept;
    std::uint64_t poisson(double lambda);

    CounterRng split(std::uint32_t stream) const noexcept { return CounterRng(seed_, stream); }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int cached_ = 0;
};

/// Two independent 64-bit words for element `index` of stream `stream`.
std::array<std::uint64_t, 2> counter_draw(std::uint64_t seed, std::uint32_t stream,
                                          std::uint64_t index) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stable seed derivation: hash of (master seed, item id, stage name).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view item_id,
                          std::string_view stage) noexcept;

}  // namespace sarfx
