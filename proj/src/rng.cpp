#include "sarfx/rng.hpp"

#include <cmath>
#include <numbers>

#include "sarfx/errors.hpp"

namespace sarfx {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::array<std::uint64_t, 2> counter_draw(std::uint64_t seed, std::uint32_t stream,
                                          std::uint64_t index) noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32), stream, 0};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::apply(ctr, key);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

std::uint64_t CounterRng::next_u64() noexcept {
    if (cached_ == 0) {
        const auto words = counter_draw(seed_, stream_, counter_++);
        block_ = {static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                  static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32)};
        cached_ = 2;
    }
    const int slot = 2 - cached_;
    --cached_;
    return (static_cast<std::uint64_t>(block_[2 * slot + 1]) << 32) | block_[2 * slot];
}

double CounterRng::uniform(double lo, double hi) noexcept {
    const double x = lo + (hi - lo) * uniform();
    // lo + (hi - lo) * u can round up to hi for u close to 1.
    return x < hi ? x : std::nextafter(hi, lo);
}

std::int64_t CounterRng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(next_u64());
    }
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

double CounterRng::normal(double mean, double stddev) noexcept {
    // Box-Muller, cosine branch only; one normal per two uniforms keeps the stream stateless.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::laplace(double location, double scale) noexcept {
    const double u = uniform() - 0.5;
    const double mag = -std::log1p(-2.0 * std::abs(u));
    return location + (u < 0 ? -scale : scale) * mag;
}

std::uint64_t CounterRng::poisson(double lambda) {
    if (!(lambda > 0.0) || lambda > 500.0) {
        throw InvalidArgument("poisson: lambda must be in (0, 500]");
    }
    // Sequential inversion; exp(-500) is still a normal double.
    const double u = uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view item_id,
                          std::string_view stage) noexcept {
    // FNV-1a over "id \0 stage", mixed with the master seed.
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto feed = [&h](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001B3ull;
        }
    };
    feed(item_id);
    h ^= 0;
    h *= 0x100000001B3ull;
    feed(stage);
    return splitmix64(splitmix64(master_seed) ^ h);
}

}  // namespace sarfx
