#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sarfx/rng.hpp"
#include "sarfx/speckle.hpp"
#include "sarfx/spectral.hpp"
#include "support/oracles.hpp"

using namespace sarfx;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::apply(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::apply(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("CounterRng streams are reproducible and distinct") {
    CounterRng a(42), b(42), c(42, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    CHECK(derive_seed(1, "item-3", "splice") == derive_seed(1, "item-3", "splice"));
    CHECK(derive_seed(1, "item-3", "splice") != derive_seed(1, "item-3", "attack"));
    CHECK(derive_seed(1, "item-3", "splice") != derive_seed(2, "item-3", "splice"));
}

TEST_CASE("CounterRng distribution helpers") {
    CounterRng rng(7);
    const int n = 200000;
    double s = 0, s2 = 0, l2 = 0, ps = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(0, 2);
        s += x;
        s2 += x * x;
        const double y = rng.laplace(0, 3);
        l2 += y * y;
        ps += static_cast<double>(rng.poisson(32.7675));
        const double u = rng.uniform(0.5, 0.65);
        REQUIRE(u >= 0.5);
        REQUIRE(u < 0.65);
        const auto k = rng.uniform_int(0, 896);
        REQUIRE(k >= 0);
        REQUIRE(k <= 896);
    }
    CHECK(s / n == doctest::Approx(0).epsilon(0.03).scale(1));
    CHECK(std::sqrt(s2 / n) == doctest::Approx(2).epsilon(0.01));
    CHECK(std::sqrt(l2 / n) == doctest::Approx(3 * std::sqrt(2.0)).epsilon(0.01));
    CHECK(ps / n == doctest::Approx(32.7675).epsilon(0.005));
}

TEST_CASE("phase-only speckle has unit modulus") {
    for (std::uint64_t seed : {0ull, 1ull, 0xdeadbeefull}) {
        const auto f = generate_speckle(8, 8, SpeckleMode::phase_only, 1.0, seed);
        for (std::size_t i = 0; i < 64; ++i)
            CHECK(std::abs(std::hypot(f.re()[i], f.im()[i]) - 1.0) < 1e-12);
    }
}

TEST_CASE("full-mode Rayleigh moments and uniform phase (Monte Carlo, 1e6 samples)") {
    const double sigma = kDefaultSpeckleSigma;
    const auto f = generate_speckle(1000, 1000, SpeckleMode::full, sigma, 2024);
    double s = 0, s2 = 0;
    std::vector<double> phase(f.re().size());
    for (std::size_t i = 0; i < phase.size(); ++i) {
        const double a = std::hypot(f.re()[i], f.im()[i]);
        s += a;
        s2 += a * a;
        double p = std::atan2(f.im()[i], f.re()[i]);
        if (p < 0) p += 2 * std::numbers::pi;
        phase[i] = p;
    }
    const double n = static_cast<double>(phase.size());
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(sigma * std::sqrt(std::numbers::pi / 2)).epsilon(0.003));
    CHECK(std::abs(mean - 0.8862) < 0.003);
    CHECK(var == doctest::Approx((2 - std::numbers::pi / 2) * sigma * sigma).epsilon(0.01));
    const double d = oracle::ks_statistic(phase, [](double x) { return x / (2 * std::numbers::pi); });
    CHECK(d < oracle::ks_critical_001(phase.size()));
}

TEST_CASE("speckle generation is deterministic and validates sigma") {
    const auto a = generate_speckle(5, 7, SpeckleMode::full, 2.0, 99);
    const auto b = generate_speckle(5, 7, SpeckleMode::full, 2.0, 99);
    const auto c = generate_speckle(5, 7, SpeckleMode::full, 2.0, 100);
    CHECK(a.re() == b.re());
    CHECK(a.im() == b.im());
    CHECK(!(a.re() == c.re()));
    CHECK_THROWS_AS(generate_speckle(4, 4, SpeckleMode::full, 0.0, 1), InvalidArgument);
    CHECK_THROWS_AS(generate_speckle(4, 4, SpeckleMode::full, -1.0, 1), InvalidArgument);
    CHECK_NOTHROW(generate_speckle(4, 4, SpeckleMode::phase_only, 0.0, 1));
}

TEST_CASE("a sub-block of a field equals the same pixels of a larger field") {
    // Counter-based: pixel i always consumes block i, so a 1-row field is the prefix of any field.
    const auto small = generate_speckle(1, 16, SpeckleMode::full, 1.0, 5);
    const auto big = generate_speckle(4, 16, SpeckleMode::full, 1.0, 5);
    for (std::size_t c = 0; c < 16; ++c) CHECK(small.re()(0, c) == big.re()(0, c));
}

TEST_CASE("inject_speckle") {
    SUBCASE("zero amplitude gives zero") {
        const auto f = generate_speckle(6, 6, SpeckleMode::full, 1.0, 3);
        const auto z = inject_speckle(AmplitudeImage(6, 6, 0.0), f);
        for (double v : z.re().span()) CHECK(v == 0.0);
        for (double v : z.im().span()) CHECK(v == 0.0);
    }
    SUBCASE("unit amplitude with phase-only field") {
        const auto f = generate_speckle(6, 6, SpeckleMode::phase_only, 1.0, 3);
        const auto z = inject_speckle(AmplitudeImage(6, 6, 1.0), f);
        for (std::size_t i = 0; i < 36; ++i) {
            CHECK(std::abs(std::hypot(z.re()[i], z.im()[i]) - 1.0) < 1e-12);
            CHECK(std::atan2(z.im()[i], z.re()[i]) == doctest::Approx(std::atan2(f.im()[i], f.re()[i])));
        }
    }
    SUBCASE("random inputs match the nested-loop oracle") {
        std::mt19937_64 gen(11);
        const AmplitudeImage a(oracle::random_plane(gen, 16, 16, 0, 500));
        const auto f = generate_speckle(16, 16, SpeckleMode::full, 0.7, 12);
        const auto z = inject_speckle(a, f);
        for (std::size_t r = 0; r < 16; ++r)
            for (std::size_t c = 0; c < 16; ++c) {
                const std::complex<double> want = a(r, c) * std::complex<double>(f.re()(r, c), f.im()(r, c));
                CHECK(std::abs(z.re()(r, c) - want.real()) <= 1e-12 * (1 + std::abs(want)));
                CHECK(std::abs(z.im()(r, c) - want.imag()) <= 1e-12 * (1 + std::abs(want)));
                CHECK(std::hypot(z.re()(r, c), z.im()(r, c)) ==
                      doctest::Approx(a(r, c) * std::hypot(f.re()(r, c), f.im()(r, c))).epsilon(1e-12));
            }
    }
    SUBCASE("dimension mismatch") {
        const auto f = generate_speckle(4, 5, SpeckleMode::phase_only, 1.0, 1);
        CHECK_THROWS_AS(inject_speckle(AmplitudeImage(5, 4, 1.0), f), DimensionError);
    }
}

TEST_CASE("phase-only speckle on a constant image has a flat spectrum") {
    const std::size_t n = 1024;
    const auto f = generate_speckle(n, n, SpeckleMode::phase_only, 1.0, 77);
    const auto z = inject_speckle(AmplitudeImage(n, n, 100.0), f);
    const auto spec = forward_dft(z);
    const auto prof = azimuthal_profile(spec);
    double total = 0;
    for (const auto& v : spec.values().span()) total += std::norm(v);
    const double overall = total / static_cast<double>(spec.size());
    // Highest complete annulus: the last ring inside the Nyquist circle.
    const double ratio = prof.values[n / 2 - 1] / overall;
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.2);
}
