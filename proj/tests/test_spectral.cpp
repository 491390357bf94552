#include <doctest.h>

#include <cmath>
#include <random>

#include "sarfx/spectral.hpp"
#include "support/oracles.hpp"

using namespace sarfx;

namespace {

ComplexImage random_complex(std::mt19937_64& gen, std::size_t h, std::size_t w) {
    return ComplexImage(oracle::random_plane(gen, h, w, -1, 1), oracle::random_plane(gen, h, w, -1, 1));
}

Plane<Complex> as_complex(const ComplexImage& z) {
    Plane<Complex> p(z.height(), z.width());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = {z.re()[i], z.im()[i]};
    return p;
}

double max_abs_diff(const ComplexImage& a, const ComplexImage& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(Complex(a.re()[i], a.im()[i]) - Complex(b.re()[i], b.im()[i])));
    return d;
}

double rms(const ComplexImage& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.re()[i] * a.re()[i] + a.im()[i] * a.im()[i];
    return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("forward DFT of a constant image has only a DC bin of c*N*M") {
    const double c = 3.25;
    const AmplitudeImage img(6, 10, c);
    const auto s = forward_dft(img);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t k = 0; k < 10; ++k) {
            if (r == s.dc_row() && k == s.dc_col()) {
                CHECK(std::abs(s(r, k)) == doctest::Approx(c * 60).epsilon(1e-14));
            } else {
                CHECK(std::abs(s(r, k)) < 1e-12);
            }
        }
}

TEST_CASE("unit impulse at origin gives a flat unit spectrum") {
    RealPlane p(8, 5, 0.0);
    p(0, 0) = 1.0;
    const auto s = forward_dft(AmplitudeImage(p));
    for (const auto& v : s.values().span()) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("forward DFT matches the direct O(N^2) oracle") {
    std::mt19937_64 gen(1);
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 10}, {5, 3}}) {
        const auto z = random_complex(gen, h, w);
        const auto fast = forward_dft(z);
        const auto slow = oracle::direct_dft_centered(as_complex(z));
        for (std::size_t i = 0; i < slow.size(); ++i) CHECK(std::abs(fast.values()[i] - slow[i]) < 1e-10);
    }
}

TEST_CASE("inverse DFT") {
    SUBCASE("zeros give zeros") {
        const auto z = inverse_dft(Spectrum(ComplexPlane(4, 6, Complex{})));
        for (double v : z.re().span()) CHECK(v == 0.0);
        for (double v : z.im().span()) CHECK(v == 0.0);
    }
    SUBCASE("DC-only N*M gives constant 1") {
        ComplexPlane p(4, 6, Complex{});
        p(2, 3) = 24.0;
        const auto z = inverse_dft(Spectrum(p));
        for (double v : z.re().span()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
        for (double v : z.im().span()) CHECK(std::abs(v) < 1e-15);
    }
    SUBCASE("matches direct inverse oracle") {
        std::mt19937_64 gen(5);
        ComplexPlane X(6, 9);
        for (auto& v : X.span()) v = {std::normal_distribution<>()(gen), std::normal_distribution<>()(gen)};
        const auto fast = inverse_dft(Spectrum(X));
        const auto slow = oracle::direct_idft_centered(X);
        for (std::size_t i = 0; i < slow.size(); ++i)
            CHECK(std::abs(Complex(fast.re()[i], fast.im()[i]) - slow[i]) < 1e-12);
    }
}

TEST_CASE("round trips") {
    std::mt19937_64 gen(2);
    SUBCASE("random 16x16 real image, RMS error < 1e-10") {
        const AmplitudeImage a(oracle::random_plane(gen, 16, 16, 0, 1000));
        const auto back = inverse_dft(forward_dft(a));
        const auto orig = ComplexImage::from_real(a);
        double err = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = back.re()[i] - a[i];
            err += d * d + back.im()[i] * back.im()[i];
        }
        CHECK(std::sqrt(err / 256) / rms(orig) < 1e-10);
    }
    SUBCASE("random 32x32 complex, max abs error < 1e-10") {
        const auto z = random_complex(gen, 32, 32);
        CHECK(max_abs_diff(inverse_dft(forward_dft(z)), z) < 1e-10);
    }
    SUBCASE("non-power-of-two sizes") {
        const auto z = random_complex(gen, 21, 34);
        CHECK(max_abs_diff(inverse_dft(forward_dft(z)), z) < 1e-10);
    }
}

TEST_CASE("property: Parseval under the unscaled-forward convention") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 20; ++t) {
        const std::size_t h = 1 + gen() % 30, w = 1 + gen() % 30;
        const auto z = random_complex(gen, h, w);
        const auto s = forward_dft(z);
        double ex = 0, eX = 0;
        for (std::size_t i = 0; i < z.size(); ++i) ex += z.re()[i] * z.re()[i] + z.im()[i] * z.im()[i];
        for (const auto& v : s.values().span()) eX += std::norm(v);
        CHECK(std::abs(ex - eX / static_cast<double>(h * w)) / ex < 1e-8);
    }
}

TEST_CASE("property: magnitude spectrum of real input is exactly central-symmetric") {
    std::mt19937_64 gen(4);
    for (int t = 0; t < 20; ++t) {
        const std::size_t h = 1 + gen() % 25, w = 1 + gen() % 25;
        const auto mag = magnitude(forward_dft(AmplitudeImage(oracle::random_plane(gen, h, w, 0, 100))));
        CHECK(central_asymmetry(mag) == 0.0);
    }
}

TEST_CASE("mirror index") {
    CHECK(mirror_index(2, 4) == 2);  // DC
    CHECK(mirror_index(0, 4) == 0);  // -N/2 has no positive partner
    CHECK(mirror_index(1, 4) == 3);
    CHECK(mirror_index(0, 5) == 4);
    CHECK(mirror_index(2, 5) == 2);
}

TEST_CASE("smooth_spectrum") {
    SUBCASE("constant plane stays constant") {
        const RealPlane p(20, 13, 4.5);
        const auto s = smooth_spectrum(p, 3.0, 31);
        for (double v : s.span()) CHECK(v == doctest::Approx(4.5).epsilon(1e-13));
    }
    SUBCASE("impulse at the centre of a 61x61 plane reproduces the kernel") {
        RealPlane p(61, 61, 0.0);
        p(30, 30) = 1.0;
        const auto s = smooth_spectrum(p, 10.0, 61);
        const auto k = gaussian_kernel(61, 10.0);
        for (std::size_t r = 0; r < 61; ++r)
            for (std::size_t c = 0; c < 61; ++c) CHECK(std::abs(s(r, c) - k[r] * k[c]) < 1e-12);
    }
    SUBCASE("random 32x32 matches the literal 2D convolution oracle") {
        std::mt19937_64 gen(6);
        const auto p = oracle::random_plane(gen, 32, 32);
        const auto fast = smooth_spectrum(p, 2.0, 9);
        const auto slow = oracle::direct_gaussian_smooth(p, 2.0, 9);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-10);
    }
    SUBCASE("kernel wider than the plane folds repeatedly") {
        std::mt19937_64 gen(8);
        const auto p = oracle::random_plane(gen, 5, 7);
        const auto fast = smooth_spectrum(p, 4.0, 21);
        const auto slow = oracle::direct_gaussian_smooth(p, 4.0, 21);
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-10);
    }
    SUBCASE("mass preserved for interior-supported input") {
        std::mt19937_64 gen(9);
        RealPlane p(64, 64, 0.0);
        double mass = 0;
        for (std::size_t r = 24; r < 40; ++r)
            for (std::size_t c = 24; c < 40; ++c) mass += p(r, c) = std::uniform_real_distribution<>(0, 1)(gen);
        const auto s = smooth_spectrum(p, 2.0, 15);
        double out = 0;
        for (double v : s.span()) out += v;
        CHECK(std::abs(out - mass) < 1e-10);
    }
    SUBCASE("output is nonnegative") {
        std::mt19937_64 gen(10);
        const auto s = smooth_spectrum(oracle::random_plane(gen, 17, 17), 1.0, 7);
        for (double v : s.span()) CHECK(v >= 0.0);
    }
    SUBCASE("parameter errors") {
        CHECK_THROWS_AS(smooth_spectrum(RealPlane(4, 4, 1.0), 1.0, 4), InvalidArgument);
        CHECK_THROWS_AS(smooth_spectrum(RealPlane(4, 4, 1.0), 0.0, 5), InvalidArgument);
    }
}

TEST_CASE("azimuthal profile") {
    SUBCASE("flat spectrum gives a flat profile") {
        const auto prof = azimuthal_profile(Spectrum(ComplexPlane(64, 64, Complex(2.0, 0.0))));
        for (std::size_t b = 0; b < prof.values.size(); ++b) {
            REQUIRE(prof.counts[b] > 0);
            CHECK(prof.values[b] == doctest::Approx(4.0));
        }
    }
    SUBCASE("DC-only spectrum") {
        ComplexPlane p(32, 32, Complex{});
        p(16, 16) = 3.0;
        const auto prof = azimuthal_profile(Spectrum(p));
        CHECK(prof.values[0] == doctest::Approx(9.0));
        CHECK(prof.counts[0] == 1);
        for (std::size_t b = 1; b < prof.values.size(); ++b) CHECK(prof.values[b] == 0.0);
    }
    SUBCASE("isotropic Gaussian magnitude decreases strictly; matches direct binning") {
        const std::size_t n = 64;
        ComplexPlane p(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const double d2 = std::pow(double(r) - 32, 2) + std::pow(double(c) - 32, 2);
                p(r, c) = std::exp(-d2 / (2 * 12.0 * 12.0));
            }
        const auto prof = azimuthal_profile(Spectrum(p));
        // Direct binning oracle.
        std::vector<double> sum(prof.values.size(), 0);
        std::vector<int> cnt(prof.values.size(), 0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const double d = std::sqrt(std::pow(double(r) - 32, 2) + std::pow(double(c) - 32, 2));
                const auto b = static_cast<std::size_t>(std::floor(d + 0.5));
                sum[b] += std::norm(p(r, c));
                cnt[b]++;
            }
        for (std::size_t b = 0; b < sum.size(); ++b) {
            CHECK(prof.counts[b] == static_cast<std::size_t>(cnt[b]));
            CHECK(prof.values[b] == doctest::Approx(sum[b] / cnt[b]).epsilon(1e-12));
        }
        for (std::size_t b = 2; b < 32; ++b) CHECK(prof.values[b] < prof.values[b - 1]);
        CHECK(prof.bin_centers[32] == doctest::Approx(0.5));
    }
}
