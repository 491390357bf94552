#include "sarfx/speckle.hpp"

#include <numbers>

#include "sarfx/rng.hpp"

namespace sarfx {

namespace {
constexpr std::uint32_t kSpeckleStream = 0x5350u;  // "SP"
}

SpeckleField generate_speckle(std::size_t height, std::size_t width, SpeckleMode mode,
                              double sigma_s, std::uint64_t seed) {
    if (height == 0 || width == 0) {
        throw InvalidArgument("speckle field must be at least 1x1");
    }
    if (mode == SpeckleMode::full && !(sigma_s > 0.0 && std::isfinite(sigma_s))) {
        throw InvalidArgument("full-mode speckle requires sigma_s > 0");
    }
    SpeckleField f;
    f.mode_ = mode;
    f.sigma_s_ = mode == SpeckleMode::full ? sigma_s : 1.0;
    f.re_ = RealPlane(height, width);
    f.im_ = RealPlane(height, width);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < height * width; ++i) {
        const auto words = counter_draw(seed, kSpeckleStream, i);
        const double phase = two_pi * to_unit(words[0]);
        double amp = 1.0;
        if (mode == SpeckleMode::full) {
            // Inverse CDF of Rayleigh; 1 - u lies in (0, 1].
            amp = sigma_s * std::sqrt(-2.0 * std::log(1.0 - to_unit(words[1])));
        }
        if (mode == SpeckleMode::phase_only) {
            // Normalize so |S| == 1 to the last ulp rather than relying on cos^2 + sin^2.
            const double c = std::cos(phase);
            const double s = std::sin(phase);
            const double n = std::hypot(c, s);
            f.re_[i] = c / n;
            f.im_[i] = s / n;
        } else {
            f.re_[i] = amp * std::cos(phase);
            f.im_[i] = amp * std::sin(phase);
        }
    }
    return f;
}

ComplexImage inject_speckle(const AmplitudeImage& amplitude, const SpeckleField& field) {
    if (amplitude.height() != field.height() || amplitude.width() != field.width()) {
        throw DimensionError("speckle field and image differ in shape");
    }
    RealPlane re(amplitude.height(), amplitude.width());
    RealPlane im(amplitude.height(), amplitude.width());
    for (std::size_t i = 0; i < amplitude.size(); ++i) {
        re[i] = amplitude[i] * field.re()[i];
        im[i] = amplitude[i] * field.im()[i];
    }
    return ComplexImage(std::move(re), std::move(im));
}

std::string_view to_string(SpeckleMode mode) {
    return mode == SpeckleMode::full ? "full" : "phase-only";
}

std::optional<SpeckleMode> parse_speckle_mode(std::string_view text) {
    if (text == "full") {
        return SpeckleMode::full;
    }
    if (text == "phase-only" || text == "phase_only") {
        return SpeckleMode::phase_only;
    }
    return std::nullopt;
}

}  // namespace sarfx
