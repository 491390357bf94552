#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "sarfx/raster.hpp"

namespace sarfx {

enum class SpeckleMode { full, phase_only };

/// Rayleigh scale giving E[S^2] = 2 sigma^2 = 1.
inline const double kDefaultSpeckleSigma = 1.0 / std::sqrt(2.0);

/// Complex multiplicative speckle S e^{j phi_S}.
///
/// Full mode draws S ~ Rayleigh(sigma_s) and phi_S ~ U[0, 2pi) per pixel;
/// phase-only mode fixes S = 1. Pixel (r, c) consumes Philox block number
/// r * width + c under the field's seed, so any sub-block of the field can be
/// regenerated independently and in any order.
class SpeckleField {
public:
    std::size_t height() const noexcept { return re_.height(); }
    std::size_t width() const noexcept { return re_.width(); }
    SpeckleMode mode() const noexcept { return mode_; }
    double sigma_s() const noexcept { return sigma_s_; }
    const RealPlane& re() const noexcept { return re_; }
    const RealPlane& im() const noexcept { return im_; }

    friend SpeckleField generate_speckle(std::size_t, std::size_t, SpeckleMode, double,
                                         std::uint64_t);

private:
    RealPlane re_;
    RealPlane im_;
    SpeckleMode mode_ = SpeckleMode::phase_only;
    double sigma_s_ = 1.0;
};

/// Throws InvalidArgument for sigma_s <= 0 in full mode (ignored in phase-only mode).
SpeckleField generate_speckle(std::size_t height, std::size_t width, SpeckleMode mode,
                              double sigma_s, std::uint64_t seed);

/// out = amplitude * field, elementwise.
ComplexImage inject_speckle(const AmplitudeImage& amplitude, const SpeckleField& field);

std::string_view to_string(SpeckleMode mode);
std::optional<SpeckleMode> parse_speckle_mode(std::string_view text);

}  // namespace sarfx
