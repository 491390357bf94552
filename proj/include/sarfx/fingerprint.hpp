#pragma once

#include <string>
#include <vector>

#include "sarfx/raster.hpp"

namespace sarfx {

/// Stand-in forensic fingerprint: local variance (window x window) of the
/// high-pass residual of log(1 + amplitude), the residual being the difference
/// to a 3x3 box mean. Borders are mirrored. Brightness-independent, so it
/// responds to texture inconsistencies such as resampled or blurred speckle.
RealPlane residual_variance_fingerprint(const AmplitudeImage& image, std::size_t window = 7);

inline constexpr const char* kResidualVarianceFingerprint = "residual-variance";

/// Named providers usable from experiment configs. Throws InvalidArgument on unknown names.
RealPlane compute_fingerprint(const std::string& provider, const AmplitudeImage& image);
std::vector<std::string> fingerprint_providers();

}  // namespace sarfx
