#pragma once

#include "sarfx/plane.hpp"

namespace sarfx {

/// Keys cubic convolution weight (a = -0.5).
double cubic_weight(double t) noexcept;

/// Bicubic resize to an explicit shape with pixel-centre alignment. Samples
/// beyond the border replicate the edge, so constant planes stay constant.
RealPlane resize(const RealPlane& plane, std::size_t out_height, std::size_t out_width);

/// Resize by a uniform factor; the output shape is the rounded scaled shape (at least 1x1).
RealPlane resize(const RealPlane& plane, double factor);

enum class RotateCanvas { same, expand };

/// Bicubic rotation about the plane centre by `degrees` (counter-clockwise as
/// displayed, rows growing downward). Samples outside the source read as 0.
/// `expand` grows the canvas to the rotated bounding box.
RealPlane rotate(const RealPlane& plane, double degrees, RotateCanvas canvas = RotateCanvas::same);

/// Separable Gaussian blur with a (2 ceil(4 sigma) + 1)-tap kernel and mirrored borders.
RealPlane gaussian_blur(const RealPlane& plane, double sigma);

}  // namespace sarfx
