#pragma once

#include <complex>
#include <vector>

#include "sarfx/plane.hpp"
#include "sarfx/raster.hpp"

namespace sarfx {

using Complex = std::complex<double>;
using ComplexPlane = Plane<Complex>;

/// DC-centered 2D spectrum: bin (H/2, W/2) (integer division) holds frequency zero.
///
/// Convention: the forward transform is unscaled, the inverse carries 1/(H*W).
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(ComplexPlane values);

    std::size_t height() const noexcept { return values_.height(); }
    std::size_t width() const noexcept { return values_.width(); }
    std::size_t size() const noexcept { return values_.size(); }
    const ComplexPlane& values() const noexcept { return values_; }
    ComplexPlane& values() noexcept { return values_; }
    Complex operator()(std::size_t r, std::size_t c) const { return values_(r, c); }

    std::size_t dc_row() const noexcept { return height() / 2; }
    std::size_t dc_col() const noexcept { return width() / 2; }

private:
    ComplexPlane values_;
};

Spectrum forward_dft(const ComplexImage& image);
/// Real input. The result is made exactly Hermitian, so |X(-f)| == |X(f)| bit for bit.
Spectrum forward_dft(const AmplitudeImage& image);
ComplexImage inverse_dft(const Spectrum& spectrum);

// Plane-level transforms used inside the pipelines; same conventions as above.
ComplexPlane fft2_centered(ComplexPlane data);
ComplexPlane ifft2_centered(ComplexPlane centered);
/// Forces X(-f) = conj(X(f)) exactly by averaging each mirrored pair.
void hermitian_symmetrize(ComplexPlane& centered);

RealPlane magnitude(const Spectrum& spectrum);

/// Index of -f for a DC-centered axis of length n.
inline std::size_t mirror_index(std::size_t i, std::size_t n) noexcept {
    const std::size_t c = n / 2;
    return (2 * c + n - i) % n;
}

/// Max |p(f) - p(-f)| over the plane.
double central_asymmetry(const RealPlane& plane);

/// Unit-sum sampled Gaussian of odd length `size`.
std::vector<double> gaussian_kernel(std::size_t size, double sigma);

/// Same-size 2D convolution with a unit-sum Gaussian of side `kernel_size` and
/// half-sample symmetric boundary reflection. Throws on even kernel_size or sigma <= 0.
RealPlane smooth_spectrum(const RealPlane& magnitude, double sigma, std::size_t kernel_size);

/// Ring statistics of |S|^2 around DC; ring r collects bins whose rounded
/// Euclidean distance from DC is r.
struct RadialProfile {
    std::vector<double> bin_centers;  ///< r / min(H, W), cycles per pixel
    std::vector<double> values;       ///< ring mean of |S|^2
    std::vector<std::size_t> counts;
};

RadialProfile azimuthal_profile(const Spectrum& spectrum);

}  // namespace sarfx
