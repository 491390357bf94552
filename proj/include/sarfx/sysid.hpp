#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "sarfx/lsq.hpp"
#include "sarfx/raster.hpp"
#include "sarfx/spectral.hpp"

namespace sarfx {

enum class Strategy { gaussian, raised_cosine, direct, known };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

// Frequencies below are in DFT bins relative to DC: column offset for x (range),
// row offset for y (azimuth).

struct AxisGaussian {
    double gain = 1.0;
    double mean = 0.0;
    double sigma = 1.0;

    double operator()(double f) const;
};

struct GaussianFitParams {
    AxisGaussian x;
    AxisGaussian y;
    double residual = 0.0;  ///< final sum of squared residuals
    int iterations = 0;

    double product_gain() const { return x.gain * y.gain; }
};

/// R(f) = A - B cos(pi (|f| - fc) / fc) for |f| <= fc, 0 beyond.
struct AxisRaisedCosine {
    double A = 0.5;
    double B = 0.5;
    double cutoff = 1.0;

    double operator()(double f) const;
};

/// Per-axis shapes are reported in the gauge A + B = 1; the overall scale lives in `gain`.
struct RaisedCosineFitParams {
    AxisRaisedCosine x;
    AxisRaisedCosine y;
    double gain = 1.0;
    double residual = 0.0;
    int iterations = 0;
};

/// End-to-end system frequency response on a DC-centered grid.
///
/// Invariants: finite, nonnegative, central-symmetric to 1e-9, maximum exactly 1.
class TransferFunction {
public:
    TransferFunction() = default;
    /// Validates; throws InvalidArgument on violation.
    TransferFunction(RealPlane values, Strategy strategy);

    /// Divides by the maximum (exactly 1 afterwards) and validates.
    static TransferFunction normalized(RealPlane values, Strategy strategy);

    std::size_t height() const noexcept { return values_.height(); }
    std::size_t width() const noexcept { return values_.width(); }
    const RealPlane& values() const noexcept { return values_; }
    double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
    Strategy strategy() const noexcept { return strategy_; }

    std::optional<GaussianFitParams> gaussian_fit;
    std::optional<RaisedCosineFitParams> raised_cosine_fit;

private:
    RealPlane values_;
    Strategy strategy_ = Strategy::known;
};

inline constexpr double kSymmetryTolerance = 1e-9;

/// |F(x)|, DC-centered. Real (amplitude) input yields an exactly symmetric plane.
RealPlane magnitude_spectrum(const ComplexImage& image);
RealPlane magnitude_spectrum(const AmplitudeImage& image);

struct SmoothingParams {
    double sigma = 100.0;
    std::size_t kernel_size = 601;

    /// 601 / sigma 100 at 1024; other sizes scale the kernel to the nearest odd
    /// length of 601 * min_dim / 1024, with sigma = kernel / 6.01.
    static SmoothingParams for_size(std::size_t height, std::size_t width);
};

/// Divides by sqrt(sum of squares). Throws DegenerateInput on an all-zero plane.
RealPlane normalize_energy(const RealPlane& plane);

/// Separable 2D Gaussian least-squares fit of an energy-normalized magnitude.
GaussianFitParams fit_gaussian(const RealPlane& normalized_magnitude, const LsqOptions& options = {});
/// Separable 2D raised-cosine least-squares fit of an energy-normalized magnitude.
RaisedCosineFitParams fit_raised_cosine(const RealPlane& normalized_magnitude,
                                        const LsqOptions& options = {});

/// Raw separable models on the grid (no symmetrization or normalization).
RealPlane evaluate(const GaussianFitParams& params, std::size_t height, std::size_t width);
RealPlane evaluate(const RaisedCosineFitParams& params, std::size_t height, std::size_t width);

/// Model responses made central-symmetric per axis, clamped at 0 and max-normalized.
TransferFunction gaussian_response(const GaussianFitParams& params, std::size_t height,
                                   std::size_t width);
TransferFunction raised_cosine_response(const RaisedCosineFitParams& params, std::size_t height,
                                        std::size_t width);

/// H_D = |F(Re(F^-1(F_K)))| / max. Throws DegenerateInput when F_K is all zero.
TransferFunction estimate_direct(const RealPlane& smoothed_magnitude);

using EstimationSource = std::variant<ComplexImage, AmplitudeImage>;

/// Per source: magnitude spectrum, smoothing, strategy-specific response; the
/// max-normalized responses are averaged in order and re-normalized.
/// Amplitude-only sources are accepted only with Strategy::direct.
TransferFunction estimate_transfer_function(std::span<const EstimationSource> sources,
                                            Strategy strategy,
                                            std::optional<SmoothingParams> smoothing = std::nullopt,
                                            const LsqOptions& options = {});

/// Strategy::known: validates and returns the supplied response unchanged.
TransferFunction estimate_transfer_function(const TransferFunction& known);

/// Pearson correlation of two equally shaped planes.
double normalized_cross_correlation(const RealPlane& a, const RealPlane& b);

}  // namespace sarfx
