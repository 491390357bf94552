#pragma once

#include <array>
#include <optional>

#include <json.hpp>

#include "sarfx/raster.hpp"

namespace sarfx {

struct SsimOptions {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Mean SSIM over all fully contained Gaussian windows. Throws DimensionError
/// when the shapes differ or the images are smaller than the window.
double ssim(const AmplitudeImage& a, const AmplitudeImage& b, double dynamic_range,
            const SsimOptions& options = {});

/// Raw per-scale outputs of the windowed statistics.
struct SsimComponents {
    double ssim = 0.0;  ///< mean of l * cs
    double cs = 0.0;    ///< mean of the contrast-structure term
};
SsimComponents ssim_components(const RealPlane& a, const RealPlane& b, double dynamic_range,
                               const SsimOptions& options = {});

/// Standard five-scale exponents; normalized to sum to one before use.
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct MsSsimResult {
    double value = 0.0;
    std::size_t scales = 0;
};

/// Multi-scale SSIM with 2x2 box low-pass and decimation between scales. Uses as
/// many of the five scales as fit the window (all five from 176 pixels on) and
/// renormalizes the exponents of the scales used. Negative per-scale terms are
/// clamped to 0 before exponentiation.
MsSsimResult ms_ssim(const AmplitudeImage& a, const AmplitudeImage& b, double dynamic_range,
                     const SsimOptions& options = {});

/// mean^2 / variance of amplitude over the region (whole image when absent).
/// Throws DegenerateInput for fewer than 2 pixels or zero variance.
double enl(const AmplitudeImage& image, const std::optional<TamperMask>& region = std::nullopt);

/// |ENL(attacked) - ENL(pristine)| / ENL(pristine), in percent.
double delta_enl(const AmplitudeImage& attacked, const AmplitudeImage& pristine,
                 const std::optional<TamperMask>& region = std::nullopt);

struct AucResult {
    double raw = 0.0;           ///< higher score means tampered
    double max_polarity = 0.0;  ///< max(raw, 1 - raw)
    bool flipped = false;       ///< max_polarity came from the reversed orientation
};

/// Mann-Whitney AUC of a real-valued fingerprint against the splice mask, ties
/// counting one half. Throws DegenerateInput when the mask has a single class.
AucResult auc_roc(const RealPlane& fingerprint, const TamperMask& mask);

struct MetricReport {
    double ssim = 0.0;
    double msssim = 0.0;
    std::size_t msssim_scales = 0;
    double enl_source = 0.0;
    double enl_reference = 0.0;
    double delta_enl_abs_rel = 0.0;  ///< percent
    std::optional<AucResult> auc;

    nlohmann::json to_json() const;
};

/// Full-reference report of `source` (e.g. attacked) against `reference` (pristine).
MetricReport evaluate_metrics(const AmplitudeImage& source, const AmplitudeImage& reference,
                              double dynamic_range, const std::optional<TamperMask>& enl_region = std::nullopt);

}  // namespace sarfx
