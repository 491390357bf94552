#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sarfx/raster.hpp"
#include "sarfx/rng.hpp"

namespace sarfx {

// ---------------------------------------------------------------------------
// Local donor edits

enum class EditKind { none, gaussian_blur, upscale, downscale, rotate };
enum class RangeClass { near, far, fixed };

struct ParameterRange {
    double lo = 0.0;
    double hi = 0.0;
    bool hi_inclusive = false;

    bool contains(double v) const noexcept { return v >= lo && (hi_inclusive ? v <= hi : v < hi); }
};

/// Blur sigma used by both the local and the global blur edit.
inline constexpr double kEditBlurSigma = 0.5;

/// Sampling range of a (kind, class) pair. Fixed classes and kinds without a
/// random parameter have no range.
std::optional<ParameterRange> edit_range(EditKind kind, RangeClass cls);

struct EditOp {
    EditKind kind = EditKind::none;
    double parameter = 0.0;  ///< sigma, resize factor or angle in degrees
    RangeClass range_class = RangeClass::fixed;

    static EditOp none() { return {}; }
    static EditOp fixed(EditKind kind, double parameter) { return {kind, parameter, RangeClass::fixed}; }
    /// Draws the parameter from the range for (kind, cls). Blur always gets sigma 0.5.
    static EditOp sample(EditKind kind, RangeClass cls, CounterRng& rng);

    /// Table-style row name, e.g. "upscale-near" or "blur".
    std::string name() const;
};

struct NamedEdit {
    std::string name;
    EditKind kind;
    RangeClass range_class;
};

/// The seven local edits: blur and near/far up-, down-scale and rotation.
const std::vector<NamedEdit>& local_edit_table();
std::optional<NamedEdit> find_local_edit(std::string_view name);

std::string_view to_string(EditKind k);
std::string_view to_string(RangeClass c);
std::optional<EditKind> parse_edit_kind(std::string_view s);
std::optional<RangeClass> parse_range_class(std::string_view s);

/// Applies the edit to the whole donor image. Resizes change the shape; rotation
/// keeps it and fills uncovered corners with 0. Output is clipped to >= 0.
/// `seed` is accepted for interface symmetry: every local edit is deterministic
/// once its parameter is fixed.
AmplitudeImage edit_donor(const AmplitudeImage& donor, const EditOp& op, std::uint64_t seed = 0);

/// The stencil carried along with an edit: rotation rotates it on an expanded
/// canvas and re-rasterizes at 0.5 coverage; other edits return it unchanged.
TamperMask transform_stencil(const TamperMask& stencil, const EditOp& op);

// ---------------------------------------------------------------------------
// Splicing

struct PixelPoint {
    std::size_t x = 0;  ///< column
    std::size_t y = 0;  ///< row
    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct RectRegion {
    std::size_t width = 0;
    std::size_t height = 0;
};

struct SpliceSpec {
    PixelPoint donor_origin;
    PixelPoint target_origin;
    std::variant<RectRegion, TamperMask> region;
    EditOp edit;

    std::size_t region_width() const;
    std::size_t region_height() const;
    bool covers(std::size_t dy, std::size_t dx) const;
};

struct SpliceResult {
    AmplitudeImage image;
    TamperMask mask;
};

/// Copies edited donor pixels of D onto T. Throws InvalidArgument when either
/// region leaves its image or the region is empty.
SpliceResult splice(const AmplitudeImage& target, const AmplitudeImage& edited_donor, const SpliceSpec& spec);

struct RandomSpliceResult {
    AmplitudeImage image;
    TamperMask mask;
    nlohmann::json provenance;
};

inline constexpr std::size_t kDefaultSpliceRegion = 128;

/// Fixed origins; unset ones are drawn uniformly in-bounds.
struct SplicePlacement {
    std::optional<PixelPoint> donor_origin;
    std::optional<PixelPoint> target_origin;
};

/// Edits the donor with a fixed-parameter op and splices a width x height region
/// (rotated with the content for rotations). Passing the same object as target
/// and donor draws disjoint regions.
RandomSpliceResult forge_splice(const AmplitudeImage& target, const AmplitudeImage& donor, std::size_t region_width,
                                std::size_t region_height, const EditOp& op, std::uint64_t seed,
                                const SplicePlacement& placement = {});

/// Draws donor and target tiles from one product, random in-bounds regions and
/// the edit parameter, then splices. A given `target_index` fixes the target and
/// draws the donor among the other tiles. With a single tile, donor and target
/// regions are drawn disjoint. Throws InvalidArgument when tiles are too small.
RandomSpliceResult random_splice(std::span<const AmplitudeImage> product_tiles, std::size_t region_size,
                                 EditKind kind, RangeClass cls, std::uint64_t seed,
                                 std::optional<std::size_t> target_index = std::nullopt);

// ---------------------------------------------------------------------------
// Global edits (ablation)

enum class GlobalEditKind {
    gaussian_blur,
    updownscale,
    downupscale,
    additive_gaussian,
    additive_laplacian,
    additive_poisson,
    additive_uniform
};

/// Noise scale 0.0005 * (2^16 - 1): Gaussian std, Laplace scale and Poisson rate.
inline constexpr double kGlobalNoiseScale = 0.0005 * 65535.0;
inline constexpr double kGlobalUniformHalfWidth = 50.0;

struct GlobalEditOp {
    GlobalEditKind kind = GlobalEditKind::gaussian_blur;
    double sigma = kEditBlurSigma;                  ///< blur
    std::pair<double, double> factors{1.0, 1.0};    ///< resize there and back
    double noise = kGlobalNoiseScale;               ///< Gaussian std, Laplace scale, Poisson rate, uniform half-width
    std::string name;

    /// Default parameters for a named ablation row (see global_edit_table).
    static GlobalEditOp defaults(std::string_view name);
};

/// The nine ablation rows by name: blur, updown-near, downup-near, updown-far,
/// downup-far, gaussian, laplacian, poisson, uniform.
const std::vector<std::string>& global_edit_table();

/// Whole-image edit clipped to [0, 2^bits - 1]; resize pairs return the original shape.
AmplitudeImage global_edit(const AmplitudeImage& image, const GlobalEditOp& op, std::uint64_t seed);

}  // namespace sarfx
