#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "sarfx/plane.hpp"

namespace sarfx {

inline constexpr int kDefaultDynamicRangeBits = 16;

/// Released SAR product amplitude. Values are nonnegative and finite.
class AmplitudeImage {
public:
    AmplitudeImage() = default;
    explicit AmplitudeImage(RealPlane values, int dynamic_range_bits = kDefaultDynamicRangeBits);
    AmplitudeImage(std::size_t height, std::size_t width, double fill = 0.0,
                   int dynamic_range_bits = kDefaultDynamicRangeBits);

    std::size_t height() const noexcept { return values_.height(); }
    std::size_t width() const noexcept { return values_.width(); }
    std::size_t size() const noexcept { return values_.size(); }
    int dynamic_range_bits() const noexcept { return bits_; }
    /// 2^bits - 1.
    double max_code() const noexcept;

    const RealPlane& values() const noexcept { return values_; }
    double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const AmplitudeImage&, const AmplitudeImage&) = default;

private:
    RealPlane values_;
    int bits_ = kDefaultDynamicRangeBits;
};

/// Full complex SAR signal, stored as separate real and imaginary planes.
class ComplexImage {
public:
    ComplexImage() = default;
    ComplexImage(RealPlane re, RealPlane im);

    std::size_t height() const noexcept { return re_.height(); }
    std::size_t width() const noexcept { return re_.width(); }
    std::size_t size() const noexcept { return re_.size(); }
    const RealPlane& re() const noexcept { return re_; }
    const RealPlane& im() const noexcept { return im_; }

    /// Pixelwise modulus |z|.
    AmplitudeImage amplitude(int dynamic_range_bits = kDefaultDynamicRangeBits) const;

    static ComplexImage from_real(const AmplitudeImage& amp);

    friend bool operator==(const ComplexImage&, const ComplexImage&) = default;

private:
    RealPlane re_;
    RealPlane im_;
};

/// Binary splice mask: 1 on tampered pixels, 0 elsewhere.
class TamperMask {
public:
    TamperMask() = default;
    explicit TamperMask(Plane<std::uint8_t> values);
    TamperMask(std::size_t height, std::size_t width);

    std::size_t height() const noexcept { return values_.height(); }
    std::size_t width() const noexcept { return values_.width(); }
    std::size_t size() const noexcept { return values_.size(); }
    const Plane<std::uint8_t>& values() const noexcept { return values_; }
    bool operator()(std::size_t r, std::size_t c) const { return values_(r, c) != 0; }
    std::size_t popcount() const noexcept;

    friend bool operator==(const TamperMask&, const TamperMask&) = default;

private:
    Plane<std::uint8_t> values_;
};

// ---------------------------------------------------------------------------
// Binary container ("SARF").
//
// 32-byte little-endian header:
//   [0,4)   magic "SARF"
//   [4]     kind (RasterKind)
//   [5]     dynamic range bits
//   [6,16)  reserved, zero
//   [16,24) height u64
//   [24,32) width u64
// followed by a row-major payload. Complex payloads are plane-sequential
// (all real parts, then all imaginary parts).

enum class RasterKind : std::uint8_t { amplitude_f64 = 1, complex_f64 = 2, mask_u8 = 3 };

inline constexpr std::size_t kRasterHeaderSize = 32;

struct RasterHeader {
    RasterKind kind = RasterKind::amplitude_f64;
    int dynamic_range_bits = kDefaultDynamicRangeBits;
    std::uint64_t height = 0;
    std::uint64_t width = 0;

    std::uint64_t payload_bytes() const;
};

using AnyRaster = std::variant<AmplitudeImage, ComplexImage, TamperMask>;

void write_raster(const AmplitudeImage& image, const std::filesystem::path& path);
void write_raster(const ComplexImage& image, const std::filesystem::path& path);
void write_raster(const TamperMask& mask, const std::filesystem::path& path);

AnyRaster read_raster(const std::filesystem::path& path);
RasterHeader read_raster_header(const std::filesystem::path& path);

// Typed readers; throw FormatError when the file holds a different kind.
AmplitudeImage read_amplitude(const std::filesystem::path& path);
ComplexImage read_complex(const std::filesystem::path& path);
TamperMask read_mask(const std::filesystem::path& path);

/// Binary PGM (P5), 0 -> 0 and 1 -> 255. For visual inspection only.
void write_mask_pgm(const TamperMask& mask, const std::filesystem::path& path);

/// Rounds to integer codes; throws InvalidArgument if any value exceeds 2^bits - 1.
AmplitudeImage quantize(const AmplitudeImage& image);

// ---------------------------------------------------------------------------
// Tiling

struct Tile {
    AmplitudeImage image;
    std::size_t row_offset = 0;
    std::size_t col_offset = 0;
};

struct TileOrigin {
    std::size_t row_offset = 0;
    std::size_t col_offset = 0;
};

/// Tile origins at stride = tile_size - overlap, row-major. Partial trailing tiles are dropped.
std::vector<TileOrigin> tile_origins(std::size_t height, std::size_t width, std::size_t tile_size,
                                     std::size_t overlap);

std::vector<Tile> tile(const AmplitudeImage& image, std::size_t tile_size, std::size_t overlap);

/// Copy of a rectangular window.
AmplitudeImage crop(const AmplitudeImage& image, std::size_t row, std::size_t col,
                    std::size_t height, std::size_t width);

}  // namespace sarfx
