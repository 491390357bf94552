#include "sarfx/raster.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace sarfx {

static_assert(std::endian::native == std::endian::little,
              "the SARF container is written with native little-endian stores");

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string(what) + ": non-finite value");
        }
    }
}

void require_nonempty(std::size_t h, std::size_t w, const char* what) {
    if (h == 0 || w == 0) {
        throw InvalidArgument(std::string(what) + ": dimensions must be at least 1x1");
    }
}

template <typename T>
void put_le(std::array<char, kRasterHeaderSize>& buf, std::size_t at, T value) {
    std::memcpy(buf.data() + at, &value, sizeof(T));
}

template <typename T>
T get_le(const std::array<char, kRasterHeaderSize>& buf, std::size_t at) {
    T value;
    std::memcpy(&value, buf.data() + at, sizeof(T));
    return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open for writing: " + path.string());
    }
    return out;
}

void write_header(std::ofstream& out, const RasterHeader& h) {
    std::array<char, kRasterHeaderSize> buf{};
    std::memcpy(buf.data(), "SARF", 4);
    buf[4] = static_cast<char>(h.kind);
    buf[5] = static_cast<char>(h.dynamic_range_bits);
    put_le<std::uint64_t>(buf, 16, h.height);
    put_le<std::uint64_t>(buf, 24, h.width);
    out.write(buf.data(), buf.size());
}

template <typename T>
void write_payload(std::ofstream& out, std::span<const T> values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

RasterHeader parse_header(std::istream& in, const std::filesystem::path& path) {
    std::array<char, kRasterHeaderSize> buf{};
    in.read(buf.data(), buf.size());
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw FormatError("truncated header: " + path.string());
    }
    if (std::memcmp(buf.data(), "SARF", 4) != 0) {
        throw FormatError("bad magic: " + path.string());
    }
    RasterHeader h;
    auto kind = static_cast<std::uint8_t>(buf[4]);
    if (kind < 1 || kind > 3) {
        throw FormatError("unknown raster kind " + std::to_string(kind));
    }
    h.kind = static_cast<RasterKind>(kind);
    h.dynamic_range_bits = static_cast<std::uint8_t>(buf[5]);
    if (h.dynamic_range_bits < 1 || h.dynamic_range_bits > 63) {
        throw FormatError("dynamic range bits out of range");
    }
    h.height = get_le<std::uint64_t>(buf, 16);
    h.width = get_le<std::uint64_t>(buf, 24);
    if (h.height == 0 || h.width == 0) {
        throw FormatError("zero raster dimension");
    }
    if (h.height > (1ull << 31) || h.width > (1ull << 31)) {
        throw FormatError("raster dimension implausibly large");
    }
    return h;
}

}  // namespace

// --- AmplitudeImage ----------------------------------------------------------

AmplitudeImage::AmplitudeImage(RealPlane values, int dynamic_range_bits)
    : values_(std::move(values)), bits_(dynamic_range_bits) {
    require_nonempty(values_.height(), values_.width(), "AmplitudeImage");
    if (bits_ < 1 || bits_ > 63) {
        throw InvalidArgument("AmplitudeImage: dynamic range bits must be in [1, 63]");
    }
    for (double v : values_.span()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidArgument("AmplitudeImage: values must be finite and nonnegative");
        }
    }
}

AmplitudeImage::AmplitudeImage(std::size_t height, std::size_t width, double fill,
                               int dynamic_range_bits)
    : AmplitudeImage(RealPlane(height, width, fill), dynamic_range_bits) {}

double AmplitudeImage::max_code() const noexcept {
    return std::ldexp(1.0, bits_) - 1.0;
}

// --- ComplexImage --------------------------------------------------------------

ComplexImage::ComplexImage(RealPlane re, RealPlane im) : re_(std::move(re)), im_(std::move(im)) {
    require_nonempty(re_.height(), re_.width(), "ComplexImage");
    if (!re_.same_shape(im_)) {
        throw DimensionError("ComplexImage: real and imaginary planes differ in shape");
    }
    require_finite(re_.span(), "ComplexImage");
    require_finite(im_.span(), "ComplexImage");
}

AmplitudeImage ComplexImage::amplitude(int dynamic_range_bits) const {
    RealPlane out(height(), width());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = std::hypot(re_[i], im_[i]);
    }
    return AmplitudeImage(std::move(out), dynamic_range_bits);
}

ComplexImage ComplexImage::from_real(const AmplitudeImage& amp) {
    return ComplexImage(amp.values(), RealPlane(amp.height(), amp.width(), 0.0));
}

// --- TamperMask ----------------------------------------------------------------

TamperMask::TamperMask(Plane<std::uint8_t> values) : values_(std::move(values)) {
    require_nonempty(values_.height(), values_.width(), "TamperMask");
    for (auto v : values_.span()) {
        if (v > 1) {
            throw InvalidArgument("TamperMask: values must be 0 or 1");
        }
    }
}

TamperMask::TamperMask(std::size_t height, std::size_t width)
    : TamperMask(Plane<std::uint8_t>(height, width, 0)) {}

std::size_t TamperMask::popcount() const noexcept {
    std::size_t n = 0;
    for (auto v : values_.span()) {
        n += v;
    }
    return n;
}

// --- container -----------------------------------------------------------------

std::uint64_t RasterHeader::payload_bytes() const {
    const std::uint64_t n = height * width;
    switch (kind) {
        case RasterKind::amplitude_f64: return n * 8;
        case RasterKind::complex_f64: return n * 16;
        case RasterKind::mask_u8: return n;
    }
    return 0;
}

void write_raster(const AmplitudeImage& image, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_header(out, {RasterKind::amplitude_f64, image.dynamic_range_bits(), image.height(),
                       image.width()});
    write_payload(out, image.values().span());
    finish(out, path);
}

void write_raster(const ComplexImage& image, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_header(out, {RasterKind::complex_f64, kDefaultDynamicRangeBits, image.height(),
                       image.width()});
    write_payload(out, image.re().span());
    write_payload(out, image.im().span());
    finish(out, path);
}

void write_raster(const TamperMask& mask, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_header(out, {RasterKind::mask_u8, 1, mask.height(), mask.width()});
    write_payload(out, mask.values().span());
    finish(out, path);
}

RasterHeader read_raster_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open: " + path.string());
    }
    return parse_header(in, path);
}

AnyRaster read_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open: " + path.string());
    }
    const RasterHeader h = parse_header(in, path);

    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec) {
        throw Error("cannot stat: " + path.string());
    }
    if (file_size - kRasterHeaderSize != h.payload_bytes()) {
        throw FormatError("payload size mismatch in " + path.string() + ": header declares " +
                          std::to_string(h.payload_bytes()) + " bytes, file holds " +
                          std::to_string(file_size - kRasterHeaderSize));
    }

    const std::size_t n = h.height * h.width;
    auto read_doubles = [&](std::size_t count) {
        std::vector<double> v(count);
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * 8));
        if (!in) {
            throw FormatError("short read: " + path.string());
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw FormatError("non-finite value in payload: " + path.string());
            }
        }
        return v;
    };

    try {
        switch (h.kind) {
            case RasterKind::amplitude_f64:
                return AmplitudeImage(RealPlane(h.height, h.width, read_doubles(n)),
                                      h.dynamic_range_bits);
            case RasterKind::complex_f64: {
                RealPlane re(h.height, h.width, read_doubles(n));
                RealPlane im(h.height, h.width, read_doubles(n));
                return ComplexImage(std::move(re), std::move(im));
            }
            case RasterKind::mask_u8: {
                std::vector<std::uint8_t> v(n);
                in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n));
                if (!in) {
                    throw FormatError("short read: " + path.string());
                }
                return TamperMask(Plane<std::uint8_t>(h.height, h.width, std::move(v)));
            }
        }
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("payload violates type invariant: ") + e.what());
    }
    throw FormatError("unreachable raster kind");
}

namespace {
template <typename T>
T read_as(const std::filesystem::path& path, const char* want) {
    auto any = read_raster(path);
    if (auto* p = std::get_if<T>(&any)) {
        return std::move(*p);
    }
    throw FormatError(path.string() + " does not hold " + want);
}
}  // namespace

AmplitudeImage read_amplitude(const std::filesystem::path& path) {
    return read_as<AmplitudeImage>(path, "an amplitude raster");
}
ComplexImage read_complex(const std::filesystem::path& path) {
    return read_as<ComplexImage>(path, "a complex raster");
}
TamperMask read_mask(const std::filesystem::path& path) {
    return read_as<TamperMask>(path, "a mask raster");
}

void write_mask_pgm(const TamperMask& mask, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    std::vector<char> row(mask.width());
    for (std::size_t r = 0; r < mask.height(); ++r) {
        for (std::size_t c = 0; c < mask.width(); ++c) {
            row[c] = mask(r, c) ? static_cast<char>(255) : 0;
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    finish(out, path);
}

AmplitudeImage quantize(const AmplitudeImage& image) {
    const double top = image.max_code();
    RealPlane out(image.height(), image.width());
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double q = std::round(image[i]);
        if (q > top) {
            throw InvalidArgument("value exceeds the declared dynamic range");
        }
        out[i] = q;
    }
    return AmplitudeImage(std::move(out), image.dynamic_range_bits());
}

// --- tiling --------------------------------------------------------------------

std::vector<TileOrigin> tile_origins(std::size_t height, std::size_t width, std::size_t tile_size,
                                     std::size_t overlap) {
    if (tile_size == 0) {
        throw InvalidArgument("tile size must be positive");
    }
    if (tile_size > height || tile_size > width) {
        throw InvalidArgument("tile larger than image");
    }
    if (overlap >= tile_size) {
        throw InvalidArgument("overlap must be smaller than the tile size");
    }
    const std::size_t stride = tile_size - overlap;
    const std::size_t rows = (height - tile_size) / stride + 1;
    const std::size_t cols = (width - tile_size) / stride + 1;
    std::vector<TileOrigin> origins;
    origins.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            origins.push_back({i * stride, j * stride});
        }
    }
    return origins;
}

AmplitudeImage crop(const AmplitudeImage& image, std::size_t row, std::size_t col,
                    std::size_t height, std::size_t width) {
    if (row + height > image.height() || col + width > image.width()) {
        throw DimensionError("crop window exceeds image bounds");
    }
    RealPlane out(height, width);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            out(r, c) = image(row + r, col + c);
        }
    }
    return AmplitudeImage(std::move(out), image.dynamic_range_bits());
}

std::vector<Tile> tile(const AmplitudeImage& image, std::size_t tile_size, std::size_t overlap) {
    std::vector<Tile> tiles;
    for (const auto& o : tile_origins(image.height(), image.width(), tile_size, overlap)) {
        tiles.push_back({crop(image, o.row_offset, o.col_offset, tile_size, tile_size),
                         o.row_offset, o.col_offset});
    }
    return tiles;
}

}  // namespace sarfx
