#include "sarfx/forgery.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sarfx/resample.hpp"

namespace sarfx {

namespace {

constexpr std::uint32_t kSpliceStream = 0x53504c43;  // "SPLC"
constexpr std::uint32_t kGlobalNoiseStream = 0x474e4f49;

AmplitudeImage clip_nonnegative(RealPlane p, int bits) {
    for (auto& v : p.span()) v = std::max(v, 0.0);
    return AmplitudeImage(std::move(p), bits);
}

struct Box {
    std::size_t x, y, w, h;
    bool overlaps(const Box& o) const {
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }
};

std::size_t draw_origin(CounterRng& rng, std::size_t extent, std::size_t size) {
    return static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(extent - size)));
}

TamperMask full_stencil(std::size_t h, std::size_t w) {
    return TamperMask(Plane<std::uint8_t>(h, w, std::uint8_t{1}));
}

nlohmann::json edit_json(const EditOp& op) {
    return {{"name", op.name()},
            {"kind", to_string(op.kind)},
            {"class", to_string(op.range_class)},
            {"parameter", op.parameter}};
}

}  // namespace

std::string_view to_string(EditKind k) {
    switch (k) {
        case EditKind::none: return "none";
        case EditKind::gaussian_blur: return "blur";
        case EditKind::upscale: return "upscale";
        case EditKind::downscale: return "downscale";
        case EditKind::rotate: return "rotate";
    }
    return "?";
}

std::string_view to_string(RangeClass c) {
    switch (c) {
        case RangeClass::near: return "near";
        case RangeClass::far: return "far";
        case RangeClass::fixed: return "fixed";
    }
    return "?";
}

std::optional<EditKind> parse_edit_kind(std::string_view s) {
    for (auto k : {EditKind::none, EditKind::gaussian_blur, EditKind::upscale, EditKind::downscale, EditKind::rotate})
        if (s == to_string(k)) return k;
    if (s == "gaussian-blur" || s == "gaussian_blur") return EditKind::gaussian_blur;
    return std::nullopt;
}

std::optional<RangeClass> parse_range_class(std::string_view s) {
    for (auto c : {RangeClass::near, RangeClass::far, RangeClass::fixed})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

std::optional<ParameterRange> edit_range(EditKind kind, RangeClass cls) {
    if (cls == RangeClass::fixed) return std::nullopt;
    const bool near = cls == RangeClass::near;
    switch (kind) {
        case EditKind::upscale: return near ? ParameterRange{1.05, 1.5, false} : ParameterRange{1.5, 2.0, true};
        case EditKind::downscale: return near ? ParameterRange{0.65, 0.95, true} : ParameterRange{0.5, 0.65, false};
        case EditKind::rotate: return near ? ParameterRange{5.0, 15.0, false} : ParameterRange{15.0, 45.0, true};
        default: return std::nullopt;
    }
}

EditOp EditOp::sample(EditKind kind, RangeClass cls, CounterRng& rng) {
    if (kind == EditKind::none) return none();
    if (kind == EditKind::gaussian_blur) return {kind, kEditBlurSigma, cls};
    const auto range = edit_range(kind, cls);
    if (!range) throw InvalidArgument("edit has no sampling range for class 'fixed'");
    return {kind, rng.uniform(range->lo, range->hi), cls};
}

std::string EditOp::name() const {
    std::string n(to_string(kind));
    if (kind == EditKind::none || kind == EditKind::gaussian_blur || range_class == RangeClass::fixed) return n;
    return n + "-" + std::string(to_string(range_class));
}

const std::vector<NamedEdit>& local_edit_table() {
    static const std::vector<NamedEdit> table = {
        {"blur", EditKind::gaussian_blur, RangeClass::fixed},
        {"upscale-near", EditKind::upscale, RangeClass::near},
        {"upscale-far", EditKind::upscale, RangeClass::far},
        {"downscale-near", EditKind::downscale, RangeClass::near},
        {"downscale-far", EditKind::downscale, RangeClass::far},
        {"rotate-near", EditKind::rotate, RangeClass::near},
        {"rotate-far", EditKind::rotate, RangeClass::far},
    };
    return table;
}

std::optional<NamedEdit> find_local_edit(std::string_view name) {
    for (const auto& e : local_edit_table())
        if (e.name == name) return e;
    if (name == "none") return NamedEdit{"none", EditKind::none, RangeClass::fixed};
    return std::nullopt;
}

AmplitudeImage edit_donor(const AmplitudeImage& donor, const EditOp& op, std::uint64_t) {
    const int bits = donor.dynamic_range_bits();
    switch (op.kind) {
        case EditKind::none: return donor;
        case EditKind::gaussian_blur:
            if (!(op.parameter > 0)) throw InvalidArgument("blur sigma must be positive");
            return clip_nonnegative(gaussian_blur(donor.values(), op.parameter), bits);
        case EditKind::upscale:
        case EditKind::downscale:
            if (!(op.parameter > 0)) throw InvalidArgument("resize factor must be positive");
            return clip_nonnegative(resize(donor.values(), op.parameter), bits);
        case EditKind::rotate: return clip_nonnegative(rotate(donor.values(), op.parameter), bits);
    }
    throw InvalidArgument("unknown edit kind");
}

TamperMask transform_stencil(const TamperMask& stencil, const EditOp& op) {
    if (op.kind != EditKind::rotate) return stencil;
    RealPlane cover(stencil.height(), stencil.width());
    for (std::size_t i = 0; i < cover.size(); ++i) cover[i] = stencil.values()[i];
    const auto rotated = rotate(cover, op.parameter, RotateCanvas::expand);
    Plane<std::uint8_t> out(rotated.height(), rotated.width());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rotated[i] >= 0.5 ? 1 : 0;
    return TamperMask(std::move(out));
}

std::size_t SpliceSpec::region_width() const {
    if (const auto* r = std::get_if<RectRegion>(&region)) return r->width;
    return std::get<TamperMask>(region).width();
}

std::size_t SpliceSpec::region_height() const {
    if (const auto* r = std::get_if<RectRegion>(&region)) return r->height;
    return std::get<TamperMask>(region).height();
}

bool SpliceSpec::covers(std::size_t dy, std::size_t dx) const {
    if (std::holds_alternative<RectRegion>(region)) return true;
    return std::get<TamperMask>(region)(dy, dx);
}

SpliceResult splice(const AmplitudeImage& target, const AmplitudeImage& edited_donor, const SpliceSpec& spec) {
    const std::size_t h = spec.region_height(), w = spec.region_width();
    if (h == 0 || w == 0) throw InvalidArgument("splice: empty region");
    const auto inside = [&](const PixelPoint& o, const AmplitudeImage& img) {
        return o.x <= img.width() && w <= img.width() - o.x && o.y <= img.height() && h <= img.height() - o.y;
    };
    if (!inside(spec.donor_origin, edited_donor)) throw InvalidArgument("splice: donor region out of bounds");
    if (!inside(spec.target_origin, target)) throw InvalidArgument("splice: target region out of bounds");

    RealPlane out = target.values();
    Plane<std::uint8_t> mask(target.height(), target.width(), std::uint8_t{0});
    for (std::size_t dy = 0; dy < h; ++dy)
        for (std::size_t dx = 0; dx < w; ++dx) {
            if (!spec.covers(dy, dx)) continue;
            const std::size_t ty = spec.target_origin.y + dy, tx = spec.target_origin.x + dx;
            out(ty, tx) = edited_donor(spec.donor_origin.y + dy, spec.donor_origin.x + dx);
            mask(ty, tx) = 1;
        }
    return {AmplitudeImage(std::move(out), target.dynamic_range_bits()), TamperMask(std::move(mask))};
}

namespace {

// Shared core: edit, place and splice one donor region into the target.
RandomSpliceResult splice_core(const AmplitudeImage& target, const AmplitudeImage& donor, std::size_t region_w,
                               std::size_t region_h, const EditOp& op, CounterRng& rng,
                               const SplicePlacement& placement, bool same_image) {
    if (region_w == 0 || region_h == 0) throw InvalidArgument("splice: empty region");
    // Rotation edits a donor patch on an expanded canvas and carries the rotated
    // stencil; the other edits transform the whole donor and cut a rectangle.
    const bool patch_mode = op.kind == EditKind::rotate;
    const AmplitudeImage edited = patch_mode ? donor : edit_donor(donor, op);
    const TamperMask stencil = transform_stencil(full_stencil(region_h, region_w), op);

    if (edited.height() < region_h || edited.width() < region_w || target.height() < stencil.height() ||
        target.width() < stencil.width())
        throw InvalidArgument("splice: images too small for the region");

    PixelPoint donor_origin, target_origin;
    constexpr int kMaxAttempts = 10000;
    int attempt = 0;
    for (;; ++attempt) {
        if (attempt == kMaxAttempts) throw InvalidArgument("splice: no disjoint donor/target regions in a single image");
        donor_origin = placement.donor_origin.value_or(
            PixelPoint{draw_origin(rng, edited.width(), region_w), draw_origin(rng, edited.height(), region_h)});
        target_origin = placement.target_origin.value_or(PixelPoint{draw_origin(rng, target.width(), stencil.width()),
                                                                    draw_origin(rng, target.height(), stencil.height())});
        if (!same_image) break;
        const Box d{donor_origin.x, donor_origin.y, region_w, region_h};
        const Box t{target_origin.x, target_origin.y, stencil.width(), stencil.height()};
        if (!d.overlaps(t)) break;
        if (placement.donor_origin && placement.target_origin)
            throw InvalidArgument("splice: donor and target regions overlap in the same image");
    }

    SpliceResult res;
    if (patch_mode) {
        if (donor_origin.x + region_w > donor.width() || donor_origin.y + region_h > donor.height())
            throw InvalidArgument("splice: donor region out of bounds");
        const auto patch = crop(donor, donor_origin.y, donor_origin.x, region_h, region_w);
        const auto rotated = clip_nonnegative(rotate(patch.values(), op.parameter, RotateCanvas::expand),
                                              donor.dynamic_range_bits());
        res = splice(target, rotated, SpliceSpec{{0, 0}, target_origin, stencil, op});
    } else {
        res = splice(target, edited, SpliceSpec{donor_origin, target_origin, RectRegion{region_w, region_h}, op});
    }

    nlohmann::json prov = {
        {"edit", edit_json(op)},
        {"mode", patch_mode ? "rotated-patch" : "edited-donor"},
        {"donor_origin", {{"x", donor_origin.x}, {"y", donor_origin.y}}},
        {"target_origin", {{"x", target_origin.x}, {"y", target_origin.y}}},
        {"region", {{"width", stencil.width()}, {"height", stencil.height()}, {"area", stencil.popcount()}}},
        {"draw_attempts", attempt + 1},
    };
    return {std::move(res.image), std::move(res.mask), std::move(prov)};
}

}  // namespace

RandomSpliceResult forge_splice(const AmplitudeImage& target, const AmplitudeImage& donor, std::size_t region_width,
                                std::size_t region_height, const EditOp& op, std::uint64_t seed,
                                const SplicePlacement& placement) {
    CounterRng rng(seed, kSpliceStream);
    auto out = splice_core(target, donor, region_width, region_height, op, rng, placement, &target == &donor);
    out.provenance["seed"] = seed;
    return out;
}

RandomSpliceResult random_splice(std::span<const AmplitudeImage> product_tiles, std::size_t region_size,
                                 EditKind kind, RangeClass cls, std::uint64_t seed,
                                 std::optional<std::size_t> target_index) {
    if (product_tiles.empty()) throw InvalidArgument("random_splice: no tiles");
    if (region_size == 0) throw InvalidArgument("random_splice: empty region");
    CounterRng rng(seed, kSpliceStream);
    const EditOp op = EditOp::sample(kind, cls, rng);

    const std::size_t n = product_tiles.size();
    if (target_index && *target_index >= n) throw InvalidArgument("random_splice: target index out of range");
    // The first tile is drawn freely (or fixed), the second among the remaining tiles.
    const auto other_than = [&](std::size_t first) {
        if (n == 1) return first;
        auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 2));
        return k >= first ? k + 1 : k;
    };
    std::size_t donor_idx, target_idx;
    if (target_index) {
        target_idx = *target_index;
        donor_idx = other_than(target_idx);
    } else {
        donor_idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        target_idx = other_than(donor_idx);
    }

    auto out = splice_core(product_tiles[target_idx], product_tiles[donor_idx], region_size, region_size, op, rng, {},
                           donor_idx == target_idx);
    out.provenance["seed"] = seed;
    out.provenance["donor_tile"] = donor_idx;
    out.provenance["target_tile"] = target_idx;
    return out;
}

const std::vector<std::string>& global_edit_table() {
    static const std::vector<std::string> names = {"blur",     "updown-near", "downup-near",
                                                   "updown-far", "downup-far", "gaussian",
                                                   "laplacian", "poisson",    "uniform"};
    return names;
}

GlobalEditOp GlobalEditOp::defaults(std::string_view name) {
    GlobalEditOp op;
    op.name = std::string(name);
    if (name == "blur") {
        op.kind = GlobalEditKind::gaussian_blur;
    } else if (name == "updown-near") {
        op.kind = GlobalEditKind::updownscale;
        op.factors = {1.05, 1 / 1.05};
    } else if (name == "downup-near") {
        op.kind = GlobalEditKind::downupscale;
        op.factors = {1 / 1.05, 1.05};
    } else if (name == "updown-far") {
        op.kind = GlobalEditKind::updownscale;
        op.factors = {1.5, 1 / 1.5};
    } else if (name == "downup-far") {
        op.kind = GlobalEditKind::downupscale;
        op.factors = {1 / 1.5, 1.5};
    } else if (name == "gaussian") {
        op.kind = GlobalEditKind::additive_gaussian;
    } else if (name == "laplacian") {
        op.kind = GlobalEditKind::additive_laplacian;
    } else if (name == "poisson") {
        op.kind = GlobalEditKind::additive_poisson;
    } else if (name == "uniform") {
        op.kind = GlobalEditKind::additive_uniform;
        op.noise = kGlobalUniformHalfWidth;
    } else {
        throw InvalidArgument("unknown global edit '" + std::string(name) + "'");
    }
    return op;
}

AmplitudeImage global_edit(const AmplitudeImage& image, const GlobalEditOp& op, std::uint64_t seed) {
    const double top = image.max_code();
    RealPlane out;
    switch (op.kind) {
        case GlobalEditKind::gaussian_blur: out = gaussian_blur(image.values(), op.sigma); break;
        case GlobalEditKind::updownscale:
        case GlobalEditKind::downupscale: {
            if (!(op.factors.first > 0) || !(op.factors.second > 0))
                throw InvalidArgument("global resize factors must be positive");
            // The second factor is nominal: the way back lands on the original shape.
            out = resize(resize(image.values(), op.factors.first), image.height(), image.width());
            break;
        }
        default: {
            CounterRng rng(seed, kGlobalNoiseStream);
            out = image.values();
            for (auto& v : out.span()) {
                switch (op.kind) {
                    case GlobalEditKind::additive_gaussian: v += rng.normal(0, op.noise); break;
                    case GlobalEditKind::additive_laplacian: v += rng.laplace(0, op.noise); break;
                    case GlobalEditKind::additive_poisson:
                        v += static_cast<double>(rng.poisson(op.noise)) - op.noise;
                        break;
                    case GlobalEditKind::additive_uniform: v += rng.uniform(-op.noise, op.noise); break;
                    default: break;
                }
            }
        }
    }
    for (auto& v : out.span()) v = std::clamp(v, 0.0, top);
    return AmplitudeImage(std::move(out), image.dynamic_range_bits());
}

}  // namespace sarfx
