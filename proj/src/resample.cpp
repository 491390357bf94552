#include "sarfx/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sarfx/spectral.hpp"

namespace sarfx {

namespace {

constexpr double kSnap = 1e-9;

double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < kSnap ? r : x;
}

struct Taps {
    std::array<std::ptrdiff_t, 4> index;
    std::array<double, 4> weight;
};

Taps taps_at(double x) {
    const double base = std::floor(x);
    const double t = x - base;
    const auto i0 = static_cast<std::ptrdiff_t>(base);
    return {{i0 - 1, i0, i0 + 1, i0 + 2},
            {cubic_weight(1 + t), cubic_weight(t), cubic_weight(1 - t), cubic_weight(2 - t)}};
}

// Precomputed 1D resampling: output sample i reads clamp(index) with weights.
std::vector<Taps> axis_taps(std::size_t in, std::size_t out) {
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    std::vector<Taps> taps(out);
    const auto last = static_cast<std::ptrdiff_t>(in) - 1;
    for (std::size_t i = 0; i < out; ++i) {
        taps[i] = taps_at(snap((static_cast<double>(i) + 0.5) * scale - 0.5));
        for (auto& k : taps[i].index) k = std::clamp<std::ptrdiff_t>(k, 0, last);
    }
    return taps;
}

double sample_zero_border(const RealPlane& p, double y, double x) {
    const Taps ty = taps_at(y), tx = taps_at(x);
    const auto h = static_cast<std::ptrdiff_t>(p.height()), w = static_cast<std::ptrdiff_t>(p.width());
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        const auto r = ty.index[a];
        if (r < 0 || r >= h || ty.weight[a] == 0.0) continue;
        double row = 0;
        for (int b = 0; b < 4; ++b) {
            const auto c = tx.index[b];
            if (c < 0 || c >= w) continue;
            row += tx.weight[b] * p(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
        acc += ty.weight[a] * row;
    }
    return acc;
}

}  // namespace

double cubic_weight(double t) noexcept {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1) return ((a + 2) * t - (a + 3)) * t * t + 1;
    if (t < 2) return ((a * t - 5 * a) * t + 8 * a) * t - 4 * a;
    return 0.0;
}

RealPlane resize(const RealPlane& plane, std::size_t out_height, std::size_t out_width) {
    if (plane.empty()) throw InvalidArgument("resize: empty input");
    if (out_height == 0 || out_width == 0) throw InvalidArgument("resize: empty output shape");
    const auto ty = axis_taps(plane.height(), out_height);
    const auto tx = axis_taps(plane.width(), out_width);

    RealPlane horiz(plane.height(), out_width);
    for (std::size_t r = 0; r < plane.height(); ++r)
        for (std::size_t c = 0; c < out_width; ++c) {
            double acc = 0;
            for (int k = 0; k < 4; ++k)
                acc += tx[c].weight[k] * plane(r, static_cast<std::size_t>(tx[c].index[k]));
            horiz(r, c) = acc;
        }
    RealPlane out(out_height, out_width);
    for (std::size_t r = 0; r < out_height; ++r)
        for (std::size_t c = 0; c < out_width; ++c) {
            double acc = 0;
            for (int k = 0; k < 4; ++k)
                acc += ty[r].weight[k] * horiz(static_cast<std::size_t>(ty[r].index[k]), c);
            out(r, c) = acc;
        }
    return out;
}

RealPlane resize(const RealPlane& plane, double factor) {
    if (!(factor > 0) || !std::isfinite(factor)) throw InvalidArgument("resize: factor must be positive");
    const auto scaled = [factor](std::size_t n) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(n) * factor)));
    };
    return resize(plane, scaled(plane.height()), scaled(plane.width()));
}

RealPlane rotate(const RealPlane& plane, double degrees, RotateCanvas canvas) {
    if (plane.empty()) throw InvalidArgument("rotate: empty input");
    if (!std::isfinite(degrees)) throw InvalidArgument("rotate: angle must be finite");
    const double th = degrees * std::numbers::pi / 180.0;
    const double cs = snap(std::cos(th)), sn = snap(std::sin(th));
    const double h = static_cast<double>(plane.height()), w = static_cast<double>(plane.width());

    std::size_t oh = plane.height(), ow = plane.width();
    if (canvas == RotateCanvas::expand) {
        ow = static_cast<std::size_t>(std::ceil(w * std::abs(cs) + h * std::abs(sn) - kSnap));
        oh = static_cast<std::size_t>(std::ceil(w * std::abs(sn) + h * std::abs(cs) - kSnap));
    }
    const double icx = (w - 1) / 2, icy = (h - 1) / 2;
    const double ocx = (static_cast<double>(ow) - 1) / 2, ocy = (static_cast<double>(oh) - 1) / 2;

    RealPlane out(oh, ow);
    for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c) {
            const double dx = static_cast<double>(c) - ocx, dy = static_cast<double>(r) - ocy;
            const double xs = snap(cs * dx + sn * dy + icx);
            const double ys = snap(-sn * dx + cs * dy + icy);
            out(r, c) = sample_zero_border(plane, ys, xs);
        }
    return out;
}

RealPlane gaussian_blur(const RealPlane& plane, double sigma) {
    if (!(sigma > 0)) throw InvalidArgument("gaussian_blur: sigma must be positive");
    const auto radius = static_cast<std::size_t>(std::ceil(4 * sigma));
    return smooth_spectrum(plane, sigma, 2 * radius + 1);
}

}  // namespace sarfx
