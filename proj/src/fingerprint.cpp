#include "sarfx/fingerprint.hpp"

#include <algorithm>
#include <cmath>

namespace sarfx {

namespace {

std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    while (i < 0 || i >= m) i = i < 0 ? -i - 1 : 2 * m - i - 1;
    return static_cast<std::size_t>(i);
}

RealPlane box_mean(const RealPlane& p, std::size_t size) {
    const auto half = static_cast<std::ptrdiff_t>(size / 2);
    const double inv = 1.0 / static_cast<double>(size);
    RealPlane tmp(p.height(), p.width()), out(p.height(), p.width());
    for (std::size_t r = 0; r < p.height(); ++r)
        for (std::size_t c = 0; c < p.width(); ++c) {
            double acc = 0;
            for (std::ptrdiff_t k = -half; k <= half; ++k) acc += p(r, mirror(static_cast<std::ptrdiff_t>(c) + k, p.width()));
            tmp(r, c) = acc * inv;
        }
    for (std::size_t r = 0; r < p.height(); ++r)
        for (std::size_t c = 0; c < p.width(); ++c) {
            double acc = 0;
            for (std::ptrdiff_t k = -half; k <= half; ++k) acc += tmp(mirror(static_cast<std::ptrdiff_t>(r) + k, p.height()), c);
            out(r, c) = acc * inv;
        }
    return out;
}

}  // namespace

RealPlane residual_variance_fingerprint(const AmplitudeImage& image, std::size_t window) {
    if (window == 0 || window % 2 == 0) throw InvalidArgument("fingerprint window must be odd");
    if (image.size() == 0) throw InvalidArgument("fingerprint of an empty image");
    RealPlane logp(image.height(), image.width());
    for (std::size_t i = 0; i < logp.size(); ++i) logp[i] = std::log1p(image[i]);
    const auto smooth = box_mean(logp, 3);
    RealPlane res(logp.height(), logp.width()), sq(logp.height(), logp.width());
    for (std::size_t i = 0; i < res.size(); ++i) {
        res[i] = logp[i] - smooth[i];
        sq[i] = res[i] * res[i];
    }
    const auto m1 = box_mean(res, window), m2 = box_mean(sq, window);
    RealPlane out(res.height(), res.width());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, m2[i] - m1[i] * m1[i]);
    return out;
}

RealPlane compute_fingerprint(const std::string& provider, const AmplitudeImage& image) {
    if (provider == kResidualVarianceFingerprint) return residual_variance_fingerprint(image);
    throw InvalidArgument("unknown fingerprint provider '" + provider + "'");
}

std::vector<std::string> fingerprint_providers() { return {kResidualVarianceFingerprint}; }

}  // namespace sarfx
