#include "sarfx/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace sarfx {

namespace {

// The FFTW planner is not re-entrant; execution on distinct arrays is.
// FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment,
// so results are bitwise reproducible.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void fft2_inplace(ComplexPlane& data, int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data().data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(data.height()), static_cast<int>(data.width()), ptr,
                                ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

/// Moves bin (r, c) to ((r + sr) mod H, (c + sc) mod W).
ComplexPlane circshift(const ComplexPlane& in, std::size_t sr, std::size_t sc) {
    const std::size_t h = in.height();
    const std::size_t w = in.width();
    ComplexPlane out(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rr = (r + sr) % h;
        for (std::size_t c = 0; c < w; ++c) {
            out(rr, (c + sc) % w) = in(r, c);
        }
    }
    return out;
}

inline std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
    const std::ptrdiff_t period = 2 * n;
    std::ptrdiff_t m = i % period;
    if (m < 0) {
        m += period;
    }
    return m < n ? m : period - 1 - m;
}

}  // namespace

Spectrum::Spectrum(ComplexPlane values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgument("Spectrum: empty plane");
    }
}

ComplexPlane fft2_centered(ComplexPlane data) {
    fft2_inplace(data, FFTW_FORWARD);
    return circshift(data, data.height() / 2, data.width() / 2);
}

ComplexPlane ifft2_centered(ComplexPlane centered) {
    const std::size_t h = centered.height();
    const std::size_t w = centered.width();
    ComplexPlane data = circshift(centered, h - h / 2, w - w / 2);
    fft2_inplace(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(h * w);
    for (auto& v : data.span()) {
        v *= scale;
    }
    return data;
}

void hermitian_symmetrize(ComplexPlane& x) {
    const std::size_t h = x.height();
    const std::size_t w = x.width();
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t mr = mirror_index(r, h);
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t mc = mirror_index(c, w);
            // Visit each unordered pair once; self-mirrored bins become real.
            if (mr * w + mc < r * w + c) {
                continue;
            }
            const Complex a = x(r, c);
            const Complex b = x(mr, mc);
            const double re = (a.real() + b.real()) * 0.5;
            const double im = (a.imag() - b.imag()) * 0.5;
            x(r, c) = {re, im};
            x(mr, mc) = {re, -im};
        }
    }
}

Spectrum forward_dft(const ComplexImage& image) {
    ComplexPlane data(image.height(), image.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = {image.re()[i], image.im()[i]};
    }
    return Spectrum(fft2_centered(std::move(data)));
}

Spectrum forward_dft(const AmplitudeImage& image) {
    ComplexPlane data(image.height(), image.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = {image[i], 0.0};
    }
    auto spec = fft2_centered(std::move(data));
    hermitian_symmetrize(spec);
    return Spectrum(std::move(spec));
}

ComplexImage inverse_dft(const Spectrum& spectrum) {
    const auto data = ifft2_centered(spectrum.values());
    RealPlane re(data.height(), data.width());
    RealPlane im(data.height(), data.width());
    for (std::size_t i = 0; i < data.size(); ++i) {
        re[i] = data[i].real();
        im[i] = data[i].imag();
    }
    return ComplexImage(std::move(re), std::move(im));
}

RealPlane magnitude(const Spectrum& spectrum) {
    RealPlane out(spectrum.height(), spectrum.width());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::abs(spectrum.values()[i]);
    }
    return out;
}

double central_asymmetry(const RealPlane& p) {
    double worst = 0.0;
    for (std::size_t r = 0; r < p.height(); ++r) {
        const std::size_t mr = mirror_index(r, p.height());
        for (std::size_t c = 0; c < p.width(); ++c) {
            worst = std::max(worst, std::abs(p(r, c) - p(mr, mirror_index(c, p.width()))));
        }
    }
    return worst;
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
    if (size % 2 == 0) {
        throw InvalidArgument("gaussian kernel size must be odd");
    }
    if (!(sigma > 0.0)) {
        throw InvalidArgument("gaussian kernel sigma must be positive");
    }
    const auto half = static_cast<std::ptrdiff_t>(size / 2);
    std::vector<double> k(size);
    double sum = 0.0;
    for (std::ptrdiff_t i = -half; i <= half; ++i) {
        const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + half)] = v;
        sum += v;
    }
    for (auto& v : k) {
        v /= sum;
    }
    return k;
}

RealPlane smooth_spectrum(const RealPlane& mag, double sigma, std::size_t kernel_size) {
    const auto kernel = gaussian_kernel(kernel_size, sigma);
    const auto half = static_cast<std::ptrdiff_t>(kernel_size / 2);
    const auto h = static_cast<std::ptrdiff_t>(mag.height());
    const auto w = static_cast<std::ptrdiff_t>(mag.width());

    // The 2D kernel is the outer product of the 1D one, so two 1D passes are exact.
    std::vector<double> line;
    RealPlane tmp(mag.height(), mag.width());
    line.resize(static_cast<std::size_t>(w + 2 * half));
    for (std::ptrdiff_t r = 0; r < h; ++r) {
        for (std::ptrdiff_t i = -half; i < w + half; ++i) {
            line[static_cast<std::size_t>(i + half)] = mag(r, reflect(i, w));
        }
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            const double* src = line.data() + c;
            double acc = 0.0;
            for (std::size_t k = 0; k < kernel_size; ++k) {
                acc += kernel[k] * src[k];
            }
            tmp(r, c) = acc;
        }
    }

    RealPlane out(mag.height(), mag.width());
    line.assign(static_cast<std::size_t>(h + 2 * half), 0.0);
    for (std::ptrdiff_t c = 0; c < w; ++c) {
        for (std::ptrdiff_t i = -half; i < h + half; ++i) {
            line[static_cast<std::size_t>(i + half)] = tmp(reflect(i, h), c);
        }
        for (std::ptrdiff_t r = 0; r < h; ++r) {
            const double* src = line.data() + r;
            double acc = 0.0;
            for (std::size_t k = 0; k < kernel_size; ++k) {
                acc += kernel[k] * src[k];
            }
            out(r, c) = acc;
        }
    }
    return out;
}

RadialProfile azimuthal_profile(const Spectrum& spectrum) {
    const std::size_t h = spectrum.height();
    const std::size_t w = spectrum.width();
    const double r0 = static_cast<double>(spectrum.dc_row());
    const double c0 = static_cast<double>(spectrum.dc_col());
    const double far_r = std::max(r0, static_cast<double>(h - 1) - r0);
    const double far_c = std::max(c0, static_cast<double>(w - 1) - c0);
    const auto nbins = static_cast<std::size_t>(std::lround(std::hypot(far_r, far_c))) + 1;

    RadialProfile p;
    p.values.assign(nbins, 0.0);
    p.counts.assign(nbins, 0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double d = std::hypot(static_cast<double>(r) - r0, static_cast<double>(c) - c0);
            const auto bin = static_cast<std::size_t>(std::lround(d));
            p.values[bin] += std::norm(spectrum(r, c));
            ++p.counts[bin];
        }
    }
    const double scale = static_cast<double>(std::min(h, w));
    p.bin_centers.resize(nbins);
    for (std::size_t b = 0; b < nbins; ++b) {
        if (p.counts[b] > 0) {
            p.values[b] /= static_cast<double>(p.counts[b]);
        }
        p.bin_centers[b] = static_cast<double>(b) / scale;
    }
    return p;
}

}  // namespace sarfx
