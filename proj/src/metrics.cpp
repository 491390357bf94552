#include "sarfx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sarfx/spectral.hpp"

namespace sarfx {

namespace {

// Separable correlation keeping only fully contained windows.
RealPlane filter_valid(const RealPlane& p, const std::vector<double>& k) {
    const std::size_t n = k.size();
    const std::size_t oh = p.height() - n + 1, ow = p.width() - n + 1;
    RealPlane tmp(p.height(), ow);
    for (std::size_t r = 0; r < p.height(); ++r)
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += k[j] * p(r, c + j);
            tmp(r, c) = acc;
        }
    RealPlane out(oh, ow);
    for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += k[j] * tmp(r + j, c);
            out(r, c) = acc;
        }
    return out;
}

RealPlane box_decimate(const RealPlane& p) {
    RealPlane out(p.height() / 2, p.width() / 2);
    for (std::size_t r = 0; r < out.height(); ++r)
        for (std::size_t c = 0; c < out.width(); ++c)
            out(r, c) = 0.25 * (p(2 * r, 2 * c) + p(2 * r, 2 * c + 1) + p(2 * r + 1, 2 * c) + p(2 * r + 1, 2 * c + 1));
    return out;
}

void check_pair(const RealPlane& a, const RealPlane& b, double dynamic_range, const SsimOptions& o) {
    if (!a.same_shape(b)) throw DimensionError("ssim: images differ in shape");
    if (a.height() < o.window || a.width() < o.window) throw DimensionError("ssim: image smaller than the window");
    if (!(dynamic_range > 0)) throw InvalidArgument("ssim: dynamic range must be positive");
    if (o.window % 2 == 0) throw InvalidArgument("ssim: window size must be odd");
}

}  // namespace

SsimComponents ssim_components(const RealPlane& a, const RealPlane& b, double dynamic_range, const SsimOptions& o) {
    check_pair(a, b, dynamic_range, o);
    const auto k = gaussian_kernel(o.window, o.sigma);
    const double c1 = (o.k1 * dynamic_range) * (o.k1 * dynamic_range);
    const double c2 = (o.k2 * dynamic_range) * (o.k2 * dynamic_range);

    // Second moments on data shifted by a common offset to limit cancellation.
    const double shift = std::accumulate(a.span().begin(), a.span().end(), 0.0) / double(a.size());
    RealPlane sa(a.height(), a.width()), sb(a.height(), a.width());
    RealPlane aa(a.height(), a.width()), bb(a.height(), a.width()), ab(a.height(), a.width());
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa[i] = a[i] - shift;
        sb[i] = b[i] - shift;
        aa[i] = sa[i] * sa[i];
        bb[i] = sb[i] * sb[i];
        ab[i] = sa[i] * sb[i];
    }
    const auto mu_a = filter_valid(sa, k), mu_b = filter_valid(sb, k);
    const auto e_aa = filter_valid(aa, k), e_bb = filter_valid(bb, k), e_ab = filter_valid(ab, k);

    double sum_ssim = 0, sum_cs = 0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i] + shift, mb = mu_b[i] + shift;
        const double va = e_aa[i] - mu_a[i] * mu_a[i];
        const double vb = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        const double cs = (2 * cov + c2) / (va + vb + c2);
        const double l = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        sum_ssim += l * cs;
        sum_cs += cs;
    }
    const double n = double(mu_a.size());
    return {sum_ssim / n, sum_cs / n};
}

double ssim(const AmplitudeImage& a, const AmplitudeImage& b, double dynamic_range, const SsimOptions& options) {
    return ssim_components(a.values(), b.values(), dynamic_range, options).ssim;
}

MsSsimResult ms_ssim(const AmplitudeImage& a, const AmplitudeImage& b, double dynamic_range,
                     const SsimOptions& options) {
    if (!a.values().same_shape(b.values())) throw DimensionError("ms_ssim: images differ in shape");
    std::size_t scales = 0;
    for (std::size_t d = std::min(a.height(), a.width()); scales < kMsSsimWeights.size() && d >= options.window;
         d /= 2)
        ++scales;
    if (scales == 0) throw DimensionError("ms_ssim: image smaller than the window at every scale");

    double wsum = 0;
    for (std::size_t j = 0; j < scales; ++j) wsum += kMsSsimWeights[j];

    RealPlane pa = a.values(), pb = b.values();
    double value = 1.0;
    for (std::size_t j = 0; j < scales; ++j) {
        const auto comp = ssim_components(pa, pb, dynamic_range, options);
        const double term = j + 1 == scales ? comp.ssim : comp.cs;
        value *= std::pow(std::max(term, 0.0), kMsSsimWeights[j] / wsum);
        if (j + 1 < scales) {
            pa = box_decimate(pa);
            pb = box_decimate(pb);
        }
    }
    return {value, scales};
}

double enl(const AmplitudeImage& image, const std::optional<TamperMask>& region) {
    if (region && (region->height() != image.height() || region->width() != image.width()))
        throw DimensionError("enl: region shape differs from the image");
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < image.size(); ++i)
        if (!region || region->values()[i]) sum += image[i], ++n;
    if (n < 2) throw DegenerateInput("enl: region has fewer than two pixels");
    const double mean = sum / double(n);
    double ss = 0;
    for (std::size_t i = 0; i < image.size(); ++i)
        if (!region || region->values()[i]) ss += (image[i] - mean) * (image[i] - mean);
    const double var = ss / double(n);
    if (!(var > 0)) throw DegenerateInput("enl: region has zero variance");
    return mean * mean / var;
}

double delta_enl(const AmplitudeImage& attacked, const AmplitudeImage& pristine, const std::optional<TamperMask>& region) {
    const double ea = enl(attacked, region), ep = enl(pristine, region);
    return 100.0 * std::abs(ea - ep) / ep;
}

AucResult auc_roc(const RealPlane& fingerprint, const TamperMask& mask) {
    if (fingerprint.height() != mask.height() || fingerprint.width() != mask.width())
        throw DimensionError("auc: fingerprint and mask differ in shape");
    const std::size_t n = fingerprint.size();
    for (double v : fingerprint.span())
        if (!std::isfinite(v)) throw InvalidArgument("auc: fingerprint has non-finite values");
    const std::size_t pos = mask.popcount(), neg = n - pos;
    if (pos == 0 || neg == 0) throw DegenerateInput("auc: mask has a single class");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return fingerprint[x] < fingerprint[y]; });
    // Sum of midranks over positives.
    double rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && fingerprint[order[j]] == fingerprint[order[i]]) ++j;
        const double midrank = 0.5 * double(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (mask.values()[order[k]]) rank_sum += midrank;
        i = j;
    }
    const double p = double(pos), q = double(neg);
    const double raw = (rank_sum - p * (p + 1) / 2) / (p * q);
    return {raw, std::max(raw, 1 - raw), raw < 0.5};
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json j = {{"ssim", ssim},
                        {"msssim", msssim},
                        {"msssim_scales", msssim_scales},
                        {"enl_source", enl_source},
                        {"enl_reference", enl_reference},
                        {"delta_enl_abs_rel", delta_enl_abs_rel},
                        {"delta_enl_unit", "percent"}};
    if (auc) {
        j["auc"] = auc->max_polarity;
        j["auc_raw"] = auc->raw;
        j["auc_polarity"] = "max";
        j["auc_flipped"] = auc->flipped;
    }
    return j;
}

MetricReport evaluate_metrics(const AmplitudeImage& source, const AmplitudeImage& reference, double dynamic_range,
                              const std::optional<TamperMask>& enl_region) {
    MetricReport r;
    r.ssim = ssim(source, reference, dynamic_range);
    const auto ms = ms_ssim(source, reference, dynamic_range);
    r.msssim = ms.value;
    r.msssim_scales = ms.scales;
    r.enl_source = enl(source, enl_region);
    r.enl_reference = enl(reference, enl_region);
    r.delta_enl_abs_rel = 100.0 * std::abs(r.enl_source - r.enl_reference) / r.enl_reference;
    return r;
}

}  // namespace sarfx
