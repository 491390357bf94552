#include "sarfx/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace sarfx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bin offsets from DC along an axis of length n.
std::vector<double> axis_frequencies(std::size_t n) {
    std::vector<double> f(n);
    const auto c = static_cast<double>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = static_cast<double>(i) - c;
    }
    return f;
}

void require_fit_target(const RealPlane& t) {
    if (t.empty()) {
        throw InvalidArgument("fit target is empty");
    }
    double energy = 0.0;
    for (double v : t.span()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidArgument("fit target must be finite and nonnegative");
        }
        energy += v * v;
    }
    if (std::abs(energy - 1.0) > 1e-8) {
        throw InvalidArgument("fit target must be energy-normalized (sum of squares = 1), got " +
                              std::to_string(energy));
    }
}

struct Marginals {
    std::vector<double> x;  // sum over rows, per column
    std::vector<double> y;  // sum over columns, per row
};

Marginals marginals(const RealPlane& t) {
    Marginals m{std::vector<double>(t.width(), 0.0), std::vector<double>(t.height(), 0.0)};
    for (std::size_t r = 0; r < t.height(); ++r) {
        for (std::size_t c = 0; c < t.width(); ++c) {
            m.x[c] += t(r, c);
            m.y[r] += t(r, c);
        }
    }
    return m;
}

AxisGaussian moment_init(const std::vector<double>& marginal) {
    const auto f = axis_frequencies(marginal.size());
    const double mass = std::accumulate(marginal.begin(), marginal.end(), 0.0);
    AxisGaussian g;
    if (!(mass > 0.0)) {
        throw DegenerateInput("fit target has zero mass");
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        mean += f[i] * marginal[i];
    }
    mean /= mass;
    double var = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        var += (f[i] - mean) * (f[i] - mean) * marginal[i];
    }
    var /= mass;
    g.mean = mean;
    g.sigma = std::max(std::sqrt(var), 0.5);
    return g;
}

/// First |f| (from DC outward) where the symmetrized marginal falls below 5% of its peak.
double cutoff_init(const std::vector<double>& marginal) {
    const std::size_t n = marginal.size();
    const std::size_t c = n / 2;
    const double peak = *std::max_element(marginal.begin(), marginal.end());
    const double nyquist = static_cast<double>(n) / 2.0;
    for (std::size_t d = 1; d <= c; ++d) {
        const double plus = c + d < n ? marginal[c + d] : marginal[c - d];
        const double value = 0.5 * (plus + marginal[c - d]);
        if (value < 0.05 * peak) {
            return std::clamp(static_cast<double>(d) - 0.5, 0.5, nyquist);
        }
    }
    return nyquist;
}

double plane_max(const RealPlane& p) {
    return *std::max_element(p.span().begin(), p.span().end());
}

void require_valid_transfer(const RealPlane& v) {
    if (v.empty()) {
        throw InvalidArgument("transfer function is empty");
    }
    double mx = -kInf;
    for (double x : v.span()) {
        if (!std::isfinite(x) || x < 0.0) {
            throw InvalidArgument("transfer function must be finite and nonnegative");
        }
        mx = std::max(mx, x);
    }
    if (std::abs(mx - 1.0) > 1e-12) {
        throw InvalidArgument("transfer function maximum must be 1");
    }
    if (central_asymmetry(v) > kSymmetryTolerance) {
        throw InvalidArgument("transfer function is not central-symmetric");
    }
}

/// Per-axis symmetrization on the grid: v(i) <- (v(i) + v(-i)) / 2.
std::vector<double> symmetrize_axis(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = 0.5 * (v[i] + v[mirror_index(i, v.size())]);
    }
    return out;
}

RealPlane outer(const std::vector<double>& col_profile_y, const std::vector<double>& row_profile_x,
                double gain) {
    RealPlane out(col_profile_y.size(), row_profile_x.size());
    for (std::size_t r = 0; r < out.height(); ++r) {
        for (std::size_t c = 0; c < out.width(); ++c) {
            out(r, c) = gain * col_profile_y[r] * row_profile_x[c];
        }
    }
    return out;
}

template <typename Axis>
std::vector<double> sample_axis(const Axis& axis, std::size_t n) {
    const auto f = axis_frequencies(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = axis(f[i]);
    }
    return v;
}

}  // namespace

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::gaussian: return "gaussian";
        case Strategy::raised_cosine: return "raised-cosine";
        case Strategy::direct: return "direct";
        case Strategy::known: return "known";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "gaussian") return Strategy::gaussian;
    if (text == "raised-cosine" || text == "raised_cosine") return Strategy::raised_cosine;
    if (text == "direct") return Strategy::direct;
    if (text == "known") return Strategy::known;
    return std::nullopt;
}

double AxisGaussian::operator()(double f) const {
    const double d = f - mean;
    return gain * std::exp(-0.5 * d * d / (sigma * sigma));
}

double AxisRaisedCosine::operator()(double f) const {
    const double a = std::abs(f);
    if (a > cutoff) {
        return 0.0;
    }
    return A - B * std::cos(std::numbers::pi * (a - cutoff) / cutoff);
}

// --- TransferFunction ------------------------------------------------------------

TransferFunction::TransferFunction(RealPlane values, Strategy strategy)
    : values_(std::move(values)), strategy_(strategy) {
    require_valid_transfer(values_);
}

TransferFunction TransferFunction::normalized(RealPlane values, Strategy strategy) {
    if (values.empty()) {
        throw InvalidArgument("transfer function is empty");
    }
    const double mx = plane_max(values);
    if (!(mx > 0.0) || !std::isfinite(mx)) {
        throw DegenerateInput("response has no positive maximum");
    }
    for (auto& v : values.span()) {
        v /= mx;
    }
    return TransferFunction(std::move(values), strategy);
}

// --- spectra -----------------------------------------------------------------------

RealPlane magnitude_spectrum(const ComplexImage& image) {
    return magnitude(forward_dft(image));
}

RealPlane magnitude_spectrum(const AmplitudeImage& image) {
    return magnitude(forward_dft(image));
}

SmoothingParams SmoothingParams::for_size(std::size_t height, std::size_t width) {
    const double d = static_cast<double>(std::min(height, width));
    const double scaled = 601.0 * d / 1024.0;
    SmoothingParams s;
    s.kernel_size = 2 * static_cast<std::size_t>(std::floor(scaled / 2.0)) + 1;
    s.sigma = static_cast<double>(s.kernel_size) / 6.01;
    return s;
}

RealPlane normalize_energy(const RealPlane& plane) {
    double energy = 0.0;
    for (double v : plane.span()) {
        energy += v * v;
    }
    if (!(energy > 0.0)) {
        throw DegenerateInput("cannot energy-normalize an all-zero plane");
    }
    const double scale = 1.0 / std::sqrt(energy);
    RealPlane out = plane;
    for (auto& v : out.span()) {
        v *= scale;
    }
    return out;
}

// --- curve fits --------------------------------------------------------------------

GaussianFitParams fit_gaussian(const RealPlane& target, const LsqOptions& options) {
    require_fit_target(target);
    const std::size_t h = target.height();
    const std::size_t w = target.width();
    const auto fx = axis_frequencies(w);
    const auto fy = axis_frequencies(h);

    const auto m = marginals(target);
    const AxisGaussian ix = moment_init(m.x);
    const AxisGaussian iy = moment_init(m.y);

    // params: gain, mean_x, sigma_x, mean_y, sigma_y
    Eigen::VectorXd p0(5);
    p0 << plane_max(target), ix.mean, ix.sigma, iy.mean, iy.sigma;
    LsqBounds bounds{Eigen::VectorXd(5), Eigen::VectorXd(5)};
    const double wx = static_cast<double>(w);
    const double wy = static_cast<double>(h);
    bounds.lower << 1e-300, -wx / 2, 1e-3, -wy / 2, 1e-3;
    bounds.upper << kInf, wx / 2, 10 * wx, wy / 2, 10 * wy;

    std::vector<double> gx(w), gy(h);
    auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& res, Eigen::MatrixXd* jac) {
        const double k = p[0], mx = p[1], sx = p[2], my = p[3], sy = p[4];
        for (std::size_t c = 0; c < w; ++c) {
            const double d = fx[c] - mx;
            gx[c] = std::exp(-0.5 * d * d / (sx * sx));
        }
        for (std::size_t r = 0; r < h; ++r) {
            const double d = fy[r] - my;
            gy[r] = std::exp(-0.5 * d * d / (sy * sy));
        }
        for (std::size_t r = 0; r < h; ++r) {
            const double dy = fy[r] - my;
            for (std::size_t c = 0; c < w; ++c) {
                const auto i = static_cast<Eigen::Index>(r * w + c);
                const double shape = gx[c] * gy[r];
                const double model = k * shape;
                res[i] = model - target(r, c);
                if (jac) {
                    const double dx = fx[c] - mx;
                    (*jac)(i, 0) = shape;
                    (*jac)(i, 1) = model * dx / (sx * sx);
                    (*jac)(i, 2) = model * dx * dx / (sx * sx * sx);
                    (*jac)(i, 3) = model * dy / (sy * sy);
                    (*jac)(i, 4) = model * dy * dy / (sy * sy * sy);
                }
            }
        }
    };

    const auto fit = levenberg_marquardt(residual, h * w, p0, bounds, options);
    const auto& p = fit.params;
    if (!(p[0] > 0.0 && p[2] > 0.0 && p[4] > 0.0)) {
        throw ConvergenceError("gaussian fit left the admissible parameter region");
    }
    GaussianFitParams out;
    const double g = std::sqrt(p[0]);
    out.x = {g, p[1], p[2]};
    out.y = {g, p[3], p[4]};
    out.residual = fit.cost;
    out.iterations = fit.iterations;
    return out;
}

RaisedCosineFitParams fit_raised_cosine(const RealPlane& target, const LsqOptions& options) {
    require_fit_target(target);
    const std::size_t h = target.height();
    const std::size_t w = target.width();
    const auto fx = axis_frequencies(w);
    const auto fy = axis_frequencies(h);
    const double nyq_x = static_cast<double>(w) / 2.0;
    const double nyq_y = static_cast<double>(h) / 2.0;

    const auto m = marginals(target);
    // params: gain, a_x, cutoff_x, a_y, cutoff_y with A = a, B = 1 - a.
    Eigen::VectorXd p0(5);
    p0 << plane_max(target), 0.5, cutoff_init(m.x), 0.5, cutoff_init(m.y);
    LsqBounds bounds{Eigen::VectorXd(5), Eigen::VectorXd(5)};
    bounds.lower << 1e-300, 1e-6, 0.5, 1e-6, 0.5;
    bounds.upper << kInf, 1.0 - 1e-6, nyq_x, 1.0 - 1e-6, nyq_y;

    struct AxisEval {
        std::vector<double> value, d_a, d_fc;
    };
    auto eval_axis = [](const std::vector<double>& f, double a, double fc, AxisEval& out) {
        const double b = 1.0 - a;
        out.value.resize(f.size());
        out.d_a.resize(f.size());
        out.d_fc.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double af = std::abs(f[i]);
            if (af > fc) {
                out.value[i] = out.d_a[i] = out.d_fc[i] = 0.0;
                continue;
            }
            const double u = std::numbers::pi * (af - fc) / fc;
            const double cu = std::cos(u);
            out.value[i] = a - b * cu;
            out.d_a[i] = 1.0 + cu;
            out.d_fc[i] = -b * std::numbers::pi * af * std::sin(u) / (fc * fc);
        }
    };

    AxisEval ex, ey;
    auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& res, Eigen::MatrixXd* jac) {
        const double k = p[0];
        eval_axis(fx, p[1], p[2], ex);
        eval_axis(fy, p[3], p[4], ey);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                const auto i = static_cast<Eigen::Index>(r * w + c);
                const double shape = ex.value[c] * ey.value[r];
                res[i] = k * shape - target(r, c);
                if (jac) {
                    (*jac)(i, 0) = shape;
                    (*jac)(i, 1) = k * ex.d_a[c] * ey.value[r];
                    (*jac)(i, 2) = k * ex.d_fc[c] * ey.value[r];
                    (*jac)(i, 3) = k * ex.value[c] * ey.d_a[r];
                    (*jac)(i, 4) = k * ex.value[c] * ey.d_fc[r];
                }
            }
        }
    };

    const auto fit = levenberg_marquardt(residual, h * w, p0, bounds, options);
    const auto& p = fit.params;
    RaisedCosineFitParams out;
    out.gain = p[0];
    out.x = {p[1], 1.0 - p[1], p[2]};
    out.y = {p[3], 1.0 - p[3], p[4]};
    out.residual = fit.cost;
    out.iterations = fit.iterations;
    return out;
}

RealPlane evaluate(const GaussianFitParams& params, std::size_t height, std::size_t width) {
    return outer(sample_axis(params.y, height), sample_axis(params.x, width), 1.0);
}

RealPlane evaluate(const RaisedCosineFitParams& params, std::size_t height, std::size_t width) {
    return outer(sample_axis(params.y, height), sample_axis(params.x, width), params.gain);
}

TransferFunction gaussian_response(const GaussianFitParams& params, std::size_t height,
                                   std::size_t width) {
    auto tf = TransferFunction::normalized(
        outer(symmetrize_axis(sample_axis(params.y, height)),
              symmetrize_axis(sample_axis(params.x, width)), 1.0),
        Strategy::gaussian);
    tf.gaussian_fit = params;
    return tf;
}

TransferFunction raised_cosine_response(const RaisedCosineFitParams& params, std::size_t height,
                                        std::size_t width) {
    auto clamp0 = [](std::vector<double> v) {
        for (auto& x : v) {
            x = std::max(x, 0.0);
        }
        return v;
    };
    auto tf = TransferFunction::normalized(
        outer(clamp0(symmetrize_axis(sample_axis(params.y, height))),
              clamp0(symmetrize_axis(sample_axis(params.x, width))), 1.0),
        Strategy::raised_cosine);
    tf.raised_cosine_fit = params;
    return tf;
}

TransferFunction estimate_direct(const RealPlane& fk) {
    bool any = false;
    ComplexPlane spec(fk.height(), fk.width());
    for (std::size_t i = 0; i < fk.size(); ++i) {
        if (!std::isfinite(fk[i]) || fk[i] < 0.0) {
            throw InvalidArgument("direct estimation needs a finite nonnegative magnitude");
        }
        any = any || fk[i] > 0.0;
        spec[i] = {fk[i], 0.0};
    }
    if (!any) {
        throw DegenerateInput("direct estimation of an all-zero spectrum");
    }
    ComplexPlane h = ifft2_centered(std::move(spec));
    for (auto& v : h.span()) {
        v = {v.real(), 0.0};
    }
    ComplexPlane hd = fft2_centered(std::move(h));
    hermitian_symmetrize(hd);
    RealPlane mag(fk.height(), fk.width());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag[i] = std::abs(hd[i]);
    }
    return TransferFunction::normalized(std::move(mag), Strategy::direct);
}

// --- orchestration -------------------------------------------------------------------

namespace {

TransferFunction estimate_single(const EstimationSource& source, Strategy strategy,
                                 const SmoothingParams& smoothing, const LsqOptions& options) {
    const RealPlane mag = std::visit([](const auto& img) { return magnitude_spectrum(img); }, source);
    const RealPlane fk = smooth_spectrum(mag, smoothing.sigma, smoothing.kernel_size);
    switch (strategy) {
        case Strategy::direct:
            return estimate_direct(fk);
        case Strategy::gaussian:
            return gaussian_response(fit_gaussian(normalize_energy(fk), options), fk.height(),
                                     fk.width());
        case Strategy::raised_cosine:
            return raised_cosine_response(fit_raised_cosine(normalize_energy(fk), options),
                                          fk.height(), fk.width());
        case Strategy::known:
            break;
    }
    throw InvalidArgument("strategy 'known' requires a supplied transfer function");
}

}  // namespace

TransferFunction estimate_transfer_function(std::span<const EstimationSource> sources,
                                            Strategy strategy,
                                            std::optional<SmoothingParams> smoothing,
                                            const LsqOptions& options) {
    if (sources.empty()) {
        throw InvalidArgument("estimation needs at least one source");
    }
    if (strategy == Strategy::known) {
        throw InvalidArgument("strategy 'known' requires a supplied transfer function");
    }
    auto dims = [](const EstimationSource& s) {
        return std::visit([](const auto& img) { return std::pair{img.height(), img.width()}; }, s);
    };
    const auto [h, w] = dims(sources.front());
    for (const auto& s : sources) {
        if (dims(s) != std::pair{h, w}) {
            throw DimensionError("estimation sources differ in shape");
        }
        if (std::holds_alternative<AmplitudeImage>(s) && strategy != Strategy::direct) {
            throw InvalidArgument(
                "curve-fit strategies are not supported on amplitude-only sources: the amplitude "
                "spectrum lacks the system's high-frequency support and the fit does not converge; "
                "use the direct strategy");
        }
    }
    const SmoothingParams smooth = smoothing.value_or(SmoothingParams::for_size(h, w));

    if (sources.size() == 1) {
        return estimate_single(sources.front(), strategy, smooth, options);
    }
    RealPlane sum(h, w, 0.0);
    std::optional<TransferFunction> first;
    for (const auto& s : sources) {
        auto tf = estimate_single(s, strategy, smooth, options);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += tf.values()[i];
        }
        if (!first) {
            first = std::move(tf);
        }
    }
    const double inv = 1.0 / static_cast<double>(sources.size());
    for (auto& v : sum.span()) {
        v *= inv;
    }
    auto out = TransferFunction::normalized(std::move(sum), strategy);
    // Fit parameters of the first source are kept as representative metadata.
    out.gaussian_fit = first->gaussian_fit;
    out.raised_cosine_fit = first->raised_cosine_fit;
    return out;
}

TransferFunction estimate_transfer_function(const TransferFunction& known) {
    TransferFunction out(known.values(), Strategy::known);
    out.gaussian_fit = known.gaussian_fit;
    out.raised_cosine_fit = known.raised_cosine_fit;
    return out;
}

double normalized_cross_correlation(const RealPlane& a, const RealPlane& b) {
    if (!a.same_shape(b) || a.empty()) {
        throw DimensionError("correlation needs equally shaped, non-empty planes");
    }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.span().begin(), a.span().end(), 0.0) / n;
    const double mb = std::accumulate(b.span().begin(), b.span().end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0 && sbb > 0.0)) {
        throw DegenerateInput("correlation of a constant plane");
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace sarfx
