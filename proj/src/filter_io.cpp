#include "sarfx/filter_io.hpp"

#include <fstream>

namespace sarfx {

std::filesystem::path sidecar_path(const std::filesystem::path& raster_path) {
    auto p = raster_path;
    p += ".json";
    return p;
}

nlohmann::json to_json(const TransferFunction& tf, const std::optional<SmoothingParams>& smoothing) {
    nlohmann::json j = {{"strategy", to_string(tf.strategy())}, {"height", tf.height()}, {"width", tf.width()}};
    if (smoothing) j["smoothing"] = {{"sigma", smoothing->sigma}, {"kernel_size", smoothing->kernel_size}};
    if (tf.gaussian_fit) {
        const auto& g = *tf.gaussian_fit;
        const auto axis = [](const AxisGaussian& a) {
            return nlohmann::json{{"gain", a.gain}, {"mean", a.mean}, {"sigma", a.sigma}};
        };
        j["gaussian_fit"] = {{"x", axis(g.x)}, {"y", axis(g.y)}, {"residual", g.residual}, {"iterations", g.iterations}};
    }
    if (tf.raised_cosine_fit) {
        const auto& r = *tf.raised_cosine_fit;
        const auto axis = [](const AxisRaisedCosine& a) {
            return nlohmann::json{{"A", a.A}, {"B", a.B}, {"cutoff", a.cutoff}};
        };
        j["raised_cosine_fit"] = {{"x", axis(r.x)},
                                  {"y", axis(r.y)},
                                  {"gain", r.gain},
                                  {"residual", r.residual},
                                  {"iterations", r.iterations}};
    }
    return j;
}

void write_transfer_function(const TransferFunction& tf, const std::filesystem::path& path,
                             const std::optional<SmoothingParams>& smoothing) {
    write_raster(AmplitudeImage(tf.values()), path);
    std::ofstream out(sidecar_path(path));
    if (!out) throw Error("cannot write " + sidecar_path(path).string());
    out << to_json(tf, smoothing).dump(2) << '\n';
}

TransferFunction read_transfer_function(const std::filesystem::path& path) {
    const auto values = read_amplitude(path).values();
    Strategy strategy = Strategy::known;
    if (std::ifstream in(sidecar_path(path)); in) {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("malformed transfer-function sidecar: " + std::string(e.what()));
        }
        if (j.contains("strategy")) {
            const auto s = parse_strategy(j["strategy"].get<std::string>());
            if (!s) throw FormatError("unknown strategy in transfer-function sidecar");
            strategy = *s;
        }
    }
    return TransferFunction(values, strategy);
}

EstimationSource read_estimation_source(const std::filesystem::path& path) {
    auto raster = read_raster(path);
    if (auto* z = std::get_if<ComplexImage>(&raster)) return std::move(*z);
    if (auto* a = std::get_if<AmplitudeImage>(&raster)) return std::move(*a);
    throw FormatError(path.string() + ": a mask cannot be an estimation source");
}

}  // namespace sarfx
