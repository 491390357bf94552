#include "sarfx/attack.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

#include "sarfx/spectral.hpp"

namespace sarfx {

ComplexImage apply_system(const ComplexImage& signal, const RealPlane& response) {
    if (signal.height() != response.height() || signal.width() != response.width())
        throw DimensionError("apply_system: signal and transfer function differ in shape");
    Spectrum s = forward_dft(signal);
    ComplexPlane& v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= response[i];
    return inverse_dft(s);
}

ComplexImage apply_system(const ComplexImage& signal, const TransferFunction& h) {
    return apply_system(signal, h.values());
}

AmplitudeImage histogram_match(const AmplitudeImage& source, const AmplitudeImage& reference) {
    if (source.size() != reference.size())
        throw DimensionError("histogram_match: source and reference pixel counts differ");
    const std::size_t n = source.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return source[a] < source[b]; });
    std::vector<double> ref(reference.values().data());
    std::sort(ref.begin(), ref.end());

    RealPlane out(source.height(), source.width());
    for (std::size_t k = 0; k < n; ++k) out[order[k]] = ref[k];
    return AmplitudeImage(std::move(out), reference.dynamic_range_bits());
}

namespace {

struct Registry {
    std::mutex mutex;
    std::map<std::string, Despeckler> hooks{
        {kIdentityDespeckler, [](const AmplitudeImage& a) { return a; }}};
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

void register_despeckler(const std::string& name, Despeckler fn) {
    if (name.empty() || !fn) throw InvalidArgument("despeckler needs a name and a function");
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.hooks[name] = std::move(fn);
}

Despeckler find_despeckler(const std::string& name) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    const auto it = r.hooks.find(name);
    if (it == r.hooks.end()) throw InvalidArgument("unknown despeckle hook '" + name + "'");
    return it->second;
}

std::vector<std::string> despeckler_names() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> names;
    for (const auto& [k, _] : r.hooks) names.push_back(k);
    return names;
}

TransferFunction resolve_filter(const FilterSource& filter) {
    if (const auto* known = std::get_if<TransferFunction>(&filter)) return estimate_transfer_function(*known);
    const auto& est = std::get<FilterEstimate>(filter);
    return estimate_transfer_function(est.sources, est.strategy, est.smoothing);
}

AttackResult run_attack(const AmplitudeImage& input, const AttackConfig& config) {
    return run_attack(input, config, resolve_filter(config.filter));
}

AttackResult run_attack(const AmplitudeImage& input, const AttackConfig& config, const TransferFunction& h) {
    const auto despeckle = find_despeckler(config.despeckle_hook);
    const AmplitudeImage base = despeckle(input);
    if (base.height() != input.height() || base.width() != input.width())
        throw DimensionError("despeckle hook changed the image shape");

    const auto field = generate_speckle(input.height(), input.width(), config.speckle_mode, config.sigma_s, config.seed);
    AttackResult res;
    res.speckled = inject_speckle(base, field);
    res.filtered = apply_system(res.speckled, h).amplitude(input.dynamic_range_bits());
    res.attacked = config.histogram_match ? histogram_match(res.filtered, input) : res.filtered;
    res.transfer_function = h;
    res.speckle_mode = config.speckle_mode;
    res.sigma_s = config.sigma_s;
    res.seed = config.seed;
    res.histogram_matched = config.histogram_match;
    res.despeckle_hook = config.despeckle_hook;
    return res;
}

ComplexImage simulate_pristine(const AmplitudeImage& reflectivity, const TransferFunction& h_true,
                               std::uint64_t seed, double sigma_s) {
    const auto field = generate_speckle(reflectivity.height(), reflectivity.width(), SpeckleMode::full, sigma_s, seed);
    return apply_system(inject_speckle(reflectivity, field), h_true);
}

}  // namespace sarfx
