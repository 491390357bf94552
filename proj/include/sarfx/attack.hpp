#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sarfx/raster.hpp"
#include "sarfx/speckle.hpp"
#include "sarfx/sysid.hpp"

namespace sarfx {

/// out = F^-1(F(in) * H): circular convolution with the system response.
ComplexImage apply_system(const ComplexImage& signal, const TransferFunction& h);
/// Unvalidated spectral product with an arbitrary real response on the centered grid.
ComplexImage apply_system(const ComplexImage& signal, const RealPlane& response);

/// Exact rank mapping: the source pixel of rank k (ties broken by row-major
/// index) receives the reference value of rank k. Requires equal pixel counts.
AmplitudeImage histogram_match(const AmplitudeImage& source, const AmplitudeImage& reference);

// ---------------------------------------------------------------------------
// Despeckling hooks

using Despeckler = std::function<AmplitudeImage(const AmplitudeImage&)>;

inline constexpr const char* kIdentityDespeckler = "identity";

/// Registers or replaces a named despeckler. "identity" is always present.
void register_despeckler(const std::string& name, Despeckler fn);
/// Throws InvalidArgument for unknown names.
Despeckler find_despeckler(const std::string& name);
std::vector<std::string> despeckler_names();

// ---------------------------------------------------------------------------
// Pipeline

struct FilterEstimate {
    Strategy strategy = Strategy::direct;
    std::vector<EstimationSource> sources;
    std::optional<SmoothingParams> smoothing;
};

using FilterSource = std::variant<TransferFunction, FilterEstimate>;

struct AttackConfig {
    SpeckleMode speckle_mode = SpeckleMode::phase_only;
    double sigma_s = kDefaultSpeckleSigma;
    std::uint64_t seed = 0;
    FilterSource filter;
    bool histogram_match = true;
    std::string despeckle_hook = kIdentityDespeckler;
};

/// Resolves the configured filter: a known response is validated and returned,
/// an estimate runs the system identification on the configured sources.
TransferFunction resolve_filter(const FilterSource& filter);

struct AttackResult {
    AmplitudeImage attacked;
    ComplexImage speckled;     ///< after speckle injection
    AmplitudeImage filtered;   ///< |system output| before histogram matching
    TransferFunction transfer_function;
    SpeckleMode speckle_mode = SpeckleMode::phase_only;
    double sigma_s = kDefaultSpeckleSigma;
    std::uint64_t seed = 0;
    bool histogram_matched = true;
    std::string despeckle_hook;
};

/// despeckle -> speckle injection -> system filtering -> |.| -> histogram match to the input.
AttackResult run_attack(const AmplitudeImage& input, const AttackConfig& config);
/// Same, with a response already resolved (skips re-estimation in batch runs).
AttackResult run_attack(const AmplitudeImage& input, const AttackConfig& config, const TransferFunction& h);

/// Synthetic pristine complex scene: full-mode speckle on the reflectivity,
/// filtered by the true system response.
ComplexImage simulate_pristine(const AmplitudeImage& reflectivity, const TransferFunction& h_true,
                               std::uint64_t seed, double sigma_s = kDefaultSpeckleSigma);

}  // namespace sarfx
