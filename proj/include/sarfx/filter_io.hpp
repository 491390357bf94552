#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "sarfx/sysid.hpp"

namespace sarfx {

/// `<raster path>.json`
std::filesystem::path sidecar_path(const std::filesystem::path& raster_path);

nlohmann::json to_json(const TransferFunction& tf, const std::optional<SmoothingParams>& smoothing = std::nullopt);

/// Writes the response as an amplitude raster and a JSON sidecar with the
/// strategy and any fitted parameters.
void write_transfer_function(const TransferFunction& tf, const std::filesystem::path& path,
                             const std::optional<SmoothingParams>& smoothing = std::nullopt);

/// Reads a response raster; the strategy comes from the sidecar when present
/// (otherwise `known`). The values are validated, not renormalized.
TransferFunction read_transfer_function(const std::filesystem::path& path);

/// Complex rasters become complex sources, amplitude rasters amplitude sources.
EstimationSource read_estimation_source(const std::filesystem::path& path);

}  // namespace sarfx
