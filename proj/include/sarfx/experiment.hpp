#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarfx/attack.hpp"
#include "sarfx/metrics.hpp"

namespace sarfx {

inline constexpr int kExperimentSchemaVersion = 1;

struct ManifestItem {
    std::string id;
    std::filesystem::path path;
    std::string product;  ///< donors are drawn among tiles of the same product
};

struct FilterPlan {
    std::optional<std::filesystem::path> known;  ///< response raster
    Strategy strategy = Strategy::direct;
    std::vector<std::filesystem::path> sources;
    std::optional<SmoothingParams> smoothing;
};

struct AttackPlan {
    SpeckleMode speckle_mode = SpeckleMode::phase_only;
    double sigma_s = kDefaultSpeckleSigma;
    FilterPlan filter;
    bool histogram_match = true;
    std::string despeckle_hook = kIdentityDespeckler;
};

struct ExperimentConfig {
    int schema_version = kExperimentSchemaVersion;
    std::uint64_t master_seed = 0;
    std::vector<ManifestItem> manifest;
    std::vector<std::string> edits;  ///< local edit names, e.g. "upscale-near"
    std::size_t region_size = 128;
    std::optional<AttackPlan> attack;
    double dynamic_range = 65535.0;
    std::string fingerprint = "residual-variance";
    bool save_images = false;
    std::filesystem::path output_dir = "experiment-out";
};

/// Parses and validates a JSON config. Relative paths resolve against `base_dir`.
/// Throws InvalidArgument on schema errors or missing files.
ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentRow {
    std::string item_id;
    std::string tile_id;
    std::string product;
    std::string edit;
    double parameter = 0.0;
    std::optional<MetricReport> metrics;
    std::optional<double> auc_before;
    std::optional<double> auc_after;
    std::string status = "ok";
    nlohmann::json provenance;
};

struct ExperimentSummary {
    std::vector<ExperimentRow> rows;  ///< manifest order, then edit order
    std::size_t failed = 0;
    std::filesystem::path report_path;
    std::filesystem::path summary_path;
    std::filesystem::path provenance_path;
};

/// Worker count: SARFX_THREADS when set to a positive integer, else the hardware concurrency.
std::size_t worker_count();

/// Runs every (tile, edit) item on a worker pool and writes report.csv,
/// summary.csv and provenance.jsonl into the output directory. Items that fail
/// are recorded with their error and counted in `failed`.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Per-item seed for a pipeline stage.
std::uint64_t item_seed(std::uint64_t master_seed, const std::string& item_id, const std::string& stage);

}  // namespace sarfx
