#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sarfx/speckle.hpp"
#include "sarfx/sysid.hpp"

namespace sarfx::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RegionArg {
    std::size_t width = 128;
    std::size_t height = 128;
    std::optional<std::size_t> x;
    std::optional<std::size_t> y;
};

/// "WxH" or "WxH+x+y".
std::optional<RegionArg> parse_region(const std::string& text);

struct ForgeCommand {
    fs::path target;
    fs::path donor;
    std::string edit = "none";
    std::optional<std::string> edit_class;  ///< near | far
    std::optional<double> edit_param;       ///< fixed parameter instead of a class draw
    RegionArg region;
    std::uint64_t seed = 0;
    fs::path out_image;
    fs::path out_mask;
    std::optional<fs::path> provenance;
};

struct KnownFilter {
    fs::path path;
};
struct EstimatedFilter {
    Strategy strategy = Strategy::direct;
    std::vector<fs::path> sources;
};
using FilterArg = std::variant<KnownFilter, EstimatedFilter>;

/// "known:<path>" or "estimate:<strategy>[:p1,p2,...]"; extra sources are
/// appended from --sources. Returns an error message on failure.
std::variant<FilterArg, std::string> parse_filter(const std::string& spec, const std::vector<fs::path>& sources);

struct AttackCommand {
    fs::path input;
    FilterArg filter;
    SpeckleMode speckle_mode = SpeckleMode::phase_only;
    double speckle_sigma = kDefaultSpeckleSigma;
    std::uint64_t seed = 0;
    bool histogram_match = true;
    bool dump_intermediates = false;
    std::string despeckle = "identity";
    fs::path out;
};

struct EstimateFilterCommand {
    Strategy strategy = Strategy::direct;
    std::vector<fs::path> sources;
    std::optional<double> smoothing_sigma;
    std::optional<std::size_t> smoothing_kernel;
    fs::path out;
};

struct MetricsCommand {
    std::optional<fs::path> source;     ///< e.g. attacked
    std::optional<fs::path> reference;  ///< e.g. pristine
    std::optional<fs::path> mask;       ///< splice mask for AUC
    std::optional<fs::path> fingerprint;
    std::optional<std::string> fingerprint_provider;
    std::optional<fs::path> enl_region;
    std::optional<fs::path> batch;  ///< JSON list of pairs
    double dynamic_range = 65535.0;
    std::optional<fs::path> out;
};

struct SpectrumCommand {
    fs::path input;
    fs::path out;
};

struct TileCommand {
    fs::path input;
    std::size_t size = 1024;
    std::size_t overlap = 0;
    fs::path out_dir;

    std::size_t stride() const { return size - overlap; }
};

struct ExperimentCommand {
    fs::path config;
    std::optional<fs::path> out_dir;
    std::optional<std::uint64_t> seed;
};

using Command = std::variant<ForgeCommand, AttackCommand, EstimateFilterCommand, MetricsCommand, SpectrumCommand,
                             TileCommand, ExperimentCommand>;

struct ParseOutcome {
    std::optional<Command> command;
    int exit_code = kExitOk;  ///< meaningful when no command: 0 for help, 2 for usage errors
    std::string message;      ///< help text or error description
};

ParseOutcome parse_args(const std::vector<std::string>& args);

/// Executes a parsed command, reporting to `out`/`err`. Returns the process exit code.
int run(const Command& command, std::ostream& out, std::ostream& err);

/// parse_args + run.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sarfx::cli
