#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "sarfx/experiment.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace sarfx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Writes `count` random tiles and returns a manifest JSON array.
nlohmann::json write_tiles(const TempDir& dir, std::size_t count, std::size_t size, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    nlohmann::json manifest = nlohmann::json::array();
    for (std::size_t i = 0; i < count; ++i) {
        const auto name = "tile" + std::to_string(i) + ".sarf";
        write_raster(AmplitudeImage(oracle::random_plane(gen, size, size, 500.0, 30000.0)), dir / name);
        manifest.push_back({{"id", "t" + std::to_string(i)}, {"path", name}, {"product", i < count / 2 ? "p0" : "p1"}});
    }
    return manifest;
}

void write_config(const TempDir& dir, const nlohmann::json& j) { std::ofstream(dir / "config.json") << j.dump(2); }

struct EnvThreads {
    explicit EnvThreads(const char* v) { ::setenv("SARFX_THREADS", v, 1); }
    ~EnvThreads() { ::unsetenv("SARFX_THREADS"); }
};

}  // namespace

TEST_CASE("config validation") {
    TempDir dir;
    const auto manifest = write_tiles(dir, 2, 64, 1);
    const nlohmann::json base = {{"schema_version", 1}, {"manifest", manifest}};
    CHECK(parse_experiment_config(base, dir.path()).edits.size() == 7);
    CHECK(parse_experiment_config(base, dir.path()).manifest[0].path == dir / "tile0.sarf");

    auto bad = base;
    bad["schema_version"] = 9;
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
    bad = base;
    bad["manifest"][1]["id"] = "t0";
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
    bad = base;
    bad["manifest"][0]["path"] = "absent.sarf";
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
    bad = base;
    bad["splice"] = {{"edits", {"sharpen"}}};
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
    bad = base;
    bad["attack"] = {{"filter", {{"known", "tile0.sarf"}, {"sources", {"tile1.sarf"}}}}};
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
    bad = base;
    bad["metrics"] = {{"fingerprint", "oracle"}};
    CHECK_THROWS_AS(parse_experiment_config(bad, dir.path()), InvalidArgument);
}

TEST_CASE("item seeds depend on the item and stage only") {
    CHECK(item_seed(7, "a/blur", "splice") == item_seed(7, "a/blur", "splice"));
    CHECK(item_seed(7, "a/blur", "splice") != item_seed(7, "a/blur", "attack"));
    CHECK(item_seed(7, "a/blur", "splice") != item_seed(7, "b/blur", "splice"));
    CHECK(item_seed(7, "a/blur", "splice") != item_seed(8, "a/blur", "splice"));
}

TEST_CASE("empty manifest produces an empty report") {
    TempDir dir;
    write_config(dir, {{"schema_version", 1}, {"manifest", nlohmann::json::array()}, {"output_dir", "out"}});
    std::ostringstream out, err;
    const auto p = cli::parse_args({"experiment", "--config", (dir / "config.json").string()});
    REQUIRE(p.command);
    CHECK(cli::run(*p.command, out, err) == cli::kExitOk);
    const auto lines = lines_of(dir / "out" / "report.csv");
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] ==
          "id,tile,product,edit,parameter,ssim,msssim,msssim_scales,enl_a,enl_b,delta_enl_pct,auc_before,auc_after,"
          "status");
}

TEST_CASE("10 tiles x 7 edits with an attack fill every field") {
    TempDir dir;
    auto manifest = write_tiles(dir, 10, 128, 2);
    write_config(dir, {{"schema_version", 1},
                       {"master_seed", 42},
                       {"manifest", manifest},
                       {"splice", {{"region", 32}}},
                       {"attack", {{"filter", {{"strategy", "direct"}, {"sources", {"tile0.sarf", "tile1.sarf"}}}}}},
                       {"output_dir", "out"}});
    const auto cfg = load_experiment_config(dir / "config.json");
    const auto summary = run_experiment(cfg);
    CHECK(summary.failed == 0);
    REQUIRE(summary.rows.size() == 70);
    const auto lines = lines_of(summary.report_path);
    REQUIRE(lines.size() == 71);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields(lines[i]);
        REQUIRE(f.size() == 14);
        for (const auto& v : f) CHECK_FALSE(v.empty());
        CHECK(f.back() == "ok");
    }
    CHECK(summary.rows[0].item_id == "t0/blur");
    CHECK(summary.rows[6].item_id == "t0/rotate-far");
    CHECK(lines_of(summary.provenance_path).size() == 70);
    const auto sum = lines_of(summary.summary_path);
    REQUIRE(sum.size() == 8);
    CHECK(sum[1].rfind("blur,10,0,", 0) == 0);
    for (const auto& r : summary.rows) {
        CHECK(r.provenance["donor_tile_id"] != r.tile_id);
        const auto donor = r.provenance["donor_tile_id"].get<std::string>();
        const auto di = std::stoi(donor.substr(1)), ti = std::stoi(r.tile_id.substr(1));
        CHECK((di < 5) == (ti < 5));
    }
}

TEST_CASE("identical configs give byte-identical reports regardless of threading") {
    TempDir dir;
    const auto manifest = write_tiles(dir, 4, 96, 3);
    nlohmann::json cfg = {{"schema_version", 1},
                          {"master_seed", 9},
                          {"manifest", manifest},
                          {"splice", {{"region", 24}, {"edits", {"blur", "rotate-far", "downscale-near"}}}},
                          {"attack", {{"filter", {{"strategy", "direct"}, {"sources", {"tile2.sarf"}}}}}}};
    cfg["output_dir"] = "a";
    write_config(dir, cfg);
    {
        EnvThreads t("1");
        run_experiment(load_experiment_config(dir / "config.json"));
    }
    cfg["output_dir"] = "b";
    write_config(dir, cfg);
    {
        EnvThreads t("4");
        run_experiment(load_experiment_config(dir / "config.json"));
    }
    for (const auto* f : {"report.csv", "summary.csv", "provenance.jsonl"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK_FALSE(slurp(dir / "a" / "report.csv").empty());

    cfg["output_dir"] = "c";
    cfg["master_seed"] = 10;
    write_config(dir, cfg);
    run_experiment(load_experiment_config(dir / "config.json"));
    CHECK(slurp(dir / "a" / "report.csv") != slurp(dir / "c" / "report.csv"));
}

TEST_CASE("partial failure is recorded and exits nonzero") {
    TempDir dir;
    auto manifest = write_tiles(dir, 2, 96, 4);
    std::mt19937_64 gen(5);
    write_raster(AmplitudeImage(oracle::random_plane(gen, 16, 16, 1.0, 2.0)), dir / "small.sarf");
    manifest.push_back({{"id", "small"}, {"path", "small.sarf"}, {"product", "lone"}});
    write_config(dir, {{"schema_version", 1},
                       {"manifest", manifest},
                       {"splice", {{"region", 32}, {"edits", {"blur"}}}},
                       {"output_dir", "out"}});
    std::ostringstream out, err;
    const auto p = cli::parse_args({"experiment", "--config", (dir / "config.json").string()});
    REQUIRE(p.command);
    CHECK(cli::run(*p.command, out, err) == cli::kExitFailure);
    const auto lines = lines_of(dir / "out" / "report.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].substr(lines[1].size() - 3) == ",ok");
    CHECK(lines[3].find("small/blur,small,lone,blur") == 0);
    CHECK(lines[3].find("error:") != std::string::npos);
    CHECK(err.str().find("small/blur") != std::string::npos);
}
