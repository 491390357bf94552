#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "sarfx/attack.hpp"
#include "sarfx/filter_io.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace sarfx;
using namespace sarfx::cli;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const auto parsed = parse_args(args);
    if (!parsed.command) return {parsed.exit_code, parsed.message, {}};
    const int code = run(*parsed.command, out, err);
    return {code, out.str(), err.str()};
}

AmplitudeImage random_amplitude(std::uint64_t seed, std::size_t h, std::size_t w) {
    std::mt19937_64 gen(seed);
    return AmplitudeImage(oracle::random_plane(gen, h, w, 100.0, 20000.0));
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

}  // namespace

TEST_CASE("region syntax") {
    const auto r = parse_region("64x32+5+7");
    REQUIRE(r);
    CHECK(r->width == 64);
    CHECK(r->height == 32);
    CHECK(*r->x == 5);
    CHECK(*r->y == 7);
    CHECK_FALSE(parse_region("64x32")->x);
    CHECK_FALSE(parse_region("64"));
    CHECK_FALSE(parse_region("0x4"));
    CHECK_FALSE(parse_region("4x4+1"));
}

TEST_CASE("usage errors exit with 2, help with 0") {
    CHECK(parse_args({}).exit_code == kExitUsage);
    CHECK(parse_args({"--help"}).exit_code == kExitOk);
    CHECK(parse_args({"bogus"}).exit_code == kExitUsage);
    CHECK(parse_args({"tile", "--input", "a.sarf", "--out-dir", "x", "--frobnicate"}).exit_code == kExitUsage);
    SUBCASE("missing --out") {
        const auto p = parse_args({"attack", "--input", "a.sarf", "--filter", "known:h.sarf"});
        CHECK_FALSE(p.command);
        CHECK(p.exit_code == kExitUsage);
    }
    SUBCASE("known filter with --sources") {
        const auto p = parse_args(
            {"attack", "--input", "a.sarf", "--filter", "known:h.sarf", "--sources", "s.sarf", "--out", "o.sarf"});
        CHECK(p.exit_code == kExitUsage);
        CHECK(p.message.find("conflicts") != std::string::npos);
    }
    SUBCASE("unknown strategy") {
        CHECK(parse_args({"attack", "--input", "a", "--filter", "estimate:wavelet:s", "--out", "o"}).exit_code ==
              kExitUsage);
    }
    SUBCASE("range edit without class or parameter") {
        CHECK(parse_args({"forge", "--target", "t", "--donor", "d", "--edit", "rotate", "--out-image", "i",
                          "--out-mask", "m"})
                  .exit_code == kExitUsage);
    }
    SUBCASE("overlap not below size") {
        CHECK(parse_args({"tile", "--input", "a", "--size", "64", "--overlap", "64", "--out-dir", "x"}).exit_code ==
              kExitUsage);
    }
}

TEST_CASE("filter specification parsing") {
    const auto p = parse_args({"attack", "--input", "in.sarf", "--filter", "estimate:direct:a.sarf,b.sarf", "--out",
                               "o.sarf"});
    REQUIRE(p.command);
    const auto& a = std::get<AttackCommand>(*p.command);
    const auto& e = std::get<EstimatedFilter>(a.filter);
    CHECK(e.strategy == Strategy::direct);
    REQUIRE(e.sources.size() == 2);
    CHECK(e.sources[0] == "a.sarf");
    CHECK(e.sources[1] == "b.sarf");
    CHECK(a.histogram_match);
    CHECK(a.speckle_mode == SpeckleMode::phase_only);

    const auto q = parse_args({"attack", "--input", "in.sarf", "--filter", "estimate:gaussian", "--sources", "x.sarf",
                               "y.sarf", "--no-histogram-match", "--speckle-mode", "full", "--out", "o.sarf"});
    REQUIRE(q.command);
    const auto& b = std::get<AttackCommand>(*q.command);
    CHECK(std::get<EstimatedFilter>(b.filter).strategy == Strategy::gaussian);
    CHECK(std::get<EstimatedFilter>(b.filter).sources.size() == 2);
    CHECK_FALSE(b.histogram_match);
    CHECK(b.speckle_mode == SpeckleMode::full);

    CHECK(std::holds_alternative<std::string>(parse_filter("estimate:direct", {})));
    CHECK(std::holds_alternative<std::string>(parse_filter("magic:x", {})));
    CHECK(std::get<KnownFilter>(std::get<FilterArg>(parse_filter("known:h.sarf", {}))).path == "h.sarf");
}

TEST_CASE("tile writes every full tile at the configured stride") {
    TempDir dir;
    write_raster(random_amplitude(1, 1024, 1536), dir / "scene.sarf");
    const auto p = parse_args({"tile", "--input", (dir / "scene.sarf").string(), "--size", "512", "--out-dir",
                               (dir / "tiles").string()});
    REQUIRE(p.command);
    CHECK(std::get<TileCommand>(*p.command).stride() == 512);
    std::ostringstream out, err;
    REQUIRE(run(*p.command, out, err) == kExitOk);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir / "tiles")) {
        ++n;
        const auto t = read_amplitude(e.path());
        CHECK(t.height() == 512);
        CHECK(t.width() == 512);
    }
    CHECK(n == 6);
    CHECK(fs::exists(dir / "tiles" / "scene_r512_c1024.sarf"));

    const auto q = parse_args({"tile", "--input", "x", "--size", "512", "--overlap", "128", "--out-dir", "y"});
    CHECK(std::get<TileCommand>(*q.command).stride() == 384);
}

TEST_CASE("forge, estimate-filter, attack, metrics and spectrum end to end") {
    TempDir dir;
    const std::size_t n = 128;
    const auto truth = raised_cosine_response(RaisedCosineFitParams{{0.6, 0.4, 40.0}, {0.6, 0.4, 40.0}, 1.0}, n, n);
    const auto scene = random_amplitude(2, n, n);
    write_raster(simulate_pristine(scene, truth, 11), dir / "slc.sarf");
    write_raster(simulate_pristine(scene, truth, 12).amplitude(), dir / "tile.sarf");

    auto r = invoke({"forge", "--target", (dir / "tile.sarf").string(), "--donor", (dir / "tile.sarf").string(),
                     "--edit", "upscale", "--edit-class", "near", "--region", "32x32", "--seed", "5", "--out-image",
                     (dir / "forged.sarf").string(), "--out-mask", (dir / "mask.sarf").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto mask = read_mask(dir / "mask.sarf");
    CHECK(mask.popcount() == 32 * 32);
    const auto prov = nlohmann::json::parse(std::ifstream(dir / "forged.sarf.json"));
    CHECK(prov["edit"]["name"] == "upscale-near");
    CHECK(prov["edit"]["parameter"].get<double>() >= 1.05);
    CHECK(prov["edit"]["parameter"].get<double>() < 1.5);

    r = invoke({"estimate-filter", "--strategy", "direct", "--sources", (dir / "slc.sarf").string(), "--out",
                (dir / "h.sarf").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    CHECK(fs::exists(dir / "h.sarf.json"));
    const auto h = read_transfer_function(dir / "h.sarf");
    CHECK(h.strategy() == Strategy::direct);
    CHECK(h.height() == n);

    r = invoke({"attack", "--input", (dir / "forged.sarf").string(), "--filter", "known:" + (dir / "h.sarf").string(),
                "--seed", "3", "--dump-intermediates", "--out", (dir / "attacked.sarf").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    CHECK(read_amplitude(dir / "attacked.sarf").height() == n);
    CHECK(fs::exists(dir / "attacked.speckled.sarf"));
    CHECK(fs::exists(dir / "attacked.filtered.sarf"));
    CHECK(fs::exists(dir / "attacked.filter.sarf"));

    r = invoke({"attack", "--input", (dir / "forged.sarf").string(), "--filter",
                "estimate:raised-cosine:" + (dir / "slc.sarf").string(), "--out", (dir / "attacked2.sarf").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);

    r = invoke({"metrics", "--source", (dir / "forged.sarf").string(), "--reference", (dir / "forged.sarf").string(),
                "--mask", (dir / "mask.sarf").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["ssim"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j["delta_enl_abs_rel"].get<double>() == doctest::Approx(0.0));
    CHECK(j.contains("auc"));

    {
        std::ofstream batch(dir / "batch.json");
        batch << R"([{"id":"x","a":"attacked.sarf","b":"forged.sarf","mask":"mask.sarf"},
                     {"id":"broken","a":"missing.sarf","b":"forged.sarf"}])";
    }
    r = invoke({"metrics", "--batch", (dir / "batch.json").string(), "--out", (dir / "batch.csv").string()});
    CHECK(r.code == kExitFailure);
    const auto lines = read_lines(dir / "batch.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "id,ssim,msssim,enl_a,enl_b,delta_enl_pct,auc");
    CHECK(lines[1].rfind("x,", 0) == 0);
    CHECK(lines[2] == "broken,,,,,,");

    r = invoke({"spectrum", "--input", (dir / "slc.sarf").string(), "--out", (dir / "spec.csv").string()});
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto spec = read_lines(dir / "spec.csv");
    CHECK(spec.front() == "radius,mean_sq_magnitude,count");
    CHECK(spec.size() > n / 2);
    CHECK(spec[1].rfind("0,", 0) == 0);
}

TEST_CASE("runtime failures exit with 1") {
    TempDir dir;
    auto r = invoke({"tile", "--input", (dir / "nope.sarf").string(), "--out-dir", (dir / "t").string()});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("error:") == 0);
}
