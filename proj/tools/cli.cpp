#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>

#include "sarfx/attack.hpp"
#include "sarfx/experiment.hpp"
#include "sarfx/filter_io.hpp"
#include "sarfx/fingerprint.hpp"
#include "sarfx/forgery.hpp"
#include "sarfx/metrics.hpp"
#include "sarfx/spectral.hpp"

namespace sarfx::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

AmplitudeImage load_amplitude_any(const fs::path& p) {
    auto r = read_raster(p);
    if (auto* a = std::get_if<AmplitudeImage>(&r)) return std::move(*a);
    if (auto* z = std::get_if<ComplexImage>(&r)) return z->amplitude();
    throw FormatError(p.string() + ": expected an amplitude or complex raster");
}

RealPlane load_fingerprint(const fs::path& p) {
    auto r = read_raster(p);
    if (auto* a = std::get_if<AmplitudeImage>(&r)) return a->values();
    if (auto* z = std::get_if<ComplexImage>(&r)) return z->re();
    throw FormatError(p.string() + ": a mask cannot be a fingerprint");
}

void write_json(const nlohmann::json& j, const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    auto stem = p;
    stem.replace_extension();
    stem += suffix;
    return stem;
}

TransferFunction resolve(const FilterArg& f) {
    if (const auto* k = std::get_if<KnownFilter>(&f)) return read_transfer_function(k->path);
    const auto& e = std::get<EstimatedFilter>(f);
    std::vector<EstimationSource> sources;
    for (const auto& p : e.sources) sources.push_back(read_estimation_source(p));
    return estimate_transfer_function(sources, e.strategy);
}

// ---------------------------------------------------------------------------

int run_forge(const ForgeCommand& c, std::ostream& out) {
    const auto kind = *parse_edit_kind(c.edit);
    EditOp op;
    if (c.edit_param) {
        op = EditOp::fixed(kind, *c.edit_param);
    } else {
        CounterRng rng(derive_seed(c.seed, "forge", "edit"));
        op = EditOp::sample(kind, c.edit_class ? *parse_range_class(*c.edit_class) : RangeClass::fixed, rng);
    }
    SplicePlacement placement;
    if (c.region.x) placement.target_origin = PixelPoint{*c.region.x, *c.region.y};

    const auto target = load_amplitude_any(c.target);
    std::error_code ec;
    const bool same = fs::equivalent(c.target, c.donor, ec);
    const auto donor = same ? target : load_amplitude_any(c.donor);
    const auto res = forge_splice(target, same ? target : donor, c.region.width, c.region.height, op, c.seed, placement);

    write_raster(res.image, c.out_image);
    write_raster(res.mask, c.out_mask);
    auto prov = res.provenance;
    prov["target"] = c.target.string();
    prov["donor"] = c.donor.string();
    write_json(prov, c.provenance.value_or(fs::path(c.out_image.string() + ".json")));
    out << prov.dump() << '\n';
    return kExitOk;
}

int run_attack_cmd(const AttackCommand& c, std::ostream& out) {
    const auto input = load_amplitude_any(c.input);
    const auto h = resolve(c.filter);
    AttackConfig cfg;
    cfg.speckle_mode = c.speckle_mode;
    cfg.sigma_s = c.speckle_sigma;
    cfg.seed = c.seed;
    cfg.histogram_match = c.histogram_match;
    cfg.despeckle_hook = c.despeckle;
    const auto res = run_attack(input, cfg, h);
    write_raster(res.attacked, c.out);

    nlohmann::json rec = {{"input", c.input.string()},
                          {"speckle_mode", to_string(c.speckle_mode)},
                          {"speckle_sigma", c.speckle_sigma},
                          {"seed", c.seed},
                          {"histogram_match", c.histogram_match},
                          {"despeckle", c.despeckle},
                          {"filter", to_json(h)}};
    if (c.dump_intermediates) {
        write_raster(res.speckled, with_suffix(c.out, ".speckled.sarf"));
        write_raster(res.filtered, with_suffix(c.out, ".filtered.sarf"));
        write_transfer_function(h, with_suffix(c.out, ".filter.sarf"));
        rec["intermediates"] = {with_suffix(c.out, ".speckled.sarf").string(),
                                with_suffix(c.out, ".filtered.sarf").string(),
                                with_suffix(c.out, ".filter.sarf").string()};
    }
    write_json(rec, c.out.string() + ".json");
    out << rec.dump() << '\n';
    return kExitOk;
}

int run_estimate(const EstimateFilterCommand& c, std::ostream& out) {
    std::vector<EstimationSource> sources;
    for (const auto& p : c.sources) sources.push_back(read_estimation_source(p));
    std::optional<SmoothingParams> smoothing;
    if (c.smoothing_sigma || c.smoothing_kernel) {
        const auto [h, w] = std::visit([](const auto& s) { return std::pair{s.height(), s.width()}; }, sources.front());
        smoothing = SmoothingParams::for_size(h, w);
        if (c.smoothing_sigma) smoothing->sigma = *c.smoothing_sigma;
        if (c.smoothing_kernel) smoothing->kernel_size = *c.smoothing_kernel;
    }
    const auto tf = estimate_transfer_function(sources, c.strategy, smoothing);
    write_transfer_function(tf, c.out, smoothing);
    out << to_json(tf, smoothing).dump() << '\n';
    return kExitOk;
}

nlohmann::json metrics_for_pair(const fs::path& a, const fs::path& b, const std::optional<fs::path>& mask,
                                const std::optional<fs::path>& fingerprint, const std::optional<std::string>& provider,
                                const std::optional<fs::path>& enl_region, double dynamic_range, MetricReport& report) {
    const auto ia = load_amplitude_any(a), ib = load_amplitude_any(b);
    std::optional<TamperMask> region;
    if (enl_region) region = read_mask(*enl_region);
    report = evaluate_metrics(ia, ib, dynamic_range, region);
    if (mask) {
        const auto m = read_mask(*mask);
        RealPlane fp;
        if (fingerprint) fp = load_fingerprint(*fingerprint);
        else fp = compute_fingerprint(provider.value_or(kResidualVarianceFingerprint), ia);
        report.auc = auc_roc(fp, m);
    }
    return report.to_json();
}

int run_metrics(const MetricsCommand& c, std::ostream& out, std::ostream& err) {
    if (!c.batch) {
        MetricReport rep;
        const auto j = metrics_for_pair(*c.source, *c.reference, c.mask, c.fingerprint, c.fingerprint_provider,
                                        c.enl_region, c.dynamic_range, rep);
        if (c.out) write_json(j, *c.out);
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    std::ifstream in(*c.batch);
    if (!in) throw InvalidArgument("cannot open batch file " + c.batch->string());
    nlohmann::json items;
    try {
        in >> items;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("batch file is not valid JSON: " + std::string(e.what()));
    }
    const auto base = c.batch->parent_path();
    const auto path_of = [&](const nlohmann::json& it, const char* key) -> std::optional<fs::path> {
        if (!it.contains(key)) return std::nullopt;
        const fs::path p(it[key].get<std::string>());
        return p.is_absolute() ? p : base / p;
    };
    std::ostringstream csv;
    csv << "id,ssim,msssim,enl_a,enl_b,delta_enl_pct,auc\n";
    int failures = 0;
    for (const auto& it : items) {
        const std::string id = it.value("id", std::string());
        try {
            MetricReport r;
            metrics_for_pair(*path_of(it, "a"), *path_of(it, "b"), path_of(it, "mask"), path_of(it, "fingerprint"),
                             c.fingerprint_provider, c.enl_region, c.dynamic_range, r);
            csv << id << ',' << num(r.ssim) << ',' << num(r.msssim) << ',' << num(r.enl_source) << ','
                << num(r.enl_reference) << ',' << num(r.delta_enl_abs_rel) << ','
                << (r.auc ? num(r.auc->max_polarity) : std::string()) << '\n';
        } catch (const std::exception& e) {
            ++failures;
            err << "error: " << id << ": " << e.what() << '\n';
            csv << id << ",,,,,,\n";
        }
    }
    if (c.out) {
        std::ofstream f(*c.out);
        f << csv.str();
    } else {
        out << csv.str();
    }
    return failures ? kExitFailure : kExitOk;
}

int run_spectrum(const SpectrumCommand& c) {
    auto r = read_raster(c.input);
    Spectrum s;
    if (auto* a = std::get_if<AmplitudeImage>(&r)) s = forward_dft(*a);
    else if (auto* z = std::get_if<ComplexImage>(&r)) s = forward_dft(*z);
    else throw FormatError(c.input.string() + ": a mask has no spectrum");
    const auto prof = azimuthal_profile(s);
    std::ofstream out(c.out);
    if (!out) throw Error("cannot write " + c.out.string());
    out << "radius,mean_sq_magnitude,count\n";
    for (std::size_t b = 0; b < prof.values.size(); ++b)
        out << num(prof.bin_centers[b]) << ',' << num(prof.values[b]) << ',' << prof.counts[b] << '\n';
    return kExitOk;
}

int run_tile(const TileCommand& c, std::ostream& out) {
    const auto img = load_amplitude_any(c.input);
    const auto tiles = tile(img, c.size, c.overlap);
    fs::create_directories(c.out_dir);
    const auto stem = c.input.stem().string();
    for (const auto& t : tiles) {
        const auto name = stem + "_r" + std::to_string(t.row_offset) + "_c" + std::to_string(t.col_offset) + ".sarf";
        write_raster(t.image, c.out_dir / name);
    }
    out << tiles.size() << " tiles (stride " << c.stride() << ") written to " << c.out_dir.string() << '\n';
    return kExitOk;
}

int run_experiment_cmd(const ExperimentCommand& c, std::ostream& out, std::ostream& err) {
    auto cfg = load_experiment_config(c.config);
    if (c.out_dir) cfg.output_dir = *c.out_dir;
    if (c.seed) cfg.master_seed = *c.seed;
    const auto summary = run_experiment(cfg);
    for (const auto& r : summary.rows)
        if (r.status != "ok") err << "item " << r.item_id << ": " << r.status << '\n';
    out << summary.rows.size() - summary.failed << "/" << summary.rows.size() << " items completed; report "
        << summary.report_path.string() << '\n';
    return summary.failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

std::optional<RegionArg> parse_region(const std::string& text) {
    static const std::regex re(R"(^(\d+)x(\d+)(?:\+(\d+)\+(\d+))?$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) return std::nullopt;
    RegionArg r;
    r.width = std::stoull(m[1]);
    r.height = std::stoull(m[2]);
    if (m[3].matched) {
        r.x = std::stoull(m[3]);
        r.y = std::stoull(m[4]);
    }
    if (r.width == 0 || r.height == 0) return std::nullopt;
    return r;
}

std::variant<FilterArg, std::string> parse_filter(const std::string& spec, const std::vector<fs::path>& sources) {
    if (spec.rfind("known:", 0) == 0) {
        if (!sources.empty()) return std::string("--filter known:<path> conflicts with --sources");
        const auto path = spec.substr(6);
        if (path.empty()) return std::string("--filter known: needs a path");
        return FilterArg{KnownFilter{path}};
    }
    if (spec.rfind("estimate:", 0) == 0) {
        const auto rest = spec.substr(9);
        const auto colon = rest.find(':');
        const auto strategy = parse_strategy(rest.substr(0, colon));
        if (!strategy || *strategy == Strategy::known)
            return std::string("unknown estimation strategy '" + rest.substr(0, colon) + "'");
        EstimatedFilter e{*strategy, {}};
        if (colon != std::string::npos) {
            if (!sources.empty()) return std::string("inline estimation sources conflict with --sources");
            for (const auto& p : split(rest.substr(colon + 1), ','))
                if (!p.empty()) e.sources.emplace_back(p);
        } else {
            e.sources = sources;
        }
        if (e.sources.empty()) return std::string("estimation needs at least one source");
        return FilterArg{e};
    }
    return std::string("--filter must be known:<path> or estimate:<strategy>[:paths]");
}

ParseOutcome parse_args(const std::vector<std::string>& args) {
    CLI::App app{"sarfx: SAR splicing, counter-forensic attack and evaluation toolkit", "sarfx"};
    app.require_subcommand(1);

    // Raw holders; validated and converted after CLI11 parsing.
    ForgeCommand forge;
    std::string forge_region = "128x128";
    auto* f = app.add_subcommand("forge", "splice an edited donor region into a target image");
    f->add_option("--target", forge.target, "target amplitude raster")->required();
    f->add_option("--donor", forge.donor, "donor raster (may equal the target)")->required();
    f->add_option("--edit", forge.edit, "none|blur|upscale|downscale|rotate");
    f->add_option("--edit-class", forge.edit_class, "near|far");
    f->add_option("--edit-param", forge.edit_param, "fixed sigma, factor or angle");
    f->add_option("--region", forge_region, "WxH[+x+y]");
    f->add_option("--seed", forge.seed);
    f->add_option("--out-image", forge.out_image)->required();
    f->add_option("--out-mask", forge.out_mask)->required();
    f->add_option("--provenance", forge.provenance, "provenance JSON (default <out-image>.json)");

    AttackCommand attack;
    std::string attack_filter, attack_mode = "phase-only";
    std::vector<fs::path> attack_sources;
    bool no_hm = false;
    auto* a = app.add_subcommand("attack", "run the counter-forensic attack");
    a->add_option("--input", attack.input)->required();
    a->add_option("--filter", attack_filter, "known:<path> | estimate:<strategy>[:p1,p2]")->required();
    a->add_option("--sources", attack_sources, "estimation sources");
    a->add_option("--speckle-mode", attack_mode, "full|phase-only");
    a->add_option("--speckle-sigma", attack.speckle_sigma);
    a->add_option("--seed", attack.seed);
    a->add_flag("--no-histogram-match", no_hm);
    a->add_flag("--dump-intermediates", attack.dump_intermediates);
    a->add_option("--despeckle", attack.despeckle, "despeckle hook name");
    a->add_option("--out", attack.out)->required();

    EstimateFilterCommand est;
    std::string est_strategy = "direct";
    auto* e = app.add_subcommand("estimate-filter", "estimate the system transfer function");
    e->add_option("--strategy", est_strategy, "gaussian|raised-cosine|direct");
    e->add_option("--sources", est.sources)->required()->expected(1, -1);
    e->add_option("--smoothing-sigma", est.smoothing_sigma);
    e->add_option("--smoothing-kernel", est.smoothing_kernel);
    e->add_option("--out", est.out)->required();

    MetricsCommand met;
    auto* m = app.add_subcommand("metrics", "SSIM, MS-SSIM, ENL and AUC");
    m->add_option("--source,-a", met.source, "evaluated image (e.g. attacked)");
    m->add_option("--reference,-b", met.reference, "reference image (e.g. pristine)");
    m->add_option("--mask", met.mask, "splice mask for AUC");
    m->add_option("--fingerprint", met.fingerprint, "fingerprint raster");
    m->add_option("--fingerprint-provider", met.fingerprint_provider, "built-in fingerprint");
    m->add_option("--enl-region", met.enl_region, "mask of the homogeneous ENL region");
    m->add_option("--batch", met.batch, "JSON list of {id, a, b, mask?, fingerprint?}");
    m->add_option("--dynamic-range", met.dynamic_range);
    m->add_option("--out", met.out);

    SpectrumCommand spec;
    auto* s = app.add_subcommand("spectrum", "azimuthal spectral profile as CSV");
    s->add_option("--input", spec.input)->required();
    s->add_option("--out", spec.out)->required();

    TileCommand til;
    auto* t = app.add_subcommand("tile", "cut an image into tiles");
    t->add_option("--input", til.input)->required();
    t->add_option("--size", til.size);
    t->add_option("--overlap", til.overlap);
    t->add_option("--out-dir", til.out_dir, "output directory")->required();

    ExperimentCommand exp;
    auto* x = app.add_subcommand("experiment", "run a configured batch experiment");
    x->add_option("--config", exp.config)->required();
    x->add_option("--out-dir", exp.out_dir);
    x->add_option("--seed", exp.seed, "override the master seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        return {std::nullopt, kExitOk, app.help()};
    } catch (const CLI::CallForAllHelp& ex) {
        return {std::nullopt, kExitOk, app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& ex) {
        return {std::nullopt, kExitUsage, ex.what()};
    }
    const auto usage = [](std::string msg) { return ParseOutcome{std::nullopt, kExitUsage, std::move(msg)}; };

    if (*f) {
        const auto r = parse_region(forge_region);
        if (!r) return usage("--region must be WxH or WxH+x+y");
        forge.region = *r;
        const auto kind = parse_edit_kind(forge.edit);
        if (!kind) return usage("unknown --edit '" + forge.edit + "'");
        if (forge.edit_class && *forge.edit_class != "near" && *forge.edit_class != "far") return usage("--edit-class must be near or far");
        if (forge.edit_class && forge.edit_param) return usage("--edit-class conflicts with --edit-param");
        const bool needs_param = *kind == EditKind::upscale || *kind == EditKind::downscale || *kind == EditKind::rotate;
        if (needs_param && !forge.edit_class && !forge.edit_param)
            return usage("--edit " + forge.edit + " needs --edit-class or --edit-param");
        return {Command{forge}, kExitOk, {}};
    }
    if (*a) {
        const auto mode = parse_speckle_mode(attack_mode);
        if (!mode) return usage("--speckle-mode must be full or phase-only");
        attack.speckle_mode = *mode;
        attack.histogram_match = !no_hm;
        auto parsed = parse_filter(attack_filter, attack_sources);
        if (auto* msg = std::get_if<std::string>(&parsed)) return usage(*msg);
        attack.filter = std::get<FilterArg>(parsed);
        return {Command{attack}, kExitOk, {}};
    }
    if (*e) {
        const auto st = parse_strategy(est_strategy);
        if (!st || *st == Strategy::known) return usage("--strategy must be gaussian, raised-cosine or direct");
        est.strategy = *st;
        if (est.smoothing_kernel && *est.smoothing_kernel % 2 == 0) return usage("--smoothing-kernel must be odd");
        return {Command{est}, kExitOk, {}};
    }
    if (*m) {
        if (met.batch && (met.source || met.reference)) return usage("--batch conflicts with --source/--reference");
        if (!met.batch && (!met.source || !met.reference)) return usage("metrics needs --source and --reference");
        if (met.fingerprint && met.fingerprint_provider)
            return usage("--fingerprint conflicts with --fingerprint-provider");
        if (met.fingerprint && !met.mask) return usage("--fingerprint needs --mask");
        return {Command{met}, kExitOk, {}};
    }
    if (*s) return {Command{spec}, kExitOk, {}};
    if (*t) {
        if (til.size == 0) return usage("--size must be positive");
        if (til.overlap >= til.size) return usage("--overlap must be smaller than --size");
        return {Command{til}, kExitOk, {}};
    }
    return {Command{exp}, kExitOk, {}};
}

int run(const Command& command, std::ostream& out, std::ostream& err) {
    try {
        return std::visit(
            [&](const auto& c) -> int {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, ForgeCommand>) return run_forge(c, out);
                else if constexpr (std::is_same_v<T, AttackCommand>) return run_attack_cmd(c, out);
                else if constexpr (std::is_same_v<T, EstimateFilterCommand>) return run_estimate(c, out);
                else if constexpr (std::is_same_v<T, MetricsCommand>) return run_metrics(c, out, err);
                else if constexpr (std::is_same_v<T, SpectrumCommand>) return run_spectrum(c);
                else if constexpr (std::is_same_v<T, TileCommand>) return run_tile(c, out);
                else return run_experiment_cmd(c, out, err);
            },
            command);
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitFailure;
    }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto parsed = parse_args(args);
    if (!parsed.command) {
        (parsed.exit_code == kExitOk ? out : err) << parsed.message << '\n';
        if (parsed.exit_code == kExitUsage) err << "run 'sarfx --help' for usage\n";
        return parsed.exit_code;
    }
    return run(*parsed.command, out, err);
}

}  // namespace sarfx::cli
