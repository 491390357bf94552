#include "sarfx/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include "sarfx/filter_io.hpp"
#include "sarfx/fingerprint.hpp"
#include "sarfx/forgery.hpp"

namespace sarfx {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw InvalidArgument("referenced file does not exist: " + p.string());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

AmplitudeImage load_tile(const fs::path& p) {
    auto raster = read_raster(p);
    if (auto* a = std::get_if<AmplitudeImage>(&raster)) return std::move(*a);
    if (auto* z = std::get_if<ComplexImage>(&raster)) return z->amplitude();
    throw FormatError(p.string() + ": masks cannot be manifest tiles");
}

TransferFunction resolve_plan_filter(const FilterPlan& plan) {
    if (plan.known) return read_transfer_function(*plan.known);
    std::vector<EstimationSource> sources;
    for (const auto& p : plan.sources) sources.push_back(read_estimation_source(p));
    return estimate_transfer_function(sources, plan.strategy, plan.smoothing);
}

struct Job {
    std::size_t manifest_index;
    std::size_t edit_index;
};

}  // namespace

std::uint64_t item_seed(std::uint64_t master_seed, const std::string& item_id, const std::string& stage) {
    return derive_seed(master_seed, item_id, stage);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j, const fs::path& base_dir) {
    ExperimentConfig cfg;
    try {
        cfg.schema_version = j.at("schema_version").get<int>();
        if (cfg.schema_version != kExperimentSchemaVersion)
            throw InvalidArgument("unsupported schema_version " + std::to_string(cfg.schema_version));
        cfg.master_seed = j.value("master_seed", std::uint64_t{0});
        if (j.contains("output_dir")) cfg.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
        for (const auto& m : j.value("manifest", nlohmann::json::array())) {
            ManifestItem item{m.at("id").get<std::string>(), resolve(base_dir, m.at("path").get<std::string>()),
                              m.value("product", std::string("default"))};
            require_file(item.path);
            cfg.manifest.push_back(std::move(item));
        }
        std::map<std::string, int> seen;
        for (const auto& m : cfg.manifest)
            if (seen[m.id]++) throw InvalidArgument("duplicate manifest id '" + m.id + "'");

        if (j.contains("splice")) {
            const auto& s = j["splice"];
            cfg.region_size = s.value("region", cfg.region_size);
            if (s.contains("edits")) cfg.edits = s["edits"].get<std::vector<std::string>>();
        }
        if (cfg.edits.empty())
            for (const auto& e : local_edit_table()) cfg.edits.push_back(e.name);
        for (const auto& e : cfg.edits)
            if (!find_local_edit(e)) throw InvalidArgument("unknown edit '" + e + "'");

        if (j.contains("attack") && !j["attack"].is_null()) {
            const auto& a = j["attack"];
            AttackPlan plan;
            const auto mode = parse_speckle_mode(a.value("speckle_mode", std::string("phase-only")));
            if (!mode) throw InvalidArgument("unknown speckle_mode");
            plan.speckle_mode = *mode;
            plan.sigma_s = a.value("sigma_s", kDefaultSpeckleSigma);
            plan.histogram_match = a.value("histogram_match", true);
            plan.despeckle_hook = a.value("despeckle", std::string(kIdentityDespeckler));
            const auto& f = a.at("filter");
            if (f.contains("known")) {
                if (f.contains("sources")) throw InvalidArgument("filter: 'known' conflicts with 'sources'");
                plan.filter.known = resolve(base_dir, f["known"].get<std::string>());
                require_file(*plan.filter.known);
            } else {
                const auto st = parse_strategy(f.at("strategy").get<std::string>());
                if (!st || *st == Strategy::known) throw InvalidArgument("filter: unknown estimation strategy");
                plan.filter.strategy = *st;
                for (const auto& p : f.at("sources")) {
                    plan.filter.sources.push_back(resolve(base_dir, p.get<std::string>()));
                    require_file(plan.filter.sources.back());
                }
                if (plan.filter.sources.empty()) throw InvalidArgument("filter: no estimation sources");
                if (f.contains("smoothing"))
                    plan.filter.smoothing = SmoothingParams{f["smoothing"].at("sigma").get<double>(),
                                                            f["smoothing"].at("kernel_size").get<std::size_t>()};
            }
            cfg.attack = std::move(plan);
        }
        if (j.contains("metrics")) {
            cfg.dynamic_range = j["metrics"].value("dynamic_range", cfg.dynamic_range);
            cfg.fingerprint = j["metrics"].value("fingerprint", cfg.fingerprint);
        }
        if (cfg.fingerprint != "none") {
            const auto providers = fingerprint_providers();
            if (std::find(providers.begin(), providers.end(), cfg.fingerprint) == providers.end())
                throw InvalidArgument("unknown fingerprint provider '" + cfg.fingerprint + "'");
        }
        cfg.save_images = j.value("save_images", false);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("experiment config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_experiment_config(j, path.parent_path());
}

std::size_t worker_count() {
    if (const char* env = std::getenv("SARFX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    if (cfg.save_images) fs::create_directories(cfg.output_dir / "items");

    // Tiles grouped by product in manifest order; each manifest item knows its slot.
    struct Slot {
        std::string product;
        std::size_t local = 0;
    };
    std::map<std::string, std::vector<AmplitudeImage>> product_tiles;
    std::map<std::string, std::vector<std::size_t>> product_members;
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < cfg.manifest.size(); ++i) {
        const auto& m = cfg.manifest[i];
        slots.push_back({m.product, product_tiles[m.product].size()});
        product_tiles[m.product].push_back(load_tile(m.path));
        product_members[m.product].push_back(i);
    }

    std::optional<TransferFunction> h;
    if (cfg.attack && !cfg.manifest.empty()) h = resolve_plan_filter(cfg.attack->filter);

    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cfg.manifest.size(); ++i)
        for (std::size_t e = 0; e < cfg.edits.size(); ++e) jobs.push_back({i, e});
    std::vector<ExperimentRow> rows(jobs.size());

    const auto process = [&](const Job& job) {
        const auto& item = cfg.manifest[job.manifest_index];
        const auto edit = *find_local_edit(cfg.edits[job.edit_index]);
        ExperimentRow row;
        row.item_id = item.id + "/" + edit.name;
        row.tile_id = item.id;
        row.product = item.product;
        row.edit = edit.name;
        try {
            const Slot& slot = slots[job.manifest_index];
            const auto& group = product_tiles.at(slot.product);
            const auto sp = random_splice(group, cfg.region_size, edit.kind, edit.range_class,
                                          item_seed(cfg.master_seed, row.item_id, "splice"), slot.local);
            row.parameter = sp.provenance["edit"]["parameter"].get<double>();
            row.provenance = sp.provenance;
            row.provenance["item_id"] = row.item_id;
            row.provenance["donor_tile_id"] =
                cfg.manifest[product_members.at(slot.product)[sp.provenance["donor_tile"].get<std::size_t>()]].id;

            AmplitudeImage output = sp.image;
            const AmplitudeImage* reference = &group[slot.local];
            if (cfg.attack) {
                AttackConfig ac;
                ac.speckle_mode = cfg.attack->speckle_mode;
                ac.sigma_s = cfg.attack->sigma_s;
                ac.seed = item_seed(cfg.master_seed, row.item_id, "attack");
                ac.histogram_match = cfg.attack->histogram_match;
                ac.despeckle_hook = cfg.attack->despeckle_hook;
                output = run_attack(sp.image, ac, *h).attacked;
                reference = &sp.image;
                row.provenance["attack_seed"] = ac.seed;
            }
            row.metrics = evaluate_metrics(output, *reference, cfg.dynamic_range);
            if (cfg.fingerprint != "none") {
                row.auc_before = auc_roc(compute_fingerprint(cfg.fingerprint, sp.image), sp.mask).max_polarity;
                if (cfg.attack)
                    row.auc_after = auc_roc(compute_fingerprint(cfg.fingerprint, output), sp.mask).max_polarity;
            }
            if (cfg.save_images) {
                std::string stem = row.item_id;
                std::replace(stem.begin(), stem.end(), '/', '_');
                write_raster(output, cfg.output_dir / "items" / (stem + ".sarf"));
                write_raster(sp.mask, cfg.output_dir / "items" / (stem + ".mask.sarf"));
            }
        } catch (const std::exception& e) {
            row.metrics.reset();
            row.auc_before.reset();
            row.auc_after.reset();
            row.status = std::string("error: ") + e.what();
        }
        rows[&job - jobs.data()] = std::move(row);
    };

    std::atomic<std::size_t> next{0};
    const std::size_t n_workers = std::min(worker_count(), std::max<std::size_t>(1, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) process(jobs[k]);
        });
    for (auto& t : pool) t.join();

    ExperimentSummary summary;
    summary.report_path = cfg.output_dir / "report.csv";
    summary.summary_path = cfg.output_dir / "summary.csv";
    summary.provenance_path = cfg.output_dir / "provenance.jsonl";

    std::ofstream report(summary.report_path), prov(summary.provenance_path);
    report << "id,tile,product,edit,parameter,ssim,msssim,msssim_scales,enl_a,enl_b,delta_enl_pct,auc_before,"
              "auc_after,status\n";
    struct Agg {
        std::size_t count = 0, failed = 0;
        double ssim = 0, msssim = 0, denl = 0, auc_b = 0, auc_a = 0;
        std::size_t n_auc_b = 0, n_auc_a = 0;
    };
    std::map<std::string, Agg> agg;
    for (const auto& r : rows) {
        auto& a = agg[r.edit];
        ++a.count;
        if (r.status != "ok") ++a.failed, ++summary.failed;
        report << csv_field(r.item_id) << ',' << csv_field(r.tile_id) << ',' << csv_field(r.product) << ','
               << r.edit << ',' << fmt(r.parameter) << ',';
        if (r.metrics) {
            const auto& m = *r.metrics;
            report << fmt(m.ssim) << ',' << fmt(m.msssim) << ',' << m.msssim_scales << ',' << fmt(m.enl_source) << ','
                   << fmt(m.enl_reference) << ',' << fmt(m.delta_enl_abs_rel) << ',';
            a.ssim += m.ssim;
            a.msssim += m.msssim;
            a.denl += m.delta_enl_abs_rel;
        } else {
            report << ",,,,,,";
        }
        report << fmt(r.auc_before) << ',' << fmt(r.auc_after) << ',' << csv_field(r.status) << '\n';
        if (r.auc_before) a.auc_b += *r.auc_before, ++a.n_auc_b;
        if (r.auc_after) a.auc_a += *r.auc_after, ++a.n_auc_a;
        if (!r.provenance.is_null()) prov << r.provenance.dump() << '\n';
    }

    std::ofstream sum(summary.summary_path);
    sum << "edit,count,failed,mean_ssim,mean_msssim,mean_delta_enl_pct,mean_auc_before,mean_auc_after\n";
    for (const auto& name : cfg.edits) {
        const auto it = agg.find(name);
        if (it == agg.end()) continue;
        const auto& a = it->second;
        const std::size_t ok = a.count - a.failed;
        const auto mean = [](double s, std::size_t n) { return n ? fmt(s / double(n)) : std::string(); };
        sum << name << ',' << a.count << ',' << a.failed << ',' << mean(a.ssim, ok) << ',' << mean(a.msssim, ok) << ','
            << mean(a.denl, ok) << ',' << mean(a.auc_b, a.n_auc_b) << ',' << mean(a.auc_a, a.n_auc_a) << '\n';
    }
    if (!report || !sum || !prov) throw Error("failed writing experiment reports to " + cfg.output_dir.string());
    summary.rows = std::move(rows);
    return summary;
}

}  // namespace sarfx
