// infoscape CLI: exposes the pipeline as subcommands with reproducible,
// manifest-stamped runs. Every subcommand is a thin shell over one library
// operation; no computation happens here.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infoscape/corpus_io.hpp"
#include "infoscape/format.hpp"
#include "infoscape/landscape.hpp"
#include "infoscape/parallel.hpp"
#include "infoscape/projection.hpp"
#include "infoscape/regression.hpp"
#include "infoscape/report.hpp"
#include "infoscape/selection.hpp"
#include "infoscape/simhash.hpp"
#include "infoscape/simulator.hpp"
#include "infoscape/version.hpp"

namespace fs = std::filesystem;
using namespace infoscape;

namespace {

using Clock = std::chrono::steady_clock;

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::map<std::string, std::string> input_digests;
    std::optional<uint64_t> seed;
    double duration_seconds = 0.0;
};

void write_manifest(const RunManifest& m, const fs::path& out_dir) {
    nlohmann::ordered_json j;
    j["tool"] = "infoscape";
    j["version"] = kVersion;
    j["subcommand"] = m.subcommand;
    j["parameters"] = m.parameters;
    j["input_digests"] = m.input_digests;
    if (m.seed) j["seed"] = *m.seed;
    j["duration_seconds"] = m.duration_seconds;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest in " + out_dir.string());
    out << j.dump(2) << '\n';
}

struct GridDims {
    int gx = 0;
    int gy = 0;
};

GridDims parse_grid(const std::string& text) {
    auto sep = text.find('x');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= text.size())
        throw CLI::ValidationError("grid must look like 500x500, got '" + text + "'");
    GridDims g;
    g.gx = static_cast<int>(parse_int(text.substr(0, sep)));
    g.gy = static_cast<int>(parse_int(text.substr(sep + 1)));
    if (g.gx < 1 || g.gy < 1) throw CLI::ValidationError("grid dims must be >= 1");
    return g;
}

std::vector<size_t> parse_size_list(const std::string& text) {
    std::vector<size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(static_cast<size_t>(parse_int(item)));
    }
    if (out.empty()) throw CLI::ValidationError("expected a comma-separated list, got '" + text + "'");
    return out;
}

ProjectionMode parse_proj_mode(const std::string& name) {
    if (name == "passthrough") return ProjectionMode::passthrough;
    if (name == "linear2d") return ProjectionMode::linear2d;
    throw CLI::ValidationError("unknown projection mode '" + name + "'");
}

// shared options for commands that build a landscape
struct LandscapeFlags {
    std::string grid = "500x500";
    std::string rid_grid = "100x100";
    std::string mode = "passthrough";
    size_t occupancy_threshold = 1;

    LandscapeParams params() const {
        GridDims g = parse_grid(grid), r = parse_grid(rid_grid);
        LandscapeParams p;
        p.grid_x = g.gx;
        p.grid_y = g.gy;
        p.rid_grid_x = r.gx;
        p.rid_grid_y = r.gy;
        p.occupancy_threshold = occupancy_threshold;
        return p;
    }
};

void add_landscape_flags(CLI::App* cmd, LandscapeFlags& flags) {
    cmd->add_option("--grid", flags.grid, "coverage grid as GXxGY")->capture_default_str();
    cmd->add_option("--rid-grid", flags.rid_grid, "RID quantile grid as GXxGY")
        ->capture_default_str();
    cmd->add_option("--mode", flags.mode, "projection mode: passthrough|linear2d")
        ->capture_default_str();
    cmd->add_option("--occupancy-threshold", flags.occupancy_threshold,
                    "cells count as covered at occupancy >= this")
        ->capture_default_str();
}

int run(int argc, char** argv) {
    CLI::App app{"information-landscape measurement and subset selection"};
    app.set_version_flag("--version", std::string("infoscape ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough(); // lets --threads appear after the subcommand name

    int threads = default_threads();
    app.add_option("--threads", threads, "worker threads (results are thread-count independent)")
        ->capture_default_str();

    std::string in_path, out_dir;

    auto* cmd_ingest = app.add_subcommand("ingest", "validate a line-delimited record file");
    std::string schema = "strict";
    cmd_ingest->add_option("--input", in_path, "record file, one JSON object per line")->required();
    cmd_ingest->add_option("--output", out_dir, "output directory")->required();
    cmd_ingest->add_option("--schema", schema, "strict|lenient")->capture_default_str();

    auto* cmd_dedup = app.add_subcommand("dedup", "drop near-duplicate records (SimHash)");
    double threshold = 0.95;
    cmd_dedup->add_option("--input", in_path, "pool file")->required();
    cmd_dedup->add_option("--output", out_dir, "output directory")->required();
    cmd_dedup->add_option("--threshold", threshold, "similarity threshold in [0,1]")
        ->capture_default_str();

    auto* cmd_project = app.add_subcommand("project", "place records on the 2-D semantic plane");
    std::string proj_mode = "passthrough";
    cmd_project->add_option("--input", in_path, "pool file")->required();
    cmd_project->add_option("--output", out_dir, "output directory")->required();
    cmd_project->add_option("--mode", proj_mode, "passthrough|linear2d")->capture_default_str();

    auto* cmd_landscape = app.add_subcommand("landscape", "build the information landscape");
    LandscapeFlags ls_flags;
    std::string ls_format = "table";
    cmd_landscape->add_option("--input", in_path, "pool file")->required();
    cmd_landscape->add_option("--output", out_dir, "output directory")->required();
    add_landscape_flags(cmd_landscape, ls_flags);
    cmd_landscape->add_option("--format", ls_format, "table|heatmap|both")->capture_default_str();

    auto* cmd_select = app.add_subcommand("select", "draw a subset from a pool");
    LandscapeFlags sel_flags;
    std::string policy = "ila";
    size_t n_sub = 0;
    uint64_t seed = 0;
    double tau_low = 0.0, tau_high = 1.0;
    size_t region_patches = 0;
    cmd_select->add_option("--input", in_path, "pool file")->required();
    cmd_select->add_option("--output", out_dir, "output directory")->required();
    cmd_select->add_option("--policy", policy, "ila|random|controlled")->capture_default_str();
    cmd_select->add_option("--n", n_sub, "subset size")->required();
    cmd_select->add_option("--seed", seed, "seed for random/controlled draws")->capture_default_str();
    add_landscape_flags(cmd_select, sel_flags);
    auto* opt_tau_low = cmd_select->add_option("--tau-low", tau_low, "controlled: RID band low");
    auto* opt_tau_high = cmd_select->add_option("--tau-high", tau_high, "controlled: RID band high");
    cmd_select->add_option("--region-patches", region_patches,
                           "controlled: densest-patch region size");

    auto* cmd_regress = app.add_subcommand("regress", "fit the log-log scaling regression");
    cmd_regress->add_option("--input", in_path, "observation table (CSV)")->required();
    cmd_regress->add_option("--output", out_dir, "output directory")->required();

    auto* cmd_simulate = app.add_subcommand("simulate", "generate a synthetic pool / run studies");
    std::string config_path, experiment = "none";
    std::string sizes_text = "100,200,500", seeds_text = "0", policies_text = "ila,random";
    std::string levels_text = "20,40,80", bands_text = "0.2:0.6,0.6:1.01";
    std::string oracle_grid = "64x64";
    double c0 = 2.0, kappa = 1.0;
    size_t controlled_n = 0;
    LandscapeFlags sim_flags;
    cmd_simulate->add_option("--config", config_path, "generator config (JSON)")->required();
    cmd_simulate->add_option("--output", out_dir, "output directory")->required();
    cmd_simulate->add_option("--experiment", experiment, "none|scaling|controlled")
        ->capture_default_str();
    cmd_simulate->add_option("--sizes", sizes_text, "scaling: subset sizes")->capture_default_str();
    cmd_simulate->add_option("--seeds", seeds_text, "scaling: seeds")->capture_default_str();
    cmd_simulate->add_option("--policies", policies_text, "scaling: policies")
        ->capture_default_str();
    cmd_simulate->add_option("--levels", levels_text, "controlled: region levels")
        ->capture_default_str();
    cmd_simulate->add_option("--bands", bands_text, "controlled: RID bands as lo:hi,...")
        ->capture_default_str();
    cmd_simulate->add_option("--n", controlled_n, "controlled: subset size per draw");
    cmd_simulate->add_option("--oracle-grid", oracle_grid, "surrogate oracle grid")
        ->capture_default_str();
    cmd_simulate->add_option("--c0", c0, "surrogate baseline loss")->capture_default_str();
    cmd_simulate->add_option("--kappa", kappa, "surrogate sensitivity")->capture_default_str();
    cmd_simulate->add_option("--seed", seed, "controlled: draw seed")->capture_default_str();
    add_landscape_flags(cmd_simulate, sim_flags);

    auto* cmd_report = app.add_subcommand("report", "emit tables and a plain-text summary");
    std::string obs_path, regression_path;
    cmd_report->add_option("--observations", obs_path, "observation table to include");
    cmd_report->add_option("--regression", regression_path, "regression table to include");
    cmd_report->add_option("--output", out_dir, "output directory")->required();

    auto* cmd_pipeline = app.add_subcommand("pipeline", "run subcommands listed in a file");
    std::string pipeline_path;
    cmd_pipeline->add_option("--file", pipeline_path, "one subcommand invocation per line")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e); // prints help for -h/--version, the error otherwise
        return rc == 0 ? 0 : 2;
    }

    auto started = Clock::now();
    RunManifest manifest;
    auto finish = [&](const std::string& name) {
        manifest.subcommand = name;
        manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - started).count();
        write_manifest(manifest, out_dir);
    };
    auto prepare_out = [&] { fs::create_directories(out_dir); };

    if (*cmd_ingest) {
        prepare_out();
        if (schema != "lenient" && schema != "strict")
            throw std::runtime_error("--schema must be strict or lenient");
        SchemaMode mode = schema == "lenient" ? SchemaMode::lenient : SchemaMode::strict;
        IngestStats stats;
        Pool pool = ingest(in_path, mode, &stats);
        save_pool(pool, fs::path(out_dir) / "pool.jsonl");
        manifest.parameters = {{"input", in_path}, {"schema", schema}};
        manifest.input_digests[in_path] = pool.provenance;
        finish("ingest");
        std::cout << "ingest: kept " << stats.records_kept << " records, skipped "
                  << stats.lines_skipped << "\n";
        return 0;
    }

    if (*cmd_dedup) {
        prepare_out();
        Pool pool = ingest(in_path, SchemaMode::strict);
        DedupStats stats;
        Pool kept = deduplicate(pool, threshold, &stats, threads);
        save_pool(kept, fs::path(out_dir) / "pool.jsonl");
        manifest.parameters = {{"input", in_path},
                               {"threshold", format_double(threshold)},
                               {"threads", std::to_string(threads)}};
        manifest.input_digests[in_path] = pool.provenance;
        finish("dedup");
        std::cout << "dedup: kept " << stats.kept << ", dropped " << stats.dropped << "\n";
        return 0;
    }

    if (*cmd_project) {
        prepare_out();
        Pool pool = ingest(in_path, SchemaMode::strict);
        PlanarEmbedding emb = project(pool, parse_proj_mode(proj_mode));
        write_coords_table(pool, emb, fs::path(out_dir) / "coords.csv");
        manifest.parameters = {{"input", in_path}, {"mode", proj_mode}};
        manifest.input_digests[in_path] = pool.provenance;
        finish("project");
        std::cout << "project: " << emb.size() << " records placed\n";
        return 0;
    }

    if (*cmd_landscape) {
        prepare_out();
        if (ls_format != "table" && ls_format != "heatmap" && ls_format != "both")
            throw std::runtime_error("--format must be table, heatmap, or both");
        Pool pool = ingest(in_path, SchemaMode::strict);
        PlanarEmbedding emb = project(pool, parse_proj_mode(ls_flags.mode));
        Landscape ls = Landscape::build(pool, emb, ls_flags.params(), threads);
        if (ls_format == "table" || ls_format == "both")
            write_landscape_table(ls, fs::path(out_dir) / "landscape.csv");
        if (ls_format == "heatmap" || ls_format == "both")
            write_heatmap_svg(ls, fs::path(out_dir) / "heatmap.svg");
        write_depth_table(pool, ls, fs::path(out_dir) / "depth_table.csv");
        manifest.parameters = {
            {"input", in_path},       {"grid", ls_flags.grid},
            {"rid_grid", ls_flags.rid_grid}, {"mode", ls_flags.mode},
            {"format", ls_format},
            {"occupancy_threshold", std::to_string(ls_flags.occupancy_threshold)}};
        manifest.input_digests[in_path] = pool.provenance;
        finish("landscape");
        std::cout << "landscape: coverage " << ls.coverage() << ", information "
                  << format_double(ls.information()) << "\n";
        return 0;
    }

    if (*cmd_select) {
        prepare_out();
        Pool pool = ingest(in_path, SchemaMode::strict);

        SubsetSpec spec;
        spec.target_size = n_sub;
        spec.policy = parse_policy(policy);
        spec.seed = seed;
        if (*opt_tau_low) spec.rid_low = tau_low;
        if (*opt_tau_high) spec.rid_high = tau_high;
        if (region_patches > 0) spec.region_patches = region_patches;
        spec.validate(pool.size());

        PlanarEmbedding emb = project(pool, parse_proj_mode(sel_flags.mode));
        Landscape ls = Landscape::build(pool, emb, sel_flags.params(), threads);

        std::vector<uint32_t> subset;
        switch (spec.policy) {
            case SelectionPolicy::ila:
                subset = ila_select(pool, emb, ls.depths(), n_sub, threads);
                break;
            case SelectionPolicy::random_uniform:
                subset = random_select(pool, n_sub, seed);
                break;
            case SelectionPolicy::controlled: {
                if (!spec.region_patches)
                    throw std::runtime_error("controlled policy needs --region-patches");
                auto regions = build_regions(ls, std::vector<size_t>{*spec.region_patches});
                subset = draw_controlled_subset(pool, ls, regions[0], n_sub, *spec.rid_low,
                                                *spec.rid_high, seed);
                break;
            }
        }
        write_subset_ids(pool, subset, fs::path(out_dir) / "subset.ids");

        SubsetSummary summary = summarize_subset(subset, ls);
        manifest.parameters = {{"input", in_path},
                               {"policy", policy},
                               {"n", std::to_string(n_sub)},
                               {"grid", sel_flags.grid},
                               {"rid_grid", sel_flags.rid_grid},
                               {"mode", sel_flags.mode},
                               {"subset_coverage", std::to_string(summary.coverage)},
                               {"subset_mean_depth", format_double(summary.mean_depth)},
                               {"subset_mean_rid", format_double(summary.mean_rid)}};
        if (spec.policy == SelectionPolicy::controlled) {
            manifest.parameters["tau_low"] = format_double(*spec.rid_low);
            manifest.parameters["tau_high"] = format_double(*spec.rid_high);
            manifest.parameters["region_patches"] = std::to_string(*spec.region_patches);
        }
        manifest.seed = seed;
        manifest.input_digests[in_path] = pool.provenance;
        finish("select");
        std::cout << "select: " << subset.size() << " records, coverage " << summary.coverage
                  << ", mean depth " << format_double(summary.mean_depth) << "\n";
        return 0;
    }

    if (*cmd_regress) {
        prepare_out();
        auto observations = read_observations(in_path);
        RegressionResult res = fit_scaling_regression(observations);
        write_regression_table(res, fs::path(out_dir) / "regression.csv");
        manifest.parameters = {{"input", in_path},
                               {"n_points", std::to_string(res.n_points)},
                               {"r_squared", format_double(res.r_squared)}};
        manifest.input_digests[in_path] = file_digest(in_path);
        finish("regress");
        std::cout << "regress: beta=(" << format_double(res.beta[0]) << ", "
                  << format_double(res.beta[1]) << ", " << format_double(res.beta[2])
                  << ") r2=" << format_double(res.r_squared) << "\n";
        return 0;
    }

    if (*cmd_simulate) {
        prepare_out();
        SyntheticPoolConfig cfg = SyntheticPoolConfig::from_json_file(config_path);
        SyntheticPool syn = generate_pool(cfg);
        save_pool(syn.pool, fs::path(out_dir) / "pool.jsonl");
        manifest.parameters = {{"config", config_path},
                               {"n_records", std::to_string(cfg.n_records)},
                               {"experiment", experiment}};
        manifest.seed = cfg.seed;
        manifest.input_digests[config_path] = file_digest(config_path);

        if (experiment != "none") {
            Landscape ls = Landscape::build(syn.pool, syn.embedding, sim_flags.params(), threads);
            GridDims og = parse_grid(oracle_grid);
            auto oracle =
                make_surrogate_oracle(syn.embedding, ls.depths().depth, og.gx, og.gy, c0, kappa);

            std::vector<ScalingRow> rows;
            if (experiment == "scaling") {
                auto sizes = parse_size_list(sizes_text);
                std::vector<uint64_t> seeds;
                for (size_t s : parse_size_list(seeds_text)) seeds.push_back(s);
                std::vector<SelectionPolicy> policies;
                std::stringstream ss(policies_text);
                std::string item;
                while (std::getline(ss, item, ',')) policies.push_back(parse_policy(item));
                rows = run_scaling_experiment(syn.pool, ls, oracle, sizes, policies, seeds, threads);
            } else if (experiment == "controlled") {
                if (controlled_n == 0) throw std::runtime_error("controlled experiment needs --n");
                auto levels = parse_size_list(levels_text);
                std::vector<RidBand> bands;
                std::stringstream ss(bands_text);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    auto sep = item.find(':');
                    if (sep == std::string::npos)
                        throw std::runtime_error("bands look like lo:hi,lo:hi");
                    bands.push_back(RidBand{parse_double(item.substr(0, sep)),
                                            parse_double(item.substr(sep + 1))});
                }
                rows = run_controlled_study(syn.pool, ls, oracle, levels, bands, controlled_n, seed);
            } else {
                throw std::runtime_error("--experiment must be none, scaling, or controlled");
            }
            write_scaling_table(rows, fs::path(out_dir) / "observations.csv");
            manifest.parameters["observations"] = std::to_string(rows.size());
        }
        finish("simulate");
        std::cout << "simulate: " << syn.pool.size() << " records\n";
        return 0;
    }

    if (*cmd_report) {
        prepare_out();
        ReportInputs inputs;
        std::vector<Observation> observations;
        RegressionResult regression;
        if (!obs_path.empty()) {
            observations = read_observations(obs_path);
            inputs.observations = &observations;
            manifest.input_digests[obs_path] = file_digest(obs_path);
        }
        if (!regression_path.empty()) {
            regression = read_regression_table(regression_path);
            inputs.regression = &regression;
            manifest.input_digests[regression_path] = file_digest(regression_path);
        }
        emit_report(inputs, out_dir);
        manifest.parameters = {{"observations", obs_path}, {"regression", regression_path}};
        finish("report");
        std::cout << "report: written to " << out_dir << "\n";
        return 0;
    }

    if (*cmd_pipeline) {
        std::ifstream in(pipeline_path);
        if (!in) throw std::runtime_error("cannot open pipeline file: " + pipeline_path);
        std::string line;
        size_t line_no = 0, ran = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> args;
            std::stringstream ss(line);
            std::string tok;
            while (ss >> tok) args.push_back(tok);
            if (args.empty()) continue;
            std::vector<char*> argv2;
            std::string argv0 = "infoscape";
            argv2.push_back(argv0.data());
            for (std::string& a : args) argv2.push_back(a.data());
            int rc = run(static_cast<int>(argv2.size()), argv2.data());
            if (rc != 0) {
                std::cerr << "error: pipeline stage at line " << line_no << " failed\n";
                return rc;
            }
            ++ran;
        }
        std::cout << "pipeline: " << ran << " stages completed\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
