// Drives the installed binary through std::system and cross-checks its
// outputs against direct library calls: the CLI must stay a thin shell.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "infoscape/corpus_io.hpp"
#include "infoscape/landscape.hpp"
#include "infoscape/regression.hpp"
#include "infoscape/selection.hpp"
#include "infoscape/simulator.hpp"
#include "test_support.hpp"

using namespace infoscape;
using test_support::TempDir;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const TempDir& dir, const std::string& args) {
    auto out_file = dir.path / "cli.out", err_file = dir.path / "cli.err";
    std::string cmd = std::string(INFOSCAPE_CLI_PATH) + " " + args + " > " + out_file.string() +
                      " 2> " + err_file.string();
    int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

// 5k-record clustered fixture shared by the CLI checks
SyntheticPoolConfig fixture_config() {
    SyntheticPoolConfig cfg;
    cfg.n_records = 5000;
    cfg.seed = 71;
    cfg.clusters = {
        {{0.0, 0.0}, {0.5, 0.5}, 2.0, 0.5, 0.2, false},
        {{6.0, 2.0}, {0.6, 0.6}, 1.5, 0.3, 0.15, true},
        {{-3.0, 5.0}, {0.4, 0.7}, 1.0, 0.7, 0.25, false},
    };
    return cfg;
}

}  // namespace

TEST_CASE("select writes an id file of exactly n lines plus a manifest") {
    TempDir dir;
    SyntheticPool syn = generate_pool(fixture_config());
    auto pool_path = dir.path / "pool.jsonl";
    save_pool(syn.pool, pool_path);

    auto out1 = dir.path / "run1";
    CliResult r = run_cli(dir, "select --input " + pool_path.string() + " --output " +
                                   out1.string() + " --policy ila --n 400");
    REQUIRE(r.exit_code == 0);
    REQUIRE(std::filesystem::exists(out1 / "subset.ids"));
    REQUIRE(std::filesystem::exists(out1 / "manifest.json"));

    auto ids = read_subset_ids(out1 / "subset.ids");
    CHECK(ids.size() == 400);

    // rerun with identical flags: byte-identical primary output
    auto out2 = dir.path / "run2";
    CliResult r2 = run_cli(dir, "select --input " + pool_path.string() + " --output " +
                                    out2.string() + " --policy ila --n 400");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(out1 / "subset.ids") == slurp(out2 / "subset.ids"));

    // manifest is valid JSON carrying the run parameters
    std::string manifest = slurp(out1 / "manifest.json");
    CHECK(manifest.find("\"subcommand\": \"select\"") != std::string::npos);
    CHECK(manifest.find("\"policy\": \"ila\"") != std::string::npos);
}

TEST_CASE("cli selection equals the direct library call") {
    TempDir dir;
    SyntheticPool syn = generate_pool(fixture_config());
    auto pool_path = dir.path / "pool.jsonl";
    save_pool(syn.pool, pool_path);

    auto out = dir.path / "sel";
    CliResult r = run_cli(dir, "select --input " + pool_path.string() + " --output " +
                                   out.string() + " --policy ila --n 250");
    REQUIRE(r.exit_code == 0);
    auto cli_ids = read_subset_ids(out / "subset.ids");

    // same defaults the CLI uses: passthrough projection, 500x500 / 100x100
    Pool pool = ingest(pool_path, SchemaMode::strict);
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{});
    auto subset = ila_select(pool, emb, ls.depths(), 250);
    REQUIRE(subset.size() == cli_ids.size());
    for (size_t i = 0; i < subset.size(); ++i) CHECK(pool.records[subset[i]].id == cli_ids[i]);
}

TEST_CASE("random policy respects the seed flag") {
    TempDir dir;
    SyntheticPool syn = generate_pool(fixture_config());
    auto pool_path = dir.path / "pool.jsonl";
    save_pool(syn.pool, pool_path);

    auto out_a = dir.path / "a";
    auto out_b = dir.path / "b";
    auto out_c = dir.path / "c";
    REQUIRE(run_cli(dir, "select --input " + pool_path.string() + " --output " + out_a.string() +
                             " --policy random --n 100 --seed 5")
                .exit_code == 0);
    REQUIRE(run_cli(dir, "select --input " + pool_path.string() + " --output " + out_b.string() +
                             " --policy random --n 100 --seed 5")
                .exit_code == 0);
    REQUIRE(run_cli(dir, "select --input " + pool_path.string() + " --output " + out_c.string() +
                             " --policy random --n 100 --seed 6")
                .exit_code == 0);
    CHECK(slurp(out_a / "subset.ids") == slurp(out_b / "subset.ids"));
    CHECK(slurp(out_a / "subset.ids") != slurp(out_c / "subset.ids"));

    auto lib = random_select(syn.pool, 100, 5);
    auto cli_ids = read_subset_ids(out_a / "subset.ids");
    REQUIRE(lib.size() == cli_ids.size());
    for (size_t i = 0; i < lib.size(); ++i) CHECK(syn.pool.records[lib[i]].id == cli_ids[i]);
}

TEST_CASE("regress output table matches the direct fit") {
    TempDir dir;
    // synthetic observation table through the simulator pipeline
    SyntheticPool syn = generate_pool(fixture_config());
    LandscapeParams params;
    params.grid_x = params.grid_y = 80;
    params.rid_grid_x = params.rid_grid_y = 16;
    Landscape ls = Landscape::build(syn.pool, syn.embedding, params);
    auto oracle = make_surrogate_oracle(syn.embedding, ls.depths().depth, 40, 40, 2.0, 1.2);
    const size_t levels[] = {6, 12, 24};
    const RidBand bands[] = {{0.1, 0.55}, {0.55, 1.01}};
    auto rows = run_controlled_study(syn.pool, ls, oracle, levels, bands, 60, 3);
    auto obs_path = dir.path / "observations.csv";
    write_scaling_table(rows, obs_path);

    auto out = dir.path / "reg";
    CliResult r = run_cli(dir, "regress --input " + obs_path.string() + " --output " + out.string());
    REQUIRE(r.exit_code == 0);

    RegressionResult direct = fit_scaling_regression(read_observations(obs_path));
    RegressionResult from_cli = read_regression_table(out / "regression.csv");
    for (size_t k = 0; k < 3; ++k) {
        CHECK(from_cli.beta[k] == direct.beta[k]);
        CHECK(from_cli.stderrs[k] == direct.stderrs[k]);
    }
    CHECK(from_cli.r_squared == direct.r_squared);
    CHECK(from_cli.n_points == direct.n_points);
}

TEST_CASE("unknown flags exit with code 2 and usage text") {
    TempDir dir;
    CliResult r = run_cli(dir, "select --no-such-flag");
    CHECK(r.exit_code == 2);
    CHECK_FALSE(r.err.empty());

    CliResult r2 = run_cli(dir, "frobnicate");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("runtime failures exit nonzero with a single-line error") {
    TempDir dir;
    auto bad = dir.path / "bad.jsonl";
    std::ofstream(bad) << "{\"id\":\"a\"}\n";
    CliResult r = run_cli(dir, "ingest --input " + bad.string() + " --output " +
                                   (dir.path / "out").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("dedup subcommand drops planted duplicates") {
    TempDir dir;
    Pool pool;
    auto rec = test_support::make_record("one", 0, 0);
    rec.query = "completely identical question text";
    rec.response = "completely identical answer text";
    pool.records.push_back(rec);
    rec.id = "two";
    pool.records.push_back(rec);
    rec.id = "three";
    rec.query = "a very different question about geometry";
    rec.response = "a thoroughly different answer concerning triangles";
    pool.records.push_back(rec);
    auto pool_path = dir.path / "pool.jsonl";
    save_pool(pool, pool_path);

    auto out = dir.path / "dedup";
    CliResult r = run_cli(dir, "dedup --input " + pool_path.string() + " --output " + out.string());
    REQUIRE(r.exit_code == 0);
    Pool kept = ingest(out / "pool.jsonl", SchemaMode::strict);
    REQUIRE(kept.size() == 2);
    CHECK(kept.records[0].id == "one");
    CHECK(kept.records[1].id == "three");
}

TEST_CASE("landscape subcommand writes tables and heatmaps") {
    TempDir dir;
    SyntheticPool syn = generate_pool(fixture_config());
    auto pool_path = dir.path / "pool.jsonl";
    save_pool(syn.pool, pool_path);

    auto out = dir.path / "ls";
    CliResult r = run_cli(dir, "landscape --input " + pool_path.string() + " --output " +
                                   out.string() + " --grid 50x50 --rid-grid 10x10 --format both");
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(out / "landscape.csv"));
    CHECK(std::filesystem::exists(out / "heatmap.svg"));
    CHECK(std::filesystem::exists(out / "depth_table.csv"));

    // follows the library exactly
    Pool pool = ingest(pool_path, SchemaMode::strict);
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    LandscapeParams params;
    params.grid_x = params.grid_y = 50;
    params.rid_grid_x = params.rid_grid_y = 10;
    Landscape ls = Landscape::build(pool, emb, params);
    auto rows = read_landscape_table(out / "landscape.csv");
    CHECK(table_coverage(rows) == ls.coverage());
    CHECK(table_information(rows) == ls.information());
}

TEST_CASE("report subcommand bundles observations and regression") {
    TempDir dir;
    std::vector<Observation> obs;
    for (int i = 1; i <= 4; ++i) {
        for (int j = 1; j <= 2; ++j) {
            double rid = 0.2 * i, cov = 60.0 * j;
            obs.push_back(Observation{std::exp(1.0 - 0.4 * std::log(rid) * j), rid, cov});
        }
    }
    auto obs_path = dir.path / "obs.csv";
    write_observations(obs, obs_path);
    RegressionResult res = fit_scaling_regression(obs);
    auto reg_path = dir.path / "reg.csv";
    write_regression_table(res, reg_path);

    auto out = dir.path / "report";
    CliResult r = run_cli(dir, "report --observations " + obs_path.string() + " --regression " +
                                   reg_path.string() + " --output " + out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(out / "summary.txt"));
    CHECK(std::filesystem::exists(out / "observations.csv"));
    CHECK(std::filesystem::exists(out / "regression.csv"));
    std::string summary = slurp(out / "summary.txt");
    CHECK(summary.find("scaling regression") != std::string::npos);
}

TEST_CASE("ingest and project work through the cli") {
    TempDir dir;
    SyntheticPoolConfig cfg = fixture_config();
    cfg.n_records = 300;
    SyntheticPool syn = generate_pool(cfg);
    auto raw = dir.path / "raw.jsonl";
    save_pool(syn.pool, raw);

    auto ing = dir.path / "ingested";
    CliResult r = run_cli(dir, "ingest --input " + raw.string() + " --output " + ing.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("kept 300") != std::string::npos);

    auto proj = dir.path / "projected";
    CliResult rp = run_cli(dir, "project --input " + (ing / "pool.jsonl").string() + " --output " +
                                    proj.string());
    REQUIRE(rp.exit_code == 0);
    std::ifstream coords(proj / "coords.csv");
    std::string header;
    std::getline(coords, header);
    CHECK(header == "id,x,y");
    size_t rows = 0;
    std::string line;
    while (std::getline(coords, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 300);
}

TEST_CASE("simulate runs the scaling experiment end to end") {
    TempDir dir;
    SyntheticPoolConfig cfg = fixture_config();
    cfg.n_records = 3000;
    auto cfg_path = dir.path / "config.json";
    cfg.to_json_file(cfg_path);

    auto out = dir.path / "exp";
    CliResult r = run_cli(dir, "simulate --config " + cfg_path.string() + " --output " +
                                   out.string() +
                                   " --experiment scaling --sizes 100,400 --seeds 1,2 "
                                   "--oracle-grid 32x32 --rid-grid 20x20");
    REQUIRE(r.exit_code == 0);
    REQUIRE(std::filesystem::exists(out / "observations.csv"));
    auto rows = read_scaling_table(out / "observations.csv");
    CHECK(rows.size() == 8); // 2 policies x 2 sizes x 2 seeds

    auto reg = dir.path / "reg";
    CliResult rr = run_cli(dir, "regress --input " + (out / "observations.csv").string() +
                                    " --output " + reg.string());
    CHECK(rr.exit_code == 0);
    CHECK(std::filesystem::exists(reg / "regression.csv"));
}

TEST_CASE("pipeline files run stage by stage") {
    TempDir dir;
    SyntheticPoolConfig cfg = fixture_config();
    cfg.n_records = 800;
    auto cfg_path = dir.path / "config.json";
    cfg.to_json_file(cfg_path);

    auto sim_out = dir.path / "sim";
    auto sel_out = dir.path / "sel";
    auto pipeline_path = dir.path / "pipeline.txt";
    std::ofstream(pipeline_path) << "# two-stage run\n"
                                 << "simulate --config " << cfg_path.string() << " --output "
                                 << sim_out.string() << "\n"
                                 << "select --input " << (sim_out / "pool.jsonl").string()
                                 << " --output " << sel_out.string() << " --policy ila --n 64\n";

    CliResult r = run_cli(dir, "pipeline --file " + pipeline_path.string());
    REQUIRE(r.exit_code == 0);
    CHECK(read_subset_ids(sel_out / "subset.ids").size() == 64);
    CHECK(r.out.find("pipeline: 2 stages completed") != std::string::npos);
}
