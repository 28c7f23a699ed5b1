#include "infoscape/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "infoscape/format.hpp"
#include "infoscape/rng.hpp"

namespace infoscape {

void SyntheticPoolConfig::validate() const {
    if (n_records < 1) throw std::invalid_argument("config: n_records must be >= 1");
    if (clusters.empty()) throw std::invalid_argument("config: need at least one cluster");
    for (size_t c = 0; c < clusters.size(); ++c) {
        const ClusterSpec& cl = clusters[c];
        if (!(cl.spread.x > 0.0) || !(cl.spread.y > 0.0))
            throw std::invalid_argument("config: cluster " + std::to_string(c) +
                                        " spread must be > 0");
        if (!(cl.weight > 0.0))
            throw std::invalid_argument("config: cluster " + std::to_string(c) +
                                        " weight must be > 0");
        if (!(cl.depth_scale >= 0.0) || !std::isfinite(cl.depth_scale) ||
            !std::isfinite(cl.depth_location))
            throw std::invalid_argument("config: cluster " + std::to_string(c) +
                                        " depth parameters must be finite");
    }
    if (token_min < 1 || token_max < token_min)
        throw std::invalid_argument("config: token range must satisfy 1 <= min <= max");
    if (label_min < 0 || label_max < label_min)
        throw std::invalid_argument("config: label range must satisfy 0 <= min <= max");
}

SyntheticPoolConfig SyntheticPoolConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);

    SyntheticPoolConfig cfg;
    cfg.n_records = j.at("n_records").get<size_t>();
    cfg.seed = j.value("seed", uint64_t{0});
    if (j.contains("token_range")) {
        cfg.token_min = j["token_range"].at(0).get<int64_t>();
        cfg.token_max = j["token_range"].at(1).get<int64_t>();
    }
    if (j.contains("label_range")) {
        cfg.label_min = j["label_range"].at(0).get<int64_t>();
        cfg.label_max = j["label_range"].at(1).get<int64_t>();
    }
    cfg.clusters.clear();
    for (const auto& jc : j.at("clusters")) {
        ClusterSpec cl;
        cl.center = Point2{jc.at("center").at(0).get<double>(), jc.at("center").at(1).get<double>()};
        cl.spread = Point2{jc.at("spread").at(0).get<double>(), jc.at("spread").at(1).get<double>()};
        cl.weight = jc.value("weight", 1.0);
        cl.depth_location = jc.value("depth_location", 0.3);
        cl.depth_scale = jc.value("depth_scale", 0.1);
        cl.heavy_tail = jc.value("heavy_tail", false);
        cfg.clusters.push_back(cl);
    }
    cfg.validate();
    return cfg;
}

void SyntheticPoolConfig::to_json_file(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["n_records"] = n_records;
    j["seed"] = seed;
    j["token_range"] = {token_min, token_max};
    j["label_range"] = {label_min, label_max};
    j["clusters"] = nlohmann::ordered_json::array();
    for (const ClusterSpec& cl : clusters) {
        nlohmann::ordered_json jc;
        jc["center"] = {cl.center.x, cl.center.y};
        jc["spread"] = {cl.spread.x, cl.spread.y};
        jc["weight"] = cl.weight;
        jc["depth_location"] = cl.depth_location;
        jc["depth_scale"] = cl.depth_scale;
        jc["heavy_tail"] = cl.heavy_tail;
        j["clusters"].push_back(jc);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << j.dump(2) << '\n';
}

SyntheticPool generate_pool(const SyntheticPoolConfig& config) {
    config.validate();
    Rng rng(config.seed);

    // cumulative cluster weights for the discrete pick
    std::vector<double> cum;
    cum.reserve(config.clusters.size());
    double total_weight = 0.0;
    for (const ClusterSpec& cl : config.clusters) {
        total_weight += cl.weight;
        cum.push_back(total_weight);
    }

    SyntheticPool out;
    out.pool.provenance = "synthetic:seed=" + std::to_string(config.seed);
    out.pool.records.reserve(config.n_records);
    out.embedding.coords.reserve(config.n_records);
    out.true_depth.reserve(config.n_records);

    char idbuf[32];
    for (size_t i = 0; i < config.n_records; ++i) {
        double pick = rng.uniform01() * total_weight;
        size_t c = static_cast<size_t>(std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
        if (c >= config.clusters.size()) c = config.clusters.size() - 1;
        const ClusterSpec& cl = config.clusters[c];

        Point2 p{rng.normal(cl.center.x, cl.spread.x), rng.normal(cl.center.y, cl.spread.y)};
        double depth = cl.heavy_tail ? cl.depth_location + cl.depth_scale * rng.lognormal(1.0)
                                     : rng.normal(cl.depth_location, cl.depth_scale);

        InstructionRecord rec;
        std::snprintf(idbuf, sizeof(idbuf), "syn-%08zu", i);
        rec.id = idbuf;
        rec.query = "synthetic query " + std::to_string(i);
        rec.response = "synthetic response " + std::to_string(i);
        rec.token_count = rng.uniform_int(config.token_min, config.token_max);
        int64_t n_labels = rng.uniform_int(config.label_min, config.label_max);
        for (int64_t l = 0; l < n_labels; ++l) rec.labels.push_back("skill-" + std::to_string(l));

        // invert the depth formula so compute_depth returns `depth`
        double label_count = static_cast<double>(rec.effective_label_count());
        double delta = depth * static_cast<double>(rec.token_count) / label_count;
        rec.base_loss = std::abs(delta) + 1.0;
        rec.sft_loss = rec.base_loss - delta;
        rec.coords = std::array<double, 2>{p.x, p.y};

        out.pool.records.push_back(std::move(rec));
        out.embedding.coords.push_back(p);
        out.true_depth.push_back(depth);
    }

    out.embedding.bounds = padded_bounds(out.embedding.coords);
    return out;
}

SurrogateOracle make_surrogate_oracle(const PlanarEmbedding& pool_embedding,
                                      std::span<const double> depth, int gx, int gy,
                                      double baseline_loss, double sensitivity) {
    if (pool_embedding.size() != depth.size())
        throw std::invalid_argument("make_surrogate_oracle: embedding/depth size mismatch");
    if (!(baseline_loss > 0.0) || !(sensitivity > 0.0))
        throw std::invalid_argument("make_surrogate_oracle: baseline_loss and sensitivity must be > 0");

    SurrogateOracle oracle;
    oracle.grid = GridSpec(gx, gy, pool_embedding.bounds);
    oracle.baseline_loss = baseline_loss;
    oracle.sensitivity = sensitivity;
    oracle.pool_patch_depth.assign(static_cast<size_t>(oracle.grid.cell_count()), 0.0);
    oracle.pool_occupied_cell.assign(static_cast<size_t>(oracle.grid.cell_count()), 0);
    for (size_t i = 0; i < depth.size(); ++i) {
        size_t flat = static_cast<size_t>(oracle.grid.cell_of(pool_embedding.coords[i]));
        if (!oracle.pool_occupied_cell[flat]) {
            oracle.pool_occupied_cell[flat] = 1;
            oracle.pool_patch_depth[flat] = depth[i];
            ++oracle.pool_occupied;
        } else if (depth[i] > oracle.pool_patch_depth[flat]) {
            oracle.pool_patch_depth[flat] = depth[i];
        }
    }
    return oracle;
}

double surrogate_dev_loss(const SurrogateOracle& oracle, std::span<const uint32_t> subset,
                          const PlanarEmbedding& emb, std::span<const double> depth) {
    if (oracle.pool_occupied == 0)
        throw std::invalid_argument("surrogate_dev_loss: oracle built over an empty pool");

    // subset per-cell maxima on the oracle grid
    std::unordered_map<int64_t, double> sub_max;
    sub_max.reserve(subset.size());
    for (uint32_t i : subset) {
        int64_t flat = oracle.grid.cell_of(emb.coords[i]);
        auto [it, inserted] = sub_max.emplace(flat, depth[i]);
        if (!inserted && depth[i] > it->second) it->second = depth[i];
    }

    // Per-cell contribution min(subset depth, pool depth) floored at 0:
    // negative-depth cells add no information, which keeps the loss within
    // (0, C0] and monotone under subset growth.
    double captured = 0.0;
    for (const auto& [flat, d] : sub_max) {
        double c = std::min(d, oracle.pool_patch_depth[static_cast<size_t>(flat)]);
        if (c > 0.0) captured += c;
    }
    double loss = oracle.baseline_loss -
                  oracle.sensitivity * captured / static_cast<double>(oracle.pool_occupied);
    return std::max(loss, 0.01 * oracle.baseline_loss);
}

namespace {

ScalingRow score_subset(const char* policy, size_t size, uint64_t seed,
                        std::span<const uint32_t> subset, const Pool& pool, const Landscape& ls,
                        const SurrogateOracle& oracle) {
    ScalingRow row;
    row.policy = policy;
    row.size = size;
    row.seed = seed;
    row.dev_loss = surrogate_dev_loss(oracle, subset, ls.embedding(), ls.depths().depth);
    SubsetSummary s = summarize_subset(subset, ls);
    row.mean_rid = s.mean_rid;
    row.mean_depth = s.mean_depth;
    row.coverage_area = static_cast<double>(s.coverage);
    for (uint32_t i : subset) row.token_total += static_cast<uint64_t>(pool.records[i].token_count);
    return row;
}

}  // namespace

std::vector<ScalingRow> run_scaling_experiment(const Pool& pool, const Landscape& ls,
                                               const SurrogateOracle& oracle,
                                               std::span<const size_t> sizes,
                                               std::span<const SelectionPolicy> policies,
                                               std::span<const uint64_t> seeds, int threads) {
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] > pool.size())
            throw std::invalid_argument("run_scaling_experiment: size exceeds pool");
        if (i > 0 && sizes[i] < sizes[i - 1])
            throw std::invalid_argument("run_scaling_experiment: sizes must be ascending");
    }

    std::vector<ScalingRow> rows;
    rows.reserve(sizes.size() * policies.size() * seeds.size());
    for (SelectionPolicy policy : policies) {
        for (size_t size : sizes) {
            // ILA is deterministic; reuse the draw across seeds
            std::vector<uint32_t> ila_subset;
            if (policy == SelectionPolicy::ila)
                ila_subset = ila_select(pool, ls.embedding(), ls.depths(), size, threads);
            for (uint64_t seed : seeds) {
                switch (policy) {
                    case SelectionPolicy::ila:
                        rows.push_back(score_subset("ila", size, seed, ila_subset, pool, ls, oracle));
                        break;
                    case SelectionPolicy::random_uniform: {
                        auto subset = random_select(pool, size, seed);
                        rows.push_back(score_subset("random", size, seed, subset, pool, ls, oracle));
                        break;
                    }
                    case SelectionPolicy::controlled:
                        throw std::invalid_argument(
                            "run_scaling_experiment: controlled draws need regions and RID bands; "
                            "use run_controlled_study");
                }
            }
        }
    }
    return rows;
}

std::vector<ScalingRow> run_controlled_study(const Pool& pool, const Landscape& ls,
                                             const SurrogateOracle& oracle,
                                             std::span<const size_t> region_levels,
                                             std::span<const RidBand> bands, size_t n_sub,
                                             uint64_t seed) {
    std::vector<Region> regions = build_regions(ls, region_levels);
    std::vector<ScalingRow> rows;
    rows.reserve(regions.size() * bands.size());
    uint64_t draw_seed = seed;
    for (const Region& region : regions) {
        for (const RidBand& band : bands) {
            auto subset =
                draw_controlled_subset(pool, ls, region, n_sub, band.low, band.high, draw_seed++);
            ScalingRow row = score_subset("controlled", n_sub, draw_seed - 1, subset, pool, ls, oracle);
            row.coverage_area = static_cast<double>(region.area());
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_scaling_table(std::span<const ScalingRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << "policy,size,seed,dev_loss,mean_rid,coverage_area,mean_depth,token_total\n";
    for (const ScalingRow& r : rows) {
        out << r.policy << ',' << r.size << ',' << r.seed << ',' << format_double(r.dev_loss) << ','
            << format_double(r.mean_rid) << ',' << format_double(r.coverage_area) << ','
            << format_double(r.mean_depth) << ',' << r.token_total << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ScalingRow> read_scaling_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        csv_split(line) != std::vector<std::string>{"policy", "size", "seed", "dev_loss", "mean_rid",
                                                    "coverage_area", "mean_depth", "token_total"})
        throw std::runtime_error("bad scaling table header in " + path.string());
    std::vector<ScalingRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 8) throw std::runtime_error("bad scaling table row: " + line);
        ScalingRow r;
        r.policy = f[0];
        r.size = static_cast<size_t>(parse_int(f[1]));
        r.seed = static_cast<uint64_t>(parse_int(f[2]));
        r.dev_loss = parse_double(f[3]);
        r.mean_rid = parse_double(f[4]);
        r.coverage_area = parse_double(f[5]);
        r.mean_depth = parse_double(f[6]);
        r.token_total = static_cast<uint64_t>(parse_int(f[7]));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace infoscape
