// Synthetic instruction pools with known ground-truth landscapes, plus a
// surrogate dev-loss oracle that falls as the subset's landscape information
// rises. Lets the selection pipeline be exercised end to end with no LLM.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "infoscape/landscape.hpp"
#include "infoscape/projection.hpp"
#include "infoscape/record.hpp"
#include "infoscape/selection.hpp"

namespace infoscape {

struct ClusterSpec {
    Point2 center{0.0, 0.0};
    Point2 spread{1.0, 1.0}; // per-axis Gaussian sigma, > 0
    double weight = 1.0;     // relative sampling mass, > 0
    double depth_location = 0.3;
    double depth_scale = 0.1;
    bool heavy_tail = false; // lognormal instead of normal depth
};

struct SyntheticPoolConfig {
    size_t n_records = 1000;
    std::vector<ClusterSpec> clusters = {ClusterSpec{}};
    int64_t token_min = 8, token_max = 64;   // uniform, inclusive
    int64_t label_min = 0, label_max = 4;    // uniform, inclusive; 0 = unlabeled
    uint64_t seed = 0;

    void validate() const;
    static SyntheticPoolConfig from_json_file(const std::filesystem::path& path);
    void to_json_file(const std::filesystem::path& path) const;
};

struct SyntheticPool {
    Pool pool;
    PlanarEmbedding embedding;
    std::vector<double> true_depth; // instruction depth each record was built to carry
};

// Deterministic for a fixed seed. Records are constructed so that
// compute_depth reproduces true_depth: sft_loss = base_loss -
// depth * token_count / label_count.
SyntheticPool generate_pool(const SyntheticPoolConfig& config);

// Reference grid with the pool's per-cell maxima frozen in. Scoring a subset
// gives baseline_loss - sensitivity * sum_cells(min(subset patch depth, pool
// patch depth)) / occupied(pool), with per-cell contributions floored at 0 so
// the loss is monotone non-increasing under subset growth, and the total
// clamped below at 0.01 * baseline_loss.
struct SurrogateOracle {
    GridSpec grid;
    std::vector<double> pool_patch_depth; // dense, gx*gy, 0 for empty cells
    std::vector<char> pool_occupied_cell; // dense flags
    size_t pool_occupied = 0;
    double baseline_loss = 2.0; // C0 > 0
    double sensitivity = 1.0;   // kappa > 0
};

SurrogateOracle make_surrogate_oracle(const PlanarEmbedding& pool_embedding,
                                      std::span<const double> depth, int gx, int gy,
                                      double baseline_loss, double sensitivity);

double surrogate_dev_loss(const SurrogateOracle& oracle, std::span<const uint32_t> subset,
                          const PlanarEmbedding& emb, std::span<const double> depth);

// One scored subset draw.
struct ScalingRow {
    std::string policy;
    size_t size = 0;
    uint64_t seed = 0;
    double dev_loss = 0.0;
    double mean_rid = 0.0;
    double coverage_area = 0.0; // subset coverage cells; region patch count for controlled rows
    double mean_depth = 0.0;
    uint64_t token_total = 0;
};

// Scores every (policy, size, seed) triple. Sizes must be ascending and
// within the pool.
std::vector<ScalingRow> run_scaling_experiment(const Pool& pool, const Landscape& ls,
                                               const SurrogateOracle& oracle,
                                               std::span<const size_t> sizes,
                                               std::span<const SelectionPolicy> policies,
                                               std::span<const uint64_t> seeds, int threads = 1);

struct RidBand {
    double low = 0.0;
    double high = 1.0;
};

// The controlled-subset protocol: fixed subset size, frequency-ranked nested
// regions crossed with RID bands. Each draw is scored by the oracle;
// coverage_area carries the region's patch count.
std::vector<ScalingRow> run_controlled_study(const Pool& pool, const Landscape& ls,
                                             const SurrogateOracle& oracle,
                                             std::span<const size_t> region_levels,
                                             std::span<const RidBand> bands, size_t n_sub,
                                             uint64_t seed);

void write_scaling_table(std::span<const ScalingRow> rows, const std::filesystem::path& path);
std::vector<ScalingRow> read_scaling_table(const std::filesystem::path& path);

}  // namespace infoscape
