// Subset selection. ila_select grids the pool's coverage into ~N_sub cells
// and keeps the deepest instruction per cell, trimming or backfilling by RID
// to hit the target size exactly. Also: the seeded uniform baseline and the
// controlled-subset constructions (frequency-ranked regions, RID bands) used
// by the scaling study.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoscape/landscape.hpp"
#include "infoscape/projection.hpp"
#include "infoscape/record.hpp"

namespace infoscape {

enum class SelectionPolicy { ila, random_uniform, controlled };

std::string to_string(SelectionPolicy policy);
SelectionPolicy parse_policy(const std::string& name);

struct SubsetSpec {
    size_t target_size = 0;
    SelectionPolicy policy = SelectionPolicy::ila;
    std::optional<double> rid_low;  // controlled only
    std::optional<double> rid_high; // controlled only
    std::optional<size_t> region_patches;
    uint64_t seed = 0;

    // target_size within the pool, RID band present iff controlled
    void validate(size_t pool_size) const;
};

// Returns exactly n_sub record indices in pool order. Selection grid:
// ceil(sqrt(n_sub)) segments per axis over the embedding bounds. Per occupied
// cell the member with maximum depth wins (ties -> lower id). Excess winners
// are trimmed by (rid desc, depth desc, id asc); shortfalls are backfilled
// from unselected records in the same order. Deterministic for any thread
// count. depths.rid must be populated.
std::vector<uint32_t> ila_select(const Pool& pool, const PlanarEmbedding& emb,
                                 const DepthTable& depths, size_t n_sub, int threads = 1);

// Seeded partial Fisher-Yates; uniform without replacement. Returned indices
// are in pool order.
std::vector<uint32_t> random_select(const Pool& pool, size_t n_sub, uint64_t seed);

struct Region {
    std::vector<int64_t> patches; // patch-grid flat indices, densest first

    size_t area() const { return patches.size(); } // occupied-patch count
};

// Ranks the occupied patches of the landscape's RID grid (the patch grid of
// the scaling study) by occupancy descending, ties -> lower flat index.
// Region l is the top n_l patches; n_levels must be strictly ascending and
// bounded by the occupied-patch count. The returned regions are nested.
std::vector<Region> build_regions(const Landscape& ls, std::span<const size_t> n_levels);

// Draws exactly n_sub records from the region: floor(n_sub / #patches) per
// patch, remainder to the densest patches, sampled uniformly (seeded) from
// members with rid in [rid_low, rid_high). Throws listing every patch whose
// in-band candidates fall short of its quota. Indices in pool order.
std::vector<uint32_t> draw_controlled_subset(const Pool& pool, const Landscape& ls,
                                             const Region& region, size_t n_sub, double rid_low,
                                             double rid_high, uint64_t seed);

struct SubsetSummary {
    size_t size = 0;
    size_t coverage = 0; // occupied cells on the landscape's coverage grid
    double mean_depth = 0.0;
    double mean_rid = 0.0;
};

SubsetSummary summarize_subset(std::span<const uint32_t> subset, const Landscape& ls);

// subset.ids writer/reader: one record id per line
void write_subset_ids(const Pool& pool, std::span<const uint32_t> subset,
                      const std::filesystem::path& path);
std::vector<std::string> read_subset_ids(const std::filesystem::path& path);

}  // namespace infoscape
