// The information landscape: a grid over the semantic plane holding per-cell
// occupancy and maximum instruction depth, plus per-record depth and relative
// information depth (RID). Coverage counts occupied cells; the landscape
// aggregate is the mean per-cell maximum depth over occupied cells.
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "infoscape/grid.hpp"
#include "infoscape/projection.hpp"
#include "infoscape/record.hpp"

namespace infoscape {

// (base_loss - sft_loss) / token_count * label_count, with label_count
// floored at 1 for unlabeled records. Negative values signal a loss
// increase after reference fine-tuning and are allowed.
double compute_depth(const InstructionRecord& rec);

struct DepthTable {
    std::vector<double> delta; // base_loss - sft_loss, per record
    std::vector<double> depth; // per-record information depth
    std::vector<double> rid;   // relative information depth in (0, 1]; NaN until computed

    size_t size() const { return depth.size(); }
};

// delta and depth only; rid starts as NaN.
DepthTable compute_depth_table(const Pool& pool);

// RID via the within-cell strictly-greater quantile: for each record j in a
// cell of n members, rid_j = 1 - (#members with depth > depth_j) / n. Ties
// share a value; a singleton cell yields rid = 1. Rank-based, so any
// strictly increasing transform of depths leaves it unchanged.
std::vector<double> relative_depth(std::span<const double> depth,
                                   std::span<const int64_t> record_cell);

struct CellStats {
    std::vector<uint32_t> members; // record indices, pool order
    double max_depth = 0.0;
    uint32_t deepest = std::numeric_limits<uint32_t>::max(); // ties -> lower id

    size_t occupancy() const { return members.size(); }
};

struct LandscapeParams {
    int grid_x = 500; // coverage grid
    int grid_y = 500;
    int rid_grid_x = 100; // RID quantile grid, independent of the coverage grid
    int rid_grid_y = 100;
    size_t occupancy_threshold = 1; // cells count as covered at occupancy >= this
};

class Landscape {
public:
    static Landscape build(const Pool& pool, const PlanarEmbedding& emb,
                           const LandscapeParams& params = {}, int threads = 1);

    const GridSpec& grid() const { return grid_; }
    const GridSpec& rid_grid() const { return rid_grid_; }
    const LandscapeParams& params() const { return params_; }
    const DepthTable& depths() const { return depths_; }
    const PlanarEmbedding& embedding() const { return embedding_; }
    const std::unordered_map<int64_t, CellStats>& cells() const { return cells_; }
    const std::vector<int64_t>& record_cell() const { return record_cell_; }
    const std::vector<int64_t>& record_rid_cell() const { return record_rid_cell_; }
    size_t size() const { return record_cell_.size(); }

    // number of cells with occupancy >= occupancy_threshold
    size_t coverage() const;

    // maximum member depth of a cell; 0 when the cell has no instance
    double patch_depth(int64_t flat_cell) const;

    // mean of patch_depth over occupied cells, summed in flat-index order so
    // the value does not depend on hash-map iteration or thread count
    double information() const;

    double mean_depth() const;
    double mean_rid() const;

private:
    GridSpec grid_;
    GridSpec rid_grid_;
    LandscapeParams params_;
    DepthTable depths_;
    PlanarEmbedding embedding_; // owned copy; the landscape outlives its inputs
    std::unordered_map<int64_t, CellStats> cells_;
    std::vector<int64_t> record_cell_;
    std::vector<int64_t> record_rid_cell_;
};

// --- subset views on a fixed grid ------------------------------------------

// occupied-cell count of a subset of records on the given grid
size_t subset_coverage(std::span<const uint32_t> subset, const PlanarEmbedding& emb,
                       const GridSpec& grid, size_t occupancy_threshold = 1);

// per-cell maximum depth over the subset's members
std::unordered_map<int64_t, double> subset_patch_depths(std::span<const uint32_t> subset,
                                                        const PlanarEmbedding& emb,
                                                        std::span<const double> depth,
                                                        const GridSpec& grid);

// --- serialization ----------------------------------------------------------

struct LandscapeTableRow {
    int cell_x = 0;
    int cell_y = 0;
    uint64_t occupancy = 0;
    double max_depth = 0.0;
};

// header "cell_x,cell_y,occupancy,max_depth", occupied cells only, ordered by
// flat cell index
void write_landscape_table(const Landscape& ls, const std::filesystem::path& path);
std::vector<LandscapeTableRow> read_landscape_table(const std::filesystem::path& path);

// coverage / aggregate recomputed from a serialized table; matches the
// originating landscape exactly
size_t table_coverage(std::span<const LandscapeTableRow> rows, size_t occupancy_threshold = 1);
double table_information(std::span<const LandscapeTableRow> rows);

// SVG heatmap, one rect per grid cell shaded by max_depth
void write_heatmap_svg(const Landscape& ls, const std::filesystem::path& path);

// per-record table: id,delta,depth,rid,cell_x,cell_y (coverage-grid cell)
void write_depth_table(const Pool& pool, const Landscape& ls, const std::filesystem::path& path);

}  // namespace infoscape
