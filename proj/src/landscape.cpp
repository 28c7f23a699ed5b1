#include "infoscape/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "infoscape/format.hpp"
#include "infoscape/parallel.hpp"

namespace infoscape {

double compute_depth(const InstructionRecord& rec) {
    return rec.loss_delta() / static_cast<double>(rec.token_count) *
           static_cast<double>(rec.effective_label_count());
}

DepthTable compute_depth_table(const Pool& pool) {
    DepthTable t;
    t.delta.resize(pool.size());
    t.depth.resize(pool.size());
    t.rid.assign(pool.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < pool.size(); ++i) {
        t.delta[i] = pool.records[i].loss_delta();
        t.depth[i] = compute_depth(pool.records[i]);
    }
    return t;
}

std::vector<double> relative_depth(std::span<const double> depth,
                                   std::span<const int64_t> record_cell) {
    if (depth.size() != record_cell.size())
        throw std::invalid_argument("relative_depth: size mismatch");

    std::unordered_map<int64_t, std::vector<uint32_t>> by_cell;
    for (size_t i = 0; i < record_cell.size(); ++i)
        by_cell[record_cell[i]].push_back(static_cast<uint32_t>(i));

    std::vector<double> rid(depth.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> sorted;
    for (auto& [cell, members] : by_cell) {
        const double n = static_cast<double>(members.size());
        sorted.clear();
        for (uint32_t m : members) sorted.push_back(depth[m]);
        std::sort(sorted.begin(), sorted.end());
        for (uint32_t m : members) {
            // #members strictly greater = n - upper_bound rank
            auto up = std::upper_bound(sorted.begin(), sorted.end(), depth[m]);
            double greater = static_cast<double>(sorted.end() - up);
            rid[m] = 1.0 - greater / n;
        }
    }
    return rid;
}

Landscape Landscape::build(const Pool& pool, const PlanarEmbedding& emb,
                           const LandscapeParams& params, int threads) {
    if (pool.size() != emb.size())
        throw std::invalid_argument("Landscape::build: pool/embedding size mismatch");

    Landscape ls;
    ls.params_ = params;
    ls.grid_ = GridSpec(params.grid_x, params.grid_y, emb.bounds);
    ls.rid_grid_ = GridSpec(params.rid_grid_x, params.rid_grid_y, emb.bounds);
    ls.embedding_ = emb;
    ls.depths_ = compute_depth_table(pool);

    const size_t n = pool.size();
    ls.record_cell_.resize(n);
    ls.record_rid_cell_.resize(n);
    parallel_chunks(n, threads, [&](size_t, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            ls.record_cell_[i] = ls.grid_.cell_of(emb.coords[i]);
            ls.record_rid_cell_[i] = ls.rid_grid_.cell_of(emb.coords[i]);
        }
    });

    // Sequential fill keeps member lists in pool order; max/argmax are
    // order-insensitive under the (depth, id) comparator.
    for (size_t i = 0; i < n; ++i) {
        CellStats& cell = ls.cells_[ls.record_cell_[i]];
        cell.members.push_back(static_cast<uint32_t>(i));
        double d = ls.depths_.depth[i];
        if (cell.deepest == std::numeric_limits<uint32_t>::max() || d > cell.max_depth ||
            (d == cell.max_depth && pool.records[i].id < pool.records[cell.deepest].id)) {
            cell.max_depth = d;
            cell.deepest = static_cast<uint32_t>(i);
        }
    }

    ls.depths_.rid = relative_depth(ls.depths_.depth, ls.record_rid_cell_);
    return ls;
}

size_t Landscape::coverage() const {
    size_t covered = 0;
    for (const auto& [flat, cell] : cells_) {
        if (cell.occupancy() >= params_.occupancy_threshold) ++covered;
    }
    return covered;
}

double Landscape::patch_depth(int64_t flat_cell) const {
    auto it = cells_.find(flat_cell);
    return it == cells_.end() ? 0.0 : it->second.max_depth;
}

double Landscape::information() const {
    if (cells_.empty()) return 0.0;
    std::vector<std::pair<int64_t, double>> occupied;
    occupied.reserve(cells_.size());
    for (const auto& [flat, cell] : cells_) occupied.emplace_back(flat, cell.max_depth);
    std::sort(occupied.begin(), occupied.end());
    double sum = 0.0;
    for (const auto& [flat, md] : occupied) sum += md;
    return sum / static_cast<double>(occupied.size());
}

double Landscape::mean_depth() const {
    if (depths_.size() == 0) return 0.0;
    double sum = 0.0;
    for (double d : depths_.depth) sum += d;
    return sum / static_cast<double>(depths_.size());
}

double Landscape::mean_rid() const {
    if (depths_.size() == 0) return 0.0;
    double sum = 0.0;
    for (double r : depths_.rid) sum += r;
    return sum / static_cast<double>(depths_.size());
}

size_t subset_coverage(std::span<const uint32_t> subset, const PlanarEmbedding& emb,
                       const GridSpec& grid, size_t occupancy_threshold) {
    std::unordered_map<int64_t, size_t> occupancy;
    for (uint32_t i : subset) ++occupancy[grid.cell_of(emb.coords[i])];
    if (occupancy_threshold <= 1) return occupancy.size();
    size_t covered = 0;
    for (const auto& [flat, count] : occupancy) {
        if (count >= occupancy_threshold) ++covered;
    }
    return covered;
}

std::unordered_map<int64_t, double> subset_patch_depths(std::span<const uint32_t> subset,
                                                        const PlanarEmbedding& emb,
                                                        std::span<const double> depth,
                                                        const GridSpec& grid) {
    std::unordered_map<int64_t, double> maxima;
    for (uint32_t i : subset) {
        int64_t flat = grid.cell_of(emb.coords[i]);
        auto [it, inserted] = maxima.emplace(flat, depth[i]);
        if (!inserted && depth[i] > it->second) it->second = depth[i];
    }
    return maxima;
}

void write_landscape_table(const Landscape& ls, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());

    std::vector<int64_t> order;
    order.reserve(ls.cells().size());
    for (const auto& [flat, cell] : ls.cells()) order.push_back(flat);
    std::sort(order.begin(), order.end());

    out << "cell_x,cell_y,occupancy,max_depth\n";
    for (int64_t flat : order) {
        auto [cx, cy] = ls.grid().cell_xy(flat);
        const CellStats& cell = ls.cells().at(flat);
        out << cx << ',' << cy << ',' << cell.occupancy() << ','
            << format_double(cell.max_depth) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<LandscapeTableRow> read_landscape_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || csv_split(line) != std::vector<std::string>{"cell_x", "cell_y", "occupancy", "max_depth"})
        throw std::runtime_error("bad landscape table header in " + path.string());
    std::vector<LandscapeTableRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 4) throw std::runtime_error("bad landscape table row: " + line);
        rows.push_back(LandscapeTableRow{static_cast<int>(parse_int(f[0])),
                                         static_cast<int>(parse_int(f[1])),
                                         static_cast<uint64_t>(parse_int(f[2])),
                                         parse_double(f[3])});
    }
    return rows;
}

size_t table_coverage(std::span<const LandscapeTableRow> rows, size_t occupancy_threshold) {
    size_t covered = 0;
    for (const auto& r : rows) {
        if (r.occupancy >= occupancy_threshold) ++covered;
    }
    return covered;
}

double table_information(std::span<const LandscapeTableRow> rows) {
    size_t occupied = 0;
    double sum = 0.0;
    for (const auto& r : rows) {
        if (r.occupancy >= 1) {
            sum += r.max_depth;
            ++occupied;
        }
    }
    return occupied == 0 ? 0.0 : sum / static_cast<double>(occupied);
}

void write_heatmap_svg(const Landscape& ls, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());

    const int gx = ls.grid().gx, gy = ls.grid().gy;
    const double cell_px = std::max(1.0, 800.0 / std::max(gx, gy));
    double lo = 0.0, hi = 0.0;
    for (const auto& [flat, cell] : ls.cells()) {
        lo = std::min(lo, cell.max_depth);
        hi = std::max(hi, cell.max_depth);
    }
    if (hi <= lo) hi = lo + 1.0;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(gx * cell_px)
        << "\" height=\"" << format_double(gy * cell_px) << "\">\n";
    for (int iy = 0; iy < gy; ++iy) {
        for (int ix = 0; ix < gx; ++ix) {
            auto it = ls.cells().find(ls.grid().flat_index(ix, iy));
            int shade = 235; // unoccupied cells are near-white
            if (it != ls.cells().end()) {
                double t = (it->second.max_depth - lo) / (hi - lo);
                shade = 224 - static_cast<int>(std::lround(t * 192.0));
            }
            // SVG y axis points down; flip so high cell_y renders at the top
            out << "<rect x=\"" << format_double(ix * cell_px) << "\" y=\""
                << format_double((gy - 1 - iy) * cell_px) << "\" width=\"" << format_double(cell_px)
                << "\" height=\"" << format_double(cell_px) << "\" fill=\"rgb(" << shade << ','
                << shade << ",255)\"/>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_depth_table(const Pool& pool, const Landscape& ls, const std::filesystem::path& path) {
    if (pool.size() != ls.size())
        throw std::invalid_argument("write_depth_table: pool/landscape size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << "id,delta,depth,rid,cell_x,cell_y\n";
    for (size_t i = 0; i < pool.size(); ++i) {
        auto [cx, cy] = ls.grid().cell_xy(ls.record_cell()[i]);
        out << csv_escape(pool.records[i].id) << ',' << format_double(ls.depths().delta[i]) << ','
            << format_double(ls.depths().depth[i]) << ',' << format_double(ls.depths().rid[i])
            << ',' << cx << ',' << cy << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace infoscape
