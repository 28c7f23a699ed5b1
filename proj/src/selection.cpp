#include "infoscape/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "infoscape/parallel.hpp"
#include "infoscape/rng.hpp"

namespace infoscape {

std::string to_string(SelectionPolicy policy) {
    switch (policy) {
        case SelectionPolicy::ila: return "ila";
        case SelectionPolicy::random_uniform: return "random";
        case SelectionPolicy::controlled: return "controlled";
    }
    throw std::logic_error("unknown policy");
}

SelectionPolicy parse_policy(const std::string& name) {
    if (name == "ila") return SelectionPolicy::ila;
    if (name == "random") return SelectionPolicy::random_uniform;
    if (name == "controlled") return SelectionPolicy::controlled;
    throw std::invalid_argument("unknown selection policy '" + name + "'");
}

void SubsetSpec::validate(size_t pool_size) const {
    if (target_size == 0) throw std::invalid_argument("SubsetSpec: target_size must be >= 1");
    if (target_size > pool_size)
        throw std::invalid_argument("SubsetSpec: target_size " + std::to_string(target_size) +
                                    " exceeds pool size " + std::to_string(pool_size));
    bool full_band = rid_low.has_value() && rid_high.has_value();
    bool any_band = rid_low.has_value() || rid_high.has_value();
    if (policy == SelectionPolicy::controlled && !full_band)
        throw std::invalid_argument(
            "SubsetSpec: controlled policy requires both RID band ends (tau-low and tau-high)");
    if (policy != SelectionPolicy::controlled && any_band)
        throw std::invalid_argument("SubsetSpec: RID band is only valid for the controlled policy");
}

namespace {

// trim/backfill order: rid desc, depth desc, id asc
struct RankedCompare {
    const Pool& pool;
    const DepthTable& depths;

    bool operator()(uint32_t a, uint32_t b) const {
        if (depths.rid[a] != depths.rid[b]) return depths.rid[a] > depths.rid[b];
        if (depths.depth[a] != depths.depth[b]) return depths.depth[a] > depths.depth[b];
        return pool.records[a].id < pool.records[b].id;
    }
};

}  // namespace

std::vector<uint32_t> ila_select(const Pool& pool, const PlanarEmbedding& emb,
                                 const DepthTable& depths, size_t n_sub, int threads) {
    const size_t n = pool.size();
    if (n_sub < 1) throw std::invalid_argument("ila_select: n_sub must be >= 1");
    if (n_sub > n)
        throw std::invalid_argument("ila_select: n_sub " + std::to_string(n_sub) +
                                    " exceeds pool size " + std::to_string(n));
    if (depths.size() != n || emb.size() != n)
        throw std::invalid_argument("ila_select: pool/embedding/depth size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (std::isnan(depths.rid[i]))
            throw std::invalid_argument("ila_select: depth table has no RID values");
    }

    const int segments = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_sub))));
    const GridSpec grid(segments, segments, emb.bounds);
    const int64_t n_cells = grid.cell_count();

    // Per-cell argmax by (depth, id). The comparator is a strict total order,
    // so chunked computation plus in-order merge is independent of the chunk
    // layout and thread count.
    constexpr uint32_t kEmpty = std::numeric_limits<uint32_t>::max();
    auto better = [&](uint32_t cand, uint32_t incumbent) {
        if (incumbent == kEmpty) return true;
        if (depths.depth[cand] != depths.depth[incumbent])
            return depths.depth[cand] > depths.depth[incumbent];
        return pool.records[cand].id < pool.records[incumbent].id;
    };

    if (threads < 1) threads = 1;
    size_t n_chunks = std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(n, 1));
    std::vector<std::vector<uint32_t>> chunk_best(n_chunks);
    parallel_chunks(n, threads, [&](size_t chunk, size_t begin, size_t end) {
        auto& best = chunk_best[chunk];
        best.assign(static_cast<size_t>(n_cells), kEmpty);
        for (size_t i = begin; i < end; ++i) {
            int64_t cell = grid.cell_of(emb.coords[i]);
            uint32_t& slot = best[static_cast<size_t>(cell)];
            if (better(static_cast<uint32_t>(i), slot)) slot = static_cast<uint32_t>(i);
        }
    });

    std::vector<uint32_t> best(static_cast<size_t>(n_cells), kEmpty);
    for (const auto& partial : chunk_best) {
        if (partial.empty()) continue;
        for (int64_t c = 0; c < n_cells; ++c) {
            uint32_t cand = partial[static_cast<size_t>(c)];
            if (cand != kEmpty && better(cand, best[static_cast<size_t>(c)]))
                best[static_cast<size_t>(c)] = cand;
        }
    }

    std::vector<uint32_t> winners;
    winners.reserve(n_sub);
    for (int64_t c = 0; c < n_cells; ++c) {
        if (best[static_cast<size_t>(c)] != kEmpty) winners.push_back(best[static_cast<size_t>(c)]);
    }

    RankedCompare ranked{pool, depths};
    std::vector<uint32_t> selected;
    if (winners.size() > n_sub) {
        std::sort(winners.begin(), winners.end(), ranked);
        winners.resize(n_sub);
        selected = std::move(winners);
    } else if (winners.size() < n_sub) {
        std::vector<char> taken(n, 0);
        for (uint32_t w : winners) taken[w] = 1;
        std::vector<uint32_t> rest;
        rest.reserve(n - winners.size());
        for (size_t i = 0; i < n; ++i) {
            if (!taken[i]) rest.push_back(static_cast<uint32_t>(i));
        }
        std::sort(rest.begin(), rest.end(), ranked);
        selected = std::move(winners);
        selected.insert(selected.end(), rest.begin(), rest.begin() + (n_sub - selected.size()));
    } else {
        selected = std::move(winners);
    }

    std::sort(selected.begin(), selected.end());
    return selected;
}

std::vector<uint32_t> random_select(const Pool& pool, size_t n_sub, uint64_t seed) {
    const size_t n = pool.size();
    if (n_sub > n)
        throw std::invalid_argument("random_select: n_sub " + std::to_string(n_sub) +
                                    " exceeds pool size " + std::to_string(n));
    std::vector<uint32_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(i);

    Rng rng(seed);
    for (size_t i = 0; i < n_sub; ++i) {
        size_t j = i + static_cast<size_t>(rng.bounded(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n_sub);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<Region> build_regions(const Landscape& ls, std::span<const size_t> n_levels) {
    // occupancy per RID-grid patch
    std::unordered_map<int64_t, size_t> occupancy;
    for (int64_t cell : ls.record_rid_cell()) ++occupancy[cell];

    std::vector<std::pair<int64_t, size_t>> ranked(occupancy.begin(), occupancy.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    for (size_t l = 0; l < n_levels.size(); ++l) {
        if (n_levels[l] == 0) throw std::invalid_argument("build_regions: levels must be >= 1");
        if (l > 0 && n_levels[l] <= n_levels[l - 1])
            throw std::invalid_argument("build_regions: levels must be strictly ascending");
        if (n_levels[l] > ranked.size())
            throw std::invalid_argument("build_regions: level " + std::to_string(n_levels[l]) +
                                        " exceeds occupied patch count " +
                                        std::to_string(ranked.size()));
    }

    std::vector<Region> regions;
    regions.reserve(n_levels.size());
    for (size_t n_l : n_levels) {
        Region r;
        r.patches.reserve(n_l);
        for (size_t i = 0; i < n_l; ++i) r.patches.push_back(ranked[i].first);
        regions.push_back(std::move(r));
    }
    return regions;
}

std::vector<uint32_t> draw_controlled_subset(const Pool& pool, const Landscape& ls,
                                             const Region& region, size_t n_sub, double rid_low,
                                             double rid_high, uint64_t seed) {
    if (region.patches.empty()) throw std::invalid_argument("draw_controlled_subset: empty region");
    if (n_sub == 0) throw std::invalid_argument("draw_controlled_subset: n_sub must be >= 1");
    if (!(rid_low < rid_high))
        throw std::invalid_argument("draw_controlled_subset: RID band must satisfy low < high");

    const size_t n_patches = region.patches.size();
    const size_t base = n_sub / n_patches;
    const size_t remainder = n_sub % n_patches;

    // candidates per patch, in pool order
    std::unordered_map<int64_t, std::vector<uint32_t>> candidates;
    for (int64_t patch : region.patches) candidates[patch]; // keep empty patches visible
    for (size_t i = 0; i < pool.size(); ++i) {
        double r = ls.depths().rid[i];
        if (r < rid_low || r >= rid_high) continue;
        auto it = candidates.find(ls.record_rid_cell()[i]);
        if (it != candidates.end()) it->second.push_back(static_cast<uint32_t>(i));
    }

    // quota check before any sampling; the remainder goes to the densest
    // patches, which are first in region order
    std::string deficit;
    for (size_t p = 0; p < n_patches; ++p) {
        size_t quota = base + (p < remainder ? 1 : 0);
        size_t have = candidates.at(region.patches[p]).size();
        if (have < quota) {
            auto [cx, cy] = ls.rid_grid().cell_xy(region.patches[p]);
            if (!deficit.empty()) deficit += ", ";
            deficit += "patch(" + std::to_string(cx) + "," + std::to_string(cy) + ") has " +
                       std::to_string(have) + " in-band candidates, needs " + std::to_string(quota);
        }
    }
    if (!deficit.empty())
        throw std::runtime_error("draw_controlled_subset: insufficient candidates: " + deficit);

    Rng rng(seed);
    std::vector<uint32_t> subset;
    subset.reserve(n_sub);
    for (size_t p = 0; p < n_patches; ++p) {
        size_t quota = base + (p < remainder ? 1 : 0);
        std::vector<uint32_t>& pool_p = candidates.at(region.patches[p]);
        for (size_t i = 0; i < quota; ++i) {
            size_t j = i + static_cast<size_t>(rng.bounded(pool_p.size() - i));
            std::swap(pool_p[i], pool_p[j]);
            subset.push_back(pool_p[i]);
        }
    }

    std::sort(subset.begin(), subset.end());
    return subset;
}

SubsetSummary summarize_subset(std::span<const uint32_t> subset, const Landscape& ls) {
    SubsetSummary s;
    s.size = subset.size();
    if (subset.empty()) return s;
    s.coverage =
        subset_coverage(subset, ls.embedding(), ls.grid(), ls.params().occupancy_threshold);
    double depth_sum = 0.0, rid_sum = 0.0;
    for (uint32_t i : subset) {
        depth_sum += ls.depths().depth[i];
        rid_sum += ls.depths().rid[i];
    }
    s.mean_depth = depth_sum / static_cast<double>(subset.size());
    s.mean_rid = rid_sum / static_cast<double>(subset.size());
    return s;
}

void write_subset_ids(const Pool& pool, std::span<const uint32_t> subset,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    for (uint32_t i : subset) out << pool.records[i].id << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> read_subset_ids(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

}  // namespace infoscape
