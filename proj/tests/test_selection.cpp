#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "infoscape/selection.hpp"
#include "infoscape/simulator.hpp"
#include "test_support.hpp"

using namespace infoscape;
using test_support::make_pool;
using test_support::make_record;

namespace {

struct Fixture {
    Pool pool;
    PlanarEmbedding emb;
    Landscape landscape;
};

Fixture clustered_fixture(size_t n, uint64_t seed, int rid_g = 25) {
    SyntheticPoolConfig cfg;
    cfg.n_records = n;
    cfg.seed = seed;
    cfg.clusters = {
        {{0.0, 0.0}, {0.6, 0.6}, 3.0, 0.5, 0.25, false},
        {{8.0, 1.0}, {0.5, 0.9}, 2.0, 0.2, 0.15, false},
        {{3.0, 7.0}, {0.8, 0.4}, 1.5, 0.8, 0.30, true},
        {{-5.0, 5.0}, {0.4, 0.4}, 1.0, 0.1, 0.10, false},
        {{-4.0, -6.0}, {0.7, 0.7}, 1.0, 0.4, 0.20, true},
    };
    SyntheticPool syn = generate_pool(cfg);
    LandscapeParams params;
    params.grid_x = params.grid_y = 120;
    params.rid_grid_x = params.rid_grid_y = rid_g;
    Landscape ls = Landscape::build(syn.pool, syn.embedding, params);
    return Fixture{std::move(syn.pool), std::move(syn.embedding), std::move(ls)};
}

// Brute-force reference: exhaustive per-cell argmax on the selection grid,
// then the same trim/backfill ranking applied via independent sorting.
std::vector<uint32_t> ila_oracle(const Pool& pool, const PlanarEmbedding& emb,
                                 const DepthTable& depths, size_t n_sub) {
    const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_sub))));
    const Bounds& b = emb.bounds;
    const double wx = (b.max_x - b.min_x) / g, wy = (b.max_y - b.min_y) / g;

    std::map<std::pair<int, int>, uint32_t> winner;
    for (uint32_t i = 0; i < pool.size(); ++i) {
        int ix = static_cast<int>(std::floor((emb.coords[i].x - b.min_x) / wx));
        int iy = static_cast<int>(std::floor((emb.coords[i].y - b.min_y) / wy));
        auto key = std::make_pair(ix, iy);
        auto it = winner.find(key);
        if (it == winner.end()) {
            winner[key] = i;
        } else {
            uint32_t w = it->second;
            if (depths.depth[i] > depths.depth[w] ||
                (depths.depth[i] == depths.depth[w] && pool.records[i].id < pool.records[w].id)) {
                it->second = i;
            }
        }
    }

    std::vector<uint32_t> winners;
    for (const auto& [key, w] : winner) winners.push_back(w);

    auto ranked = [&](uint32_t a, uint32_t c) {
        if (depths.rid[a] != depths.rid[c]) return depths.rid[a] > depths.rid[c];
        if (depths.depth[a] != depths.depth[c]) return depths.depth[a] > depths.depth[c];
        return pool.records[a].id < pool.records[c].id;
    };

    std::vector<uint32_t> result;
    if (winners.size() >= n_sub) {
        std::sort(winners.begin(), winners.end(), ranked);
        result.assign(winners.begin(), winners.begin() + n_sub);
    } else {
        std::set<uint32_t> taken(winners.begin(), winners.end());
        std::vector<uint32_t> rest;
        for (uint32_t i = 0; i < pool.size(); ++i)
            if (!taken.count(i)) rest.push_back(i);
        std::sort(rest.begin(), rest.end(), ranked);
        result = winners;
        result.insert(result.end(), rest.begin(), rest.begin() + (n_sub - winners.size()));
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace

TEST_CASE("nine lattice points with distinct depths all survive at n_sub=9") {
    std::vector<InstructionRecord> recs;
    int k = 0;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            recs.push_back(make_record("p" + std::to_string(k++), x, y, 0.1 * (k + 1)));
    Pool pool = make_pool(recs);
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{3, 3, 3, 3, 1});

    auto subset = ila_select(pool, emb, ls.depths(), 9);
    REQUIRE(subset.size() == 9);
    std::vector<uint32_t> expect(9);
    std::iota(expect.begin(), expect.end(), 0u);
    CHECK(subset == expect);
}

TEST_CASE("the deeper member of a shared cell wins") {
    Pool pool = make_pool({make_record("shallow", 0.0, 0.0, 0.2),
                           make_record("deep", 0.01, 0.01, 0.5),
                           make_record("corner", 1.0, 1.0, 0.1)});
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{2, 2, 2, 2, 1});

    auto subset = ila_select(pool, emb, ls.depths(), 2);
    REQUIRE(subset.size() == 2);
    CHECK(std::find(subset.begin(), subset.end(), 1u) != subset.end()); // deep
    CHECK(std::find(subset.begin(), subset.end(), 2u) != subset.end()); // corner
}

TEST_CASE("equal depths break ties toward the lower id") {
    Pool pool = make_pool({make_record("zz", 0.0, 0.0, 0.5), make_record("aa", 0.02, 0.0, 0.5),
                           make_record("far", 1.0, 1.0, 0.1)});
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{2, 2, 2, 2, 1});
    auto subset = ila_select(pool, emb, ls.depths(), 2);
    CHECK(std::find(subset.begin(), subset.end(), 1u) != subset.end()); // "aa"
    CHECK(std::find(subset.begin(), subset.end(), 0u) == subset.end()); // "zz"
}

TEST_CASE("ila matches the exhaustive per-cell oracle on a 5k pool") {
    Fixture fx = clustered_fixture(5000, 11);
    for (size_t n_sub : {400u, 1000u, 4999u}) {
        CAPTURE(n_sub);
        auto got = ila_select(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
        auto expect = ila_oracle(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
        CHECK(got.size() == n_sub);
        CHECK(got == expect);
    }
}

TEST_CASE("ila returns exactly n_sub distinct records") {
    Fixture fx = clustered_fixture(2000, 5);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        size_t n_sub = 1 + rng() % 2000;
        auto subset = ila_select(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
        CHECK(subset.size() == n_sub);
        CHECK(std::adjacent_find(subset.begin(), subset.end()) == subset.end());
    }
    CHECK_THROWS_AS(ila_select(fx.pool, fx.emb, fx.landscape.depths(), 2001), std::invalid_argument);
}

TEST_CASE("ila output is identical across thread counts") {
    Fixture fx = clustered_fixture(3000, 29);
    auto t1 = ila_select(fx.pool, fx.emb, fx.landscape.depths(), 700, 1);
    auto t8 = ila_select(fx.pool, fx.emb, fx.landscape.depths(), 700, 8);
    CHECK(t1 == t8);
}

TEST_CASE("ila preserves local maxima when no trimming happens") {
    Fixture fx = clustered_fixture(3000, 41);
    // n_sub chosen well above the occupied selection-cell count, so every
    // per-cell winner survives and each occupied cell attains the pool max
    const size_t n_sub = 2000;
    const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_sub))));
    GridSpec grid(g, g, fx.emb.bounds);
    std::vector<uint32_t> all(fx.pool.size());
    std::iota(all.begin(), all.end(), 0u);
    auto pool_maxima = subset_patch_depths(all, fx.emb, fx.landscape.depths().depth, grid);
    REQUIRE(pool_maxima.size() < n_sub); // clustered pool leaves most cells empty

    auto subset = ila_select(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
    auto sub_maxima = subset_patch_depths(subset, fx.emb, fx.landscape.depths().depth, grid);
    for (const auto& [flat, d] : pool_maxima) {
        auto it = sub_maxima.find(flat);
        REQUIRE(it != sub_maxima.end());
        CHECK(it->second == d);
    }
}

TEST_CASE("random_select is seeded, uniform, and exact") {
    Fixture fx = clustered_fixture(500, 3);
    auto all = random_select(fx.pool, 500, 1);
    CHECK(all.size() == 500);
    std::vector<uint32_t> expect(500);
    std::iota(expect.begin(), expect.end(), 0u);
    CHECK(all == expect);

    CHECK(random_select(fx.pool, 50, 42) == random_select(fx.pool, 50, 42));
    CHECK(random_select(fx.pool, 50, 42) != random_select(fx.pool, 50, 43));
    CHECK_THROWS_AS(random_select(fx.pool, 501, 0), std::invalid_argument);
}

TEST_CASE("10k singleton draws from a 10-record pool pass a chi-square bound") {
    Pool pool;
    for (int i = 0; i < 10; ++i) pool.records.push_back(make_record("r" + std::to_string(i), i, 0));
    std::array<size_t, 10> counts{};
    for (uint64_t seed = 0; seed < 10000; ++seed) {
        auto one = random_select(pool, 1, seed);
        ++counts[one[0]];
    }
    double chi2 = 0.0;
    for (size_t c : counts) {
        double diff = static_cast<double>(c) - 1000.0;
        chi2 += diff * diff / 1000.0;
        CHECK(std::abs(diff) <= 100.0);
    }
    // chi-square 99.9th percentile at 9 dof
    CHECK(chi2 < 27.8772);
}

TEST_CASE("regions rank patches by frequency, densest first") {
    // occupancies 5 / 3 / 1 over three separated spots
    std::vector<InstructionRecord> recs;
    for (int i = 0; i < 5; ++i) recs.push_back(make_record("a" + std::to_string(i), 0.0 + 0.001 * i, 0.0));
    for (int i = 0; i < 3; ++i) recs.push_back(make_record("b" + std::to_string(i), 5.0 + 0.001 * i, 5.0));
    recs.push_back(make_record("c0", 9.0, 9.0));
    Pool pool = make_pool(recs);
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{10, 10, 4, 4, 1});

    auto regions = build_regions(ls, std::vector<size_t>{2});
    REQUIRE(regions.size() == 1);
    REQUIRE(regions[0].area() == 2);
    CHECK(regions[0].patches[0] == ls.record_rid_cell()[0]); // the 5-cluster patch
    CHECK(regions[0].patches[1] == ls.record_rid_cell()[5]); // the 3-cluster patch

    auto nested = build_regions(ls, std::vector<size_t>{1, 2, 3});
    REQUIRE(nested.size() == 3);
    for (size_t l = 1; l < nested.size(); ++l) {
        CHECK(nested[l].area() == l + 1);
        for (size_t p = 0; p < nested[l - 1].patches.size(); ++p)
            CHECK(nested[l].patches[p] == nested[l - 1].patches[p]); // nested prefixes
    }

    CHECK_THROWS_AS(build_regions(ls, std::vector<size_t>{4}), std::invalid_argument);
    CHECK_THROWS_AS(build_regions(ls, std::vector<size_t>{2, 2}), std::invalid_argument);
}

TEST_CASE("region ranking equals a sort-based oracle on a random landscape") {
    Fixture fx = clustered_fixture(4000, 83, 20);
    auto regions = build_regions(fx.landscape, std::vector<size_t>{10, 50});

    // independent recount of patch occupancy + stable ranking
    std::map<int64_t, size_t> occ;
    for (int64_t cell : fx.landscape.record_rid_cell()) ++occ[cell];
    std::vector<std::pair<int64_t, size_t>> ranked(occ.begin(), occ.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (size_t l = 0; l < 2; ++l) {
        const Region& r = regions[l];
        for (size_t p = 0; p < r.patches.size(); ++p) CHECK(r.patches[p] == ranked[p].first);
    }
}

TEST_CASE("controlled draws honor quotas and the remainder rule") {
    // patch A: 10 members, patch B: 6 members; all RID in band for wide bands
    std::vector<InstructionRecord> recs;
    for (int i = 0; i < 10; ++i)
        recs.push_back(make_record("a" + std::to_string(i), 0.0 + 0.001 * i, 0.0, 0.1 * i));
    for (int i = 0; i < 6; ++i)
        recs.push_back(make_record("b" + std::to_string(i), 5.0 + 0.001 * i, 5.0, 0.1 * i));
    Pool pool = make_pool(recs);
    PlanarEmbedding emb = project(pool, ProjectionMode::passthrough);
    Landscape ls = Landscape::build(pool, emb, LandscapeParams{4, 4, 4, 4, 1});
    auto regions = build_regions(ls, std::vector<size_t>{2});

    SUBCASE("single patch takes everything") {
        auto one_patch = build_regions(ls, std::vector<size_t>{1});
        auto subset = draw_controlled_subset(pool, ls, one_patch[0], 10, 0.0, 1.01, 7);
        std::vector<uint32_t> expect(10);
        std::iota(expect.begin(), expect.end(), 0u);
        CHECK(subset == expect);
    }

    SUBCASE("remainder goes to the denser patch") {
        auto subset = draw_controlled_subset(pool, ls, regions[0], 5, 0.0, 1.01, 7);
        REQUIRE(subset.size() == 5);
        size_t from_a = 0, from_b = 0;
        for (uint32_t i : subset) (i < 10 ? from_a : from_b)++;
        CHECK(from_a == 3);
        CHECK(from_b == 2);
    }

    SUBCASE("infeasible bands raise and name the deficient patch") {
        CHECK_THROWS_WITH_AS(draw_controlled_subset(pool, ls, regions[0], 14, 0.0, 0.2, 7),
                             doctest::Contains("patch("), std::runtime_error);
    }

    SUBCASE("draws are deterministic per seed") {
        auto s1 = draw_controlled_subset(pool, ls, regions[0], 5, 0.0, 1.01, 99);
        auto s2 = draw_controlled_subset(pool, ls, regions[0], 5, 0.0, 1.01, 99);
        CHECK(s1 == s2);
    }
}

TEST_CASE("controlled subset mean RID is monotone in the band midpoint") {
    Fixture fx = clustered_fixture(20000, 15, 12);
    auto regions = build_regions(fx.landscape, std::vector<size_t>{8});
    const RidBand bands[] = {{0.05, 0.35}, {0.35, 0.65}, {0.65, 1.01}};
    double prev = -1.0;
    for (const RidBand& band : bands) {
        auto subset =
            draw_controlled_subset(fx.pool, fx.landscape, regions[0], 200, band.low, band.high, 5);
        SubsetSummary s = summarize_subset(subset, fx.landscape);
        CHECK(s.mean_rid > prev);
        CHECK(s.mean_rid >= band.low);
        prev = s.mean_rid;
    }
}

TEST_CASE("ila beats random on mean depth over 20 seeds") {
    Fixture fx = clustered_fixture(10000, 57);
    const size_t n_sub = 500;
    auto ila = ila_select(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
    double ila_depth = summarize_subset(ila, fx.landscape).mean_depth;

    double random_depth_sum = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto sub = random_select(fx.pool, n_sub, seed);
        random_depth_sum += summarize_subset(sub, fx.landscape).mean_depth;
    }
    CHECK(ila_depth > random_depth_sum / 20.0);
}

TEST_CASE("ila beats random on coverage for clustered pools") {
    Fixture fx = clustered_fixture(10000, 58);
    const size_t n_sub = 500;
    auto ila = ila_select(fx.pool, fx.emb, fx.landscape.depths(), n_sub);
    size_t ila_cov = summarize_subset(ila, fx.landscape).coverage;

    double random_cov_sum = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto sub = random_select(fx.pool, n_sub, seed);
        random_cov_sum += static_cast<double>(summarize_subset(sub, fx.landscape).coverage);
    }
    CHECK(static_cast<double>(ila_cov) >= random_cov_sum / 20.0);
}

TEST_CASE("subset spec validation") {
    SubsetSpec spec;
    spec.target_size = 10;
    spec.policy = SelectionPolicy::controlled;
    CHECK_THROWS_AS(spec.validate(100), std::invalid_argument); // band missing
    spec.rid_low = 0.2;
    CHECK_THROWS_AS(spec.validate(100), std::invalid_argument); // half a band
    spec.rid_high = 0.8;
    CHECK_NOTHROW(spec.validate(100));
    spec.policy = SelectionPolicy::ila;
    CHECK_THROWS_AS(spec.validate(100), std::invalid_argument); // band on non-controlled
    spec.rid_low.reset();
    spec.rid_high.reset();
    CHECK_NOTHROW(spec.validate(100));
    spec.target_size = 101;
    CHECK_THROWS_AS(spec.validate(100), std::invalid_argument);
    CHECK(parse_policy("ila") == SelectionPolicy::ila);
    CHECK(to_string(SelectionPolicy::random_uniform) == "random");
    CHECK_THROWS_AS(parse_policy("bogus"), std::invalid_argument);
}
