#include "infoscape/simhash.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "infoscape/format.hpp"
#include "infoscape/parallel.hpp"

namespace infoscape {

namespace {

inline bool token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline unsigned char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c + 32) : c;
}

// Finalizer over the raw FNV accumulator. FNV alone leaves near-identical
// short tokens ("1" vs "2") with correlated bits, which would merge texts
// that merely share a numeric suffix; the avalanche step decorrelates them.
inline uint64_t mix64(uint64_t h) {
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

}  // namespace

uint64_t simhash64(std::string_view text) {
    std::array<int32_t, 64> votes{};
    bool any_token = false;

    uint64_t h = kFnvOffset;
    bool in_token = false;
    auto close_token = [&] {
        any_token = true;
        uint64_t token_hash = mix64(h);
        for (int b = 0; b < 64; ++b) votes[b] += ((token_hash >> b) & 1) ? 1 : -1;
        h = kFnvOffset;
    };

    for (unsigned char c : text) {
        if (token_byte(c)) {
            in_token = true;
            h ^= lower(c);
            h *= kFnvPrime;
        } else if (in_token) {
            in_token = false;
            close_token();
        }
    }
    if (in_token) close_token();

    if (!any_token) throw std::invalid_argument("simhash64: text is empty after normalization");

    uint64_t fp = 0;
    for (int b = 0; b < 64; ++b) {
        if (votes[b] > 0) fp |= uint64_t{1} << b;
    }
    return fp;
}

uint64_t record_fingerprint(const InstructionRecord& rec) {
    std::string text;
    text.reserve(rec.query.size() + rec.response.size() + 1);
    text += rec.query;
    text += '\n';
    text += rec.response;
    return simhash64(text);
}

Pool deduplicate(const Pool& pool, double threshold, DedupStats* stats, int threads) {
    if (threshold < 0.0 || threshold > 1.0)
        throw std::invalid_argument("deduplicate: threshold must lie in [0, 1]");

    const size_t n = pool.size();
    std::vector<uint64_t> fps(n);
    std::vector<std::string> errors(threads < 1 ? 1 : static_cast<size_t>(threads));
    parallel_chunks(n, threads, [&](size_t chunk, size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            try {
                fps[i] = record_fingerprint(pool.records[i]);
            } catch (const std::exception& e) {
                if (errors[chunk].empty())
                    errors[chunk] = "record '" + pool.records[i].id + "': " + e.what();
            }
        }
    });
    for (const std::string& err : errors) {
        if (!err.empty()) throw std::invalid_argument("deduplicate: " + err);
    }

    // Max hamming distance a matching pair can have. Banding is exact only
    // when this is <= 3 (4 disjoint 16-bit bands); otherwise fall back to the
    // all-pairs scan against kept records.
    int max_hamming = static_cast<int>(std::floor(64.0 * (1.0 - threshold) + 1e-9));
    bool banded = max_hamming <= 3;

    auto is_duplicate_of = [&](uint64_t a, uint64_t b) {
        return simhash_similarity(a, b) >= threshold;
    };

    std::vector<uint32_t> kept;
    kept.reserve(n);

    if (banded) {
        // band value -> indices into `kept`
        std::array<std::unordered_map<uint16_t, std::vector<uint32_t>>, 4> buckets;
        for (size_t i = 0; i < n; ++i) {
            uint64_t fp = fps[i];
            bool dup = false;
            for (int b = 0; b < 4 && !dup; ++b) {
                auto it = buckets[b].find(static_cast<uint16_t>(fp >> (16 * b)));
                if (it == buckets[b].end()) continue;
                for (uint32_t k : it->second) {
                    if (is_duplicate_of(fp, fps[kept[k]])) {
                        dup = true;
                        break;
                    }
                }
            }
            if (dup) continue;
            uint32_t slot = static_cast<uint32_t>(kept.size());
            kept.push_back(static_cast<uint32_t>(i));
            for (int b = 0; b < 4; ++b)
                buckets[b][static_cast<uint16_t>(fp >> (16 * b))].push_back(slot);
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            bool dup = false;
            for (uint32_t k : kept) {
                if (is_duplicate_of(fps[i], fps[k])) {
                    dup = true;
                    break;
                }
            }
            if (!dup) kept.push_back(static_cast<uint32_t>(i));
        }
    }

    Pool out;
    out.provenance = pool.provenance;
    out.records.reserve(kept.size());
    for (uint32_t i : kept) out.records.push_back(pool.records[i]);
    if (stats) *stats = DedupStats{kept.size(), n - kept.size()};
    return out;
}

}  // namespace infoscape
