// SimHash near-duplicate detection. 64-bit fingerprints over lowercased
// whitespace/punctuation-split tokens; similarity is 1 - hamming/64. Dedup
// is a greedy first-kept scan in ingestion order.
#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

#include "infoscape/record.hpp"

namespace infoscape {

// Deterministic 64-bit fingerprint. Tokens are maximal runs of alphanumeric
// bytes (A-Z lowercased; bytes >= 0x80 kept, so UTF-8 sequences stay intact);
// each token occurrence votes per bit position via its FNV-1a hash.
// Throws std::invalid_argument when the text contains no tokens.
uint64_t simhash64(std::string_view text);

inline int hamming_distance(uint64_t a, uint64_t b) { return std::popcount(a ^ b); }

inline double simhash_similarity(uint64_t a, uint64_t b) {
    return 1.0 - static_cast<double>(hamming_distance(a, b)) / 64.0;
}

// Fingerprint of query + response; both fields determine instruction identity.
uint64_t record_fingerprint(const InstructionRecord& rec);

struct DedupStats {
    size_t kept = 0;
    size_t dropped = 0;
};

// Keeps the first record of every near-duplicate group (ingestion order). A
// record is dropped when its similarity to any already-kept record is
// >= threshold. For thresholds that imply <= 3 differing bits (>= 0.95 with
// 64-bit fingerprints) candidates are pruned with 4 x 16-bit fingerprint
// bands; by pigeonhole the banded result equals the all-pairs scan.
// Fingerprinting is parallel over records; the keep/drop scan is sequential.
Pool deduplicate(const Pool& pool, double threshold = 0.95, DedupStats* stats = nullptr,
                 int threads = 1);

}  // namespace infoscape
