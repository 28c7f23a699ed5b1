// Equal-frequency partitioning and ratio reweighting for the data-side
// resampling experiments.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infoscape {

struct PartitionReport {
    std::vector<double> edges;   // k+1 boundary values; edges[0]=min, edges[k]=max
    std::vector<size_t> counts;  // per-bin member counts; max - min <= 1
    std::vector<double> means;   // per-bin mean of the partition variable

    size_t bin_count() const { return counts.size(); }
};

// Sorts the values and cuts at ranks ceil(i*n/k); bin i holds the sorted
// values with 1-based rank in (ceil(i*n/k), ceil((i+1)*n/k)]. Bins are
// half-open on the right except the last. Requires 1 <= k <= |values|.
PartitionReport partition_equal_frequency(std::span<const double> values, size_t k);

// Per-bin sampling weights proportional to 1 everywhere except the boosted
// bin, which gets `ratio`; normalized to sum 1.
std::vector<double> reweight_partitions(const PartitionReport& report, size_t boosted_bin,
                                        unsigned ratio);

}  // namespace infoscape
