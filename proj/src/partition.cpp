#include "infoscape/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace infoscape {

PartitionReport partition_equal_frequency(std::span<const double> values, size_t k) {
    const size_t n = values.size();
    if (k < 1) throw std::invalid_argument("partition_equal_frequency: k must be >= 1");
    if (k > n)
        throw std::invalid_argument("partition_equal_frequency: k=" + std::to_string(k) +
                                    " exceeds value count " + std::to_string(n));

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    PartitionReport report;
    report.edges.resize(k + 1);
    report.counts.resize(k);
    report.means.resize(k);
    report.edges[0] = sorted.front();
    report.edges[k] = sorted.back();

    size_t prev_cut = 0;
    for (size_t i = 0; i < k; ++i) {
        // rank ceil((i+1)*n/k), computed in integers
        size_t cut = ((i + 1) * n + k - 1) / k;
        if (i + 1 < k) report.edges[i + 1] = sorted[cut - 1];
        size_t count = cut - prev_cut;
        double sum = 0.0;
        for (size_t j = prev_cut; j < cut; ++j) sum += sorted[j];
        report.counts[i] = count;
        report.means[i] = sum / static_cast<double>(count);
        prev_cut = cut;
    }
    return report;
}

std::vector<double> reweight_partitions(const PartitionReport& report, size_t boosted_bin,
                                        unsigned ratio) {
    const size_t k = report.bin_count();
    if (boosted_bin >= k)
        throw std::invalid_argument("reweight_partitions: bin " + std::to_string(boosted_bin) +
                                    " out of range (k=" + std::to_string(k) + ")");
    if (ratio < 1) throw std::invalid_argument("reweight_partitions: ratio must be >= 1");

    std::vector<double> weights(k, 1.0);
    weights[boosted_bin] = static_cast<double>(ratio);
    double total = static_cast<double>(k - 1) + static_cast<double>(ratio);
    for (double& w : weights) w /= total;
    return weights;
}

}  // namespace infoscape
