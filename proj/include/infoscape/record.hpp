// Core domain types: a single instruction record and an ordered pool of them.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace infoscape {

struct InstructionRecord {
    std::string id;
    std::string query;       // the instruction prompt
    std::string response;    // the reference answer
    int64_t token_count = 0; // response length in tokens, >= 1
    std::vector<std::string> labels;
    double base_loss = 0.0;  // mean cross-entropy of the base model
    double sft_loss = 0.0;   // mean cross-entropy of the reference SFT model
    std::vector<double> embedding;               // empty when absent
    std::optional<std::array<double, 2>> coords; // precomputed planar coordinates

    // base-model loss minus SFT-model loss; negative means the reference
    // model got worse on this response
    double loss_delta() const { return base_loss - sft_loss; }

    // Records with no labels count as one skill so the depth signal is not
    // erased for unlabeled data.
    int64_t effective_label_count() const {
        return labels.empty() ? 1 : static_cast<int64_t>(labels.size());
    }
};

struct Pool {
    std::vector<InstructionRecord> records; // stable, equal to ingestion order
    std::string provenance;                 // digest of the source file

    size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    const InstructionRecord& operator[](size_t i) const { return records[i]; }
};

}  // namespace infoscape
