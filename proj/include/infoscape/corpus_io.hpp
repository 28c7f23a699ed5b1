// Line-delimited record ingestion and serialization. One JSON object per
// line with fields: id, query, response, token_count, labels, base_loss,
// sft_loss, and optionally embedding and/or coords.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "infoscape/record.hpp"

namespace infoscape {

enum class SchemaMode { strict, lenient };

struct IngestStats {
    size_t lines_read = 0;
    size_t records_kept = 0;
    size_t lines_skipped = 0; // lenient mode only; strict aborts on the first bad line
};

// Parses and validates every line. In strict mode the first malformed line
// raises with its line number and offending field; in lenient mode bad lines
// are counted and skipped. Duplicate ids count as malformed.
Pool ingest(const std::filesystem::path& path, SchemaMode mode = SchemaMode::strict,
            IngestStats* stats = nullptr);

// Serializes back to the ingestion format, one record per line, fields in
// schema order. Floats are emitted in shortest round-trip form.
void save_pool(const Pool& pool, const std::filesystem::path& path);

// One record as a single JSON line (no trailing newline).
std::string record_to_json_line(const InstructionRecord& rec);

// "fnv1a:" + 16 hex digits over the raw file bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace infoscape
