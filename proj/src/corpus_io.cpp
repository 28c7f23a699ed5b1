#include "infoscape/corpus_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "infoscape/format.hpp"

namespace infoscape {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string line_error(size_t line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

// Throws std::runtime_error naming the offending field.
InstructionRecord parse_record(const nlohmann::json& j) {
    InstructionRecord rec;

    auto require = [&](const char* field) -> const nlohmann::json& {
        auto it = j.find(field);
        if (it == j.end()) throw std::runtime_error(std::string("missing required field '") + field + "'");
        return *it;
    };

    const auto& jid = require("id");
    if (!jid.is_string()) throw std::runtime_error("field 'id' must be a string");
    rec.id = jid.get<std::string>();
    if (rec.id.empty()) throw std::runtime_error("field 'id' must be non-empty");

    const auto& jquery = require("query");
    if (!jquery.is_string()) throw std::runtime_error("field 'query' must be a string");
    rec.query = jquery.get<std::string>();

    const auto& jresponse = require("response");
    if (!jresponse.is_string()) throw std::runtime_error("field 'response' must be a string");
    rec.response = jresponse.get<std::string>();

    const auto& jtok = require("token_count");
    if (!jtok.is_number_integer()) throw std::runtime_error("field 'token_count' must be an integer");
    rec.token_count = jtok.get<int64_t>();
    if (rec.token_count < 1) throw std::runtime_error("field 'token_count' must be >= 1");

    const auto& jlabels = require("labels");
    if (!jlabels.is_array()) throw std::runtime_error("field 'labels' must be an array");
    for (const auto& l : jlabels) {
        if (!l.is_string()) throw std::runtime_error("field 'labels' must contain only strings");
        rec.labels.push_back(l.get<std::string>());
    }

    const auto& jbase = require("base_loss");
    if (!jbase.is_number()) throw std::runtime_error("field 'base_loss' must be a number");
    rec.base_loss = jbase.get<double>();
    if (rec.base_loss < 0.0) throw std::runtime_error("field 'base_loss' must be >= 0");

    const auto& jsft = require("sft_loss");
    if (!jsft.is_number()) throw std::runtime_error("field 'sft_loss' must be a number");
    rec.sft_loss = jsft.get<double>();
    if (rec.sft_loss < 0.0) throw std::runtime_error("field 'sft_loss' must be >= 0");

    if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || it->size() < 2)
            throw std::runtime_error("field 'embedding' must be an array of >= 2 numbers");
        for (const auto& v : *it) {
            if (!v.is_number()) throw std::runtime_error("field 'embedding' must contain only numbers");
            rec.embedding.push_back(v.get<double>());
        }
    }

    if (auto it = j.find("coords"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2)
            throw std::runtime_error("field 'coords' must be an array of exactly 2 numbers");
        if (!(*it)[0].is_number() || !(*it)[1].is_number())
            throw std::runtime_error("field 'coords' must contain only numbers");
        rec.coords = std::array<double, 2>{(*it)[0].get<double>(), (*it)[1].get<double>()};
    }

    if (rec.embedding.empty() && !rec.coords.has_value())
        throw std::runtime_error("record must carry 'embedding' or 'coords'");

    return rec;
}

}  // namespace

Pool ingest(const std::filesystem::path& path, SchemaMode mode, IngestStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());

    Pool pool;
    pool.provenance = file_digest(path);
    std::unordered_set<std::string> seen_ids;
    IngestStats local;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue; // blank line
        ++local.lines_read;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            if (!j.is_object()) throw std::runtime_error("line is not a JSON object");
            InstructionRecord rec = parse_record(j);
            if (!seen_ids.insert(rec.id).second)
                throw std::runtime_error("duplicate id '" + rec.id + "'");
            pool.records.push_back(std::move(rec));
            ++local.records_kept;
        } catch (const std::exception& e) {
            if (mode == SchemaMode::strict)
                throw std::runtime_error(path.string() + ": " + line_error(line_no, e.what()));
            ++local.lines_skipped;
        }
    }

    if (stats) *stats = local;
    return pool;
}

std::string record_to_json_line(const InstructionRecord& rec) {
    ordered_json j;
    j["id"] = rec.id;
    j["query"] = rec.query;
    j["response"] = rec.response;
    j["token_count"] = rec.token_count;
    j["labels"] = rec.labels;
    j["base_loss"] = rec.base_loss;
    j["sft_loss"] = rec.sft_loss;
    if (!rec.embedding.empty()) j["embedding"] = rec.embedding;
    if (rec.coords) j["coords"] = *rec.coords;
    return j.dump();
}

void save_pool(const Pool& pool, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    for (const InstructionRecord& rec : pool.records) {
        out << record_to_json_line(rec) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path.string());
    uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
        if (in.eof()) break;
    }
    char hex[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) hex[i] = digits[(h >> (60 - 4 * i)) & 0xF];
    hex[16] = '\0';
    return std::string("fnv1a:") + hex;
}

}  // namespace infoscape
