// Report emission: delimited tables plus a plain-text summary of whatever
// artifacts are supplied.
#pragma once

#include <filesystem>
#include <vector>

#include "infoscape/landscape.hpp"
#include "infoscape/regression.hpp"

namespace infoscape {

struct ReportInputs {
    const std::vector<Observation>* observations = nullptr;
    const RegressionResult* regression = nullptr;
    const Landscape* landscape = nullptr;
};

// Writes summary.txt plus one table per supplied artifact into dir and
// returns the written paths. Throws before creating any file when nothing
// was supplied or a supplied observation list is empty. Tables re-parse to
// the originating values exactly.
std::vector<std::filesystem::path> emit_report(const ReportInputs& inputs,
                                               const std::filesystem::path& dir);

}  // namespace infoscape
