#include "infoscape/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "infoscape/format.hpp"

namespace infoscape {

std::vector<std::filesystem::path> emit_report(const ReportInputs& inputs,
                                               const std::filesystem::path& dir) {
    if (!inputs.observations && !inputs.regression && !inputs.landscape)
        throw std::invalid_argument("emit_report: nothing to report");
    if (inputs.observations && inputs.observations->empty())
        throw std::invalid_argument("emit_report: empty observation list");

    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    std::ostringstream summary;
    summary << "infoscape report\n================\n";

    if (inputs.landscape) {
        const Landscape& ls = *inputs.landscape;
        auto table = dir / "landscape.csv";
        write_landscape_table(ls, table);
        written.push_back(table);
        summary << "\nlandscape\n"
                << "  records:               " << ls.size() << '\n'
                << "  grid:                  " << ls.grid().gx << " x " << ls.grid().gy << '\n'
                << "  coverage:              " << ls.coverage() << '\n'
                << "  landscape information: " << format_double(ls.information()) << '\n'
                << "  mean depth:            " << format_double(ls.mean_depth()) << '\n'
                << "  mean rid:              " << format_double(ls.mean_rid()) << '\n';
    }

    if (inputs.observations) {
        auto table = dir / "observations.csv";
        write_observations(*inputs.observations, table);
        written.push_back(table);
        summary << "\nobservations\n  rows: " << inputs.observations->size() << '\n';
    }

    if (inputs.regression) {
        const RegressionResult& r = *inputs.regression;
        auto table = dir / "regression.csv";
        write_regression_table(r, table);
        written.push_back(table);
        static const char* kTerms[3] = {"intercept", "log_mean_rid", "log_coverage_area"};
        summary << "\nscaling regression (log dev_loss ~ 1 + log mean_rid + log coverage_area)\n";
        for (size_t k = 0; k < 3; ++k) {
            summary << "  " << std::left << std::setw(18) << kTerms[k]
                    << " estimate=" << format_double(r.beta[k])
                    << " stderr=" << format_double(r.stderrs[k]) << '\n';
        }
        summary << "  r_squared=" << format_double(r.r_squared) << " n=" << r.n_points << '\n';
    }

    auto summary_path = dir / "summary.txt";
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + summary_path.string());
    out << summary.str();
    if (!out) throw std::runtime_error("write failed: " + summary_path.string());
    written.push_back(summary_path);
    return written;
}

}  // namespace infoscape
