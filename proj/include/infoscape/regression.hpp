// Log-log scaling regression: ordinary least squares of
// log(dev_loss) on 1, log(mean_rid), log(coverage_area).
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace infoscape {

struct Observation {
    double dev_loss = 0.0;
    double mean_rid = 0.0;
    double coverage_area = 0.0;
};

struct RegressionResult {
    std::array<double, 3> beta{};    // intercept, log mean_rid, log coverage_area
    std::array<double, 3> stderrs{}; // NaN when n_points == 3 (no residual dof)
    double r_squared = 0.0;
    size_t n_points = 0;
    std::vector<double> residuals;
};

// Natural logs throughout. Requires >= 3 observations, strictly positive
// fields (named by index on violation), and a non-singular design.
RegressionResult fit_scaling_regression(std::span<const Observation> observations);

// Observation tables are CSV; columns are located by header name, so tables
// with extra columns (policy, size, seed, ...) load fine.
void write_observations(std::span<const Observation> observations,
                        const std::filesystem::path& path);
std::vector<Observation> read_observations(const std::filesystem::path& path);

// 3 coefficient rows: term,estimate,stderr + trailing r_squared/n_points rows
void write_regression_table(const RegressionResult& result, const std::filesystem::path& path);
RegressionResult read_regression_table(const std::filesystem::path& path); // residuals not stored

}  // namespace infoscape
