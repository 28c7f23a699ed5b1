#include "infoscape/regression.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "infoscape/format.hpp"

namespace infoscape {

namespace {

// Gaussian elimination with partial pivoting on [A | B], A 3x3. Solves for
// all columns of B in place. Throws on a singular pivot.
void solve3(std::array<std::array<double, 3>, 3> a, std::vector<std::array<double, 3>>& b) {
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::abs(x));
    const double tol = scale * 1e-12;

    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col])) pivot = r;
        }
        std::swap(perm[col], perm[pivot]);
        double p = a[perm[col]][col];
        if (std::abs(p) <= tol)
            throw std::runtime_error("fit_scaling_regression: singular design matrix");
        for (int r = col + 1; r < 3; ++r) {
            double f = a[perm[r]][col] / p;
            if (f == 0.0) continue;
            for (int c = col; c < 3; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
            for (auto& rhs : b) rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    for (auto& rhs : b) {
        std::array<double, 3> x{};
        for (int row = 2; row >= 0; --row) {
            double s = rhs[perm[row]];
            for (int c = row + 1; c < 3; ++c) s -= a[perm[row]][c] * x[c];
            x[row] = s / a[perm[row]][row];
        }
        rhs = x;
    }
}

}  // namespace

RegressionResult fit_scaling_regression(std::span<const Observation> observations) {
    const size_t n = observations.size();
    if (n < 3)
        throw std::invalid_argument("fit_scaling_regression: need >= 3 observations, have " +
                                    std::to_string(n));

    std::vector<std::array<double, 3>> x(n);
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        const Observation& o = observations[i];
        if (!(o.dev_loss > 0.0))
            throw std::invalid_argument("fit_scaling_regression: observation " + std::to_string(i) +
                                        " has nonpositive dev_loss");
        if (!(o.mean_rid > 0.0))
            throw std::invalid_argument("fit_scaling_regression: observation " + std::to_string(i) +
                                        " has nonpositive mean_rid");
        if (!(o.coverage_area > 0.0))
            throw std::invalid_argument("fit_scaling_regression: observation " + std::to_string(i) +
                                        " has nonpositive coverage_area");
        x[i] = {1.0, std::log(o.mean_rid), std::log(o.coverage_area)};
        y[i] = std::log(o.dev_loss);
    }

    // normal equations
    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    for (size_t i = 0; i < n; ++i) {
        for (int r = 0; r < 3; ++r) {
            xty[r] += x[i][r] * y[i];
            for (int c = 0; c < 3; ++c) xtx[r][c] += x[i][r] * x[i][c];
        }
    }

    // one solve for beta, three for (X'X)^-1 columns
    std::vector<std::array<double, 3>> rhs(4);
    rhs[0] = xty;
    for (int c = 0; c < 3; ++c) rhs[1 + c] = {c == 0 ? 1.0 : 0.0, c == 1 ? 1.0 : 0.0,
                                              c == 2 ? 1.0 : 0.0};
    solve3(xtx, rhs);

    RegressionResult res;
    res.beta = rhs[0];
    res.n_points = n;
    res.residuals.resize(n);

    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);

    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double fitted = res.beta[0] * x[i][0] + res.beta[1] * x[i][1] + res.beta[2] * x[i][2];
        res.residuals[i] = y[i] - fitted;
        ss_res += res.residuals[i] * res.residuals[i];
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    if (ss_tot <= 0.0)
        throw std::runtime_error("fit_scaling_regression: zero total variance in dev_loss");
    res.r_squared = 1.0 - ss_res / ss_tot;

    if (n > 3) {
        double s2 = ss_res / static_cast<double>(n - 3);
        for (int k = 0; k < 3; ++k) res.stderrs[k] = std::sqrt(s2 * rhs[1 + k][k]);
    } else {
        res.stderrs.fill(std::numeric_limits<double>::quiet_NaN());
    }
    return res;
}

void write_observations(std::span<const Observation> observations,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << "dev_loss,mean_rid,coverage_area\n";
    for (const Observation& o : observations) {
        out << format_double(o.dev_loss) << ',' << format_double(o.mean_rid) << ','
            << format_double(o.coverage_area) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty observation table: " + path.string());
    auto header = csv_split(line);
    int col_loss = -1, col_rid = -1, col_cov = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "dev_loss") col_loss = static_cast<int>(i);
        if (header[i] == "mean_rid") col_rid = static_cast<int>(i);
        if (header[i] == "coverage_area") col_cov = static_cast<int>(i);
    }
    if (col_loss < 0 || col_rid < 0 || col_cov < 0)
        throw std::runtime_error("observation table " + path.string() +
                                 " must have dev_loss, mean_rid, coverage_area columns");
    std::vector<Observation> obs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != header.size()) throw std::runtime_error("bad observation row: " + line);
        obs.push_back(Observation{parse_double(f[static_cast<size_t>(col_loss)]),
                                  parse_double(f[static_cast<size_t>(col_rid)]),
                                  parse_double(f[static_cast<size_t>(col_cov)])});
    }
    return obs;
}

void write_regression_table(const RegressionResult& result, const std::filesystem::path& path) {
    static const char* kTerms[3] = {"intercept", "log_mean_rid", "log_coverage_area"};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << "term,estimate,stderr\n";
    for (int k = 0; k < 3; ++k) {
        out << kTerms[k] << ',' << format_double(result.beta[static_cast<size_t>(k)]) << ','
            << format_double(result.stderrs[static_cast<size_t>(k)]) << '\n';
    }
    out << "r_squared," << format_double(result.r_squared) << ",\n";
    out << "n_points," << result.n_points << ",\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

RegressionResult read_regression_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || csv_split(line) != std::vector<std::string>{"term", "estimate", "stderr"})
        throw std::runtime_error("bad regression table header in " + path.string());

    RegressionResult res;
    static const char* kTerms[3] = {"intercept", "log_mean_rid", "log_coverage_area"};
    for (int k = 0; k < 3; ++k) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated regression table");
        auto f = csv_split(line);
        if (f.size() != 3 || f[0] != kTerms[k])
            throw std::runtime_error("bad regression table row: " + line);
        res.beta[static_cast<size_t>(k)] = parse_double(f[1]);
        res.stderrs[static_cast<size_t>(k)] = parse_double(f[2]);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f[0] == "r_squared") res.r_squared = parse_double(f[1]);
        if (f[0] == "n_points") res.n_points = static_cast<size_t>(parse_int(f[1]));
    }
    return res;
}

}  // namespace infoscape
