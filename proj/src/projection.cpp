#include "infoscape/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "infoscape/format.hpp"

namespace infoscape {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major d x d).
// Returns eigenvalues descending with matching unit eigenvectors as rows.
// Sweep count is generous; d stays small (embedding dimension).
struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

EigenResult jacobi_eigen(std::vector<double> a, size_t d) {
    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (size_t i = 0; i < d; ++i) v[i][i] = 1.0;

    auto at = [&](size_t r, size_t c) -> double& { return a[r * d + c]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < d; ++p)
            for (size_t q = p + 1; q < d; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-300) break;

        for (size_t p = 0; p < d; ++p) {
            for (size_t q = p + 1; q < d; ++q) {
                double apq = at(p, q);
                if (apq == 0.0) continue;
                double app = at(p, p), aqq = at(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (size_t k = 0; k < d; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (size_t k = 0; k < d; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (size_t k = 0; k < d; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<size_t> order(d);
    for (size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return at(i, i) > at(j, j); });

    EigenResult res;
    res.values.resize(d);
    res.vectors.assign(d, std::vector<double>(d));
    for (size_t r = 0; r < d; ++r) {
        res.values[r] = at(order[r], order[r]);
        for (size_t k = 0; k < d; ++k) res.vectors[r][k] = v[k][order[r]];
    }
    return res;
}

// Sign convention: the largest-magnitude component of each direction is made
// positive (first such index on ties).
void orient(std::vector<double>& dir) {
    size_t arg = 0;
    for (size_t i = 1; i < dir.size(); ++i) {
        if (std::abs(dir[i]) > std::abs(dir[arg])) arg = i;
    }
    if (dir[arg] < 0.0) {
        for (double& x : dir) x = -x;
    }
}

PlanarEmbedding project_linear2d(const Pool& pool) {
    const size_t n = pool.size();
    size_t d = pool.records[0].embedding.size();
    if (d < 2) throw std::invalid_argument("project: embedding dimension must be >= 2");
    for (size_t i = 0; i < n; ++i) {
        if (pool.records[i].embedding.empty())
            throw std::invalid_argument("project: record '" + pool.records[i].id +
                                        "' has no embedding (mixed missing fields)");
        if (pool.records[i].embedding.size() != d)
            throw std::invalid_argument("project: record '" + pool.records[i].id +
                                        "' has embedding dimension " +
                                        std::to_string(pool.records[i].embedding.size()) +
                                        ", expected " + std::to_string(d));
    }

    // Fixed sequential accumulation order keeps the result bit-stable.
    std::vector<double> mean(d, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < d; ++k) mean[k] += pool.records[i].embedding[k];
    for (size_t k = 0; k < d; ++k) mean[k] /= static_cast<double>(n);

    std::vector<double> cov(d * d, 0.0);
    std::vector<double> centered(d);
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < d; ++k) centered[k] = pool.records[i].embedding[k] - mean[k];
        for (size_t r = 0; r < d; ++r)
            for (size_t c = r; c < d; ++c) cov[r * d + c] += centered[r] * centered[c];
    }
    double total_var = 0.0;
    for (size_t r = 0; r < d; ++r) {
        for (size_t c = r; c < d; ++c) {
            cov[r * d + c] /= static_cast<double>(n);
            cov[c * d + r] = cov[r * d + c];
        }
        total_var += cov[r * d + r];
    }
    if (total_var <= 0.0)
        throw std::invalid_argument("project: zero-variance data (all points identical)");

    EigenResult eig = jacobi_eigen(cov, d);
    std::vector<double> dir1 = eig.vectors[0];
    std::vector<double> dir2 = eig.vectors[1];
    orient(dir1);
    orient(dir2);

    PlanarEmbedding emb;
    emb.coords.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double px = 0.0, py = 0.0;
        for (size_t k = 0; k < d; ++k) {
            double x = pool.records[i].embedding[k] - mean[k];
            px += x * dir1[k];
            py += x * dir2[k];
        }
        emb.coords[i] = Point2{px, py};
    }
    emb.bounds = padded_bounds(emb.coords);
    return emb;
}

}  // namespace

PlanarEmbedding project(const Pool& pool, ProjectionMode mode) {
    if (pool.empty()) {
        // empty pools still need usable bounds so a grid can be constructed
        PlanarEmbedding emb;
        emb.bounds = Bounds{0.0, 0.0, 1.0, 1.0};
        return emb;
    }

    if (mode == ProjectionMode::passthrough) {
        PlanarEmbedding emb;
        emb.coords.resize(pool.size());
        for (size_t i = 0; i < pool.size(); ++i) {
            const auto& rec = pool.records[i];
            if (!rec.coords)
                throw std::invalid_argument("project: record '" + rec.id +
                                            "' has no coords (mixed missing fields)");
            emb.coords[i] = Point2{(*rec.coords)[0], (*rec.coords)[1]};
        }
        emb.bounds = padded_bounds(emb.coords);
        return emb;
    }
    return project_linear2d(pool);
}

void write_coords_table(const Pool& pool, const PlanarEmbedding& emb,
                        const std::filesystem::path& path) {
    if (pool.size() != emb.size())
        throw std::invalid_argument("write_coords_table: pool/embedding size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << "id,x,y\n";
    for (size_t i = 0; i < pool.size(); ++i) {
        out << csv_escape(pool.records[i].id) << ',' << format_double(emb.coords[i].x) << ','
            << format_double(emb.coords[i].y) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace infoscape
