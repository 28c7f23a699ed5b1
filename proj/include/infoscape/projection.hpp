// Places every record on the 2-D semantic plane. Passthrough mode ingests
// precomputed coordinates; linear2d centers the embeddings and projects onto
// the top-2 principal directions of the covariance. Nonlinear reduction is a
// pluggable external step and never computed here.
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "infoscape/grid.hpp"
#include "infoscape/record.hpp"

namespace infoscape {

enum class ProjectionMode { passthrough, linear2d };

struct PlanarEmbedding {
    std::vector<Point2> coords; // parallel to pool record order
    Bounds bounds;              // padded; strictly contains all points

    size_t size() const { return coords.size(); }
};

// passthrough requires coords on every record; linear2d requires embeddings
// of one uniform dimension D >= 2 on every record. linear2d orients each
// principal direction so its largest-magnitude component is positive.
// Throws on mixed missing fields and on zero-variance data in linear2d.
PlanarEmbedding project(const Pool& pool, ProjectionMode mode);

// Two-column table keyed by record id: header "id,x,y".
void write_coords_table(const Pool& pool, const PlanarEmbedding& emb,
                        const std::filesystem::path& path);

}  // namespace infoscape
