#pragma once

#include "stregion/dataset.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace stregion::geometry {

struct PlanarPoint {
    LocationIndex id = 0;
    double x = 0.0;
    double y = 0.0;
};

struct Edge {
    std::uint32_t u = 0; ///< vertex position, u < v
    std::uint32_t v = 0;
    double length = 0.0;
};

struct DelaunayOptions {
    /// Perturb exactly coincident points instead of throwing DuplicatePoints.
    /// Every point moves by at most 1e-9 of the bounding-box diagonal.
    bool jitter_duplicates = false;
    std::uint64_t jitter_seed = 0;
};

/// Delaunay adjacency over one slot's locations.
///
/// Vertices keep the order they were given in; "position" below means the
/// index into vertices(). Degenerate inputs still yield a neighbour graph:
/// one point has no edges, two points share one edge and collinear points
/// form a path in coordinate order.
class TriangulationGraph {
public:
    TriangulationGraph() = default;

    const std::vector<PlanarPoint>& vertices() const noexcept { return vertices_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    /// Counter-clockwise triangles (vertex positions). Empty for degenerate input.
    const std::vector<std::array<std::uint32_t, 3>>& triangles() const noexcept { return triangles_; }

    std::size_t size() const noexcept { return vertices_.size(); }

    /// Throws UnknownVertex.
    std::uint32_t position_of(LocationIndex id) const;
    bool contains(LocationIndex id) const noexcept;

    std::span<const std::uint32_t> neighbor_positions(std::uint32_t position) const {
        return adjacency_.at(position);
    }
    /// Lengths aligned with neighbor_positions().
    std::span<const double> neighbor_lengths(std::uint32_t position) const {
        return adjacency_lengths_.at(position);
    }

    /// Delaunay-adjacent location ids, ascending. Throws UnknownVertex.
    std::vector<LocationIndex> neighbors(LocationIndex id) const;

    /// Throws std::out_of_range if (a, b) is not an edge.
    double edge_length(LocationIndex a, LocationIndex b) const;

    /// Connected components of the subgraph induced by `subset`; each
    /// component is sorted, components are ordered by their smallest id.
    /// Throws UnknownVertex.
    std::vector<std::vector<LocationIndex>> components(std::span<const LocationIndex> subset) const;

    friend TriangulationGraph build_delaunay(std::span<const PlanarPoint> points,
                                             const DelaunayOptions& options);

private:
    std::vector<PlanarPoint> vertices_;
    std::vector<std::pair<LocationIndex, std::uint32_t>> by_id_;
    std::vector<Edge> edges_;
    std::vector<std::array<std::uint32_t, 3>> triangles_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
    std::vector<std::vector<double>> adjacency_lengths_;
};

/// Builds the Delaunay triangulation with exact predicates. Co-circular ties
/// are resolved by the lexicographic (x, y, id) insertion order, so the
/// result is reproducible. Throws DuplicatePoints (unless jittering) and
/// std::invalid_argument for non-finite coordinates or repeated ids.
TriangulationGraph build_delaunay(std::span<const PlanarPoint> points,
                                  const DelaunayOptions& options = {});

} // namespace stregion::geometry
