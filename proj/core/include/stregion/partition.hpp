#pragma once

#include "stregion/dataset.hpp"
#include "stregion/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace stregion::partition {

/// Floor applied to the edge-length spread before taking log(1/sigma).
/// Regular grids otherwise have infinite density.
inline constexpr double kSigmaFloor = 1e-12;

/// Density-peak bookkeeping shared by the location and reading clusterers.
/// All vectors are indexed by position in the input.
struct DensityPeaks {
    std::vector<std::uint32_t> rank_order;            ///< positions by descending density
    std::vector<double> delta;                        ///< distance to nearest denser point
    std::vector<std::optional<std::uint32_t>> parent; ///< that nearest denser point
};

/// Orders positions by descending density (ties: ascending id), then gives
/// each point its nearest higher-ranked neighbour under `distance`. The
/// top-ranked point has no parent and takes the largest of the other deltas;
/// a lone point gets delta 0.
template <typename Distance>
DensityPeaks compute_deltas(std::span<const double> density, std::span<const LocationIndex> ids,
                            Distance&& distance);

struct LocationClustering {
    std::vector<LocationIndex> ids; ///< vertex order of the triangulation
    std::vector<std::uint32_t> assignment;
    std::vector<LocationIndex> centers; ///< centers[k] is the center of cluster k
    std::vector<double> density;
    std::vector<double> delta;
    std::vector<double> gamma;
    std::vector<std::optional<LocationIndex>> parent;

    std::size_t cluster_count() const noexcept { return centers.size(); }
    /// Throws UnknownVertex.
    std::uint32_t cluster_of(LocationIndex id) const;
};

struct ReadingClustering {
    std::vector<LocationIndex> ids;
    std::vector<double> values;
    std::vector<std::uint32_t> assignment;
    std::vector<LocationIndex> centers;
    double d_c = 0.0; ///< cutoff distance actually used

    std::size_t cluster_count() const noexcept { return centers.size(); }
};

struct Region {
    std::uint32_t id = 0;
    std::vector<LocationIndex> members; ///< ascending
    std::vector<double> readings;       ///< aligned with members
    std::uint32_t loc_cluster = 0;
    std::uint32_t read_cluster = 0;
};

struct RegionSet {
    SlotIndex t = 0;
    std::vector<Region> regions;

    std::size_t member_count() const noexcept;
};

/// log(1/sigma) of the lengths of the Delaunay edges around `id`, where sigma
/// is their population standard deviation floored at kSigmaFloor.
/// Throws IsolatedVertex when the vertex has no neighbours.
double location_density(const geometry::TriangulationGraph& graph, LocationIndex id);

/// Density-peak clustering of the triangulation's vertices into `c` clusters.
/// Centers are the c largest density*delta values; the globally densest
/// vertex is always kept as a center because it has no parent to follow.
/// Throws TooManyClusters and ConfigInvalid (c == 0).
LocationClustering cluster_locations(const geometry::TriangulationGraph& graph, std::size_t c);

/// The 2% quantile of pairwise |v_i - v_j|, falling back to the smallest
/// non-zero distance (or 1) when that quantile is zero.
double auto_cutoff(std::span<const double> values);

/// CFDP on scalar readings with a Gaussian density kernel. `d_c` unset means
/// auto_cutoff(). Throws DegenerateValues when fewer than n_v distinct values.
ReadingClustering cluster_readings_cfdp(std::span<const LocationIndex> ids, std::span<const double> values,
                                        std::size_t n_v, std::optional<double> d_c = std::nullopt);

/// Non-empty intersections of the two clusterings, ordered by
/// (location cluster, reading cluster). Throws CoverageMismatch.
RegionSet intersect(const LocationClustering& loc, const ReadingClustering& read, SlotIndex t);

/// Splits every region into its connected pieces in `graph`. Off by default
/// in the pipeline.
RegionSet split_disconnected(const RegionSet& regions, const geometry::TriangulationGraph& graph);

// -- implementation ---------------------------------------------------------

template <typename Distance>
DensityPeaks compute_deltas(std::span<const double> density, std::span<const LocationIndex> ids,
                            Distance&& distance) {
    const std::size_t n = density.size();
    DensityPeaks out;
    out.rank_order.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) out.rank_order[i] = i;
    std::sort(out.rank_order.begin(), out.rank_order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (density[a] != density[b]) return density[a] > density[b];
        return ids[a] < ids[b];
    });
    out.delta.assign(n, 0.0);
    out.parent.assign(n, std::nullopt);
    if (n <= 1) return out;

    double max_delta = 0.0;
    for (std::size_t r = 1; r < n; ++r) {
        const auto i = out.rank_order[r];
        double best = distance(i, out.rank_order[0]);
        std::uint32_t best_j = out.rank_order[0];
        for (std::size_t q = 1; q < r; ++q) {
            const auto j = out.rank_order[q];
            const double d = distance(i, j);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        out.delta[i] = best;
        out.parent[i] = best_j;
        max_delta = std::max(max_delta, best);
    }
    out.delta[out.rank_order[0]] = max_delta;
    return out;
}

} // namespace stregion::partition
