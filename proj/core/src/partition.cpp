#include "stregion/partition.hpp"

#include "stregion/errors.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace stregion::partition {

namespace {

/// Top-`count` positions by gamma (ties: ascending id). The rank-1 point
/// must be a center; if it did not make the cut it replaces the last pick.
std::vector<std::uint32_t> select_centers(std::span<const double> gamma, std::span<const LocationIndex> ids,
                                          std::uint32_t densest, std::size_t count) {
    std::vector<std::uint32_t> order(gamma.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (gamma[a] != gamma[b]) return gamma[a] > gamma[b];
        return ids[a] < ids[b];
    });
    order.resize(count);
    if (std::find(order.begin(), order.end(), densest) == order.end()) {
        order.back() = densest;
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (gamma[a] != gamma[b]) return gamma[a] > gamma[b];
            return ids[a] < ids[b];
        });
    }
    return order;
}

/// Follows parent pointers in rank order; parents always rank higher, so one
/// pass suffices.
std::vector<std::uint32_t> assign_by_parents(const DensityPeaks& peaks, std::span<const std::uint32_t> centers) {
    constexpr auto kUnset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> assignment(peaks.delta.size(), kUnset);
    for (std::uint32_t k = 0; k < centers.size(); ++k) assignment[centers[k]] = k;
    for (auto pos : peaks.rank_order) {
        if (assignment[pos] != kUnset) continue;
        assignment[pos] = assignment[*peaks.parent[pos]];
    }
    return assignment;
}

} // namespace

std::size_t RegionSet::member_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : regions) n += r.members.size();
    return n;
}

std::uint32_t LocationClustering::cluster_of(LocationIndex id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw UnknownVertex(std::to_string(id));
    return assignment[static_cast<std::size_t>(it - ids.begin())];
}

double location_density(const geometry::TriangulationGraph& graph, LocationIndex id) {
    const auto pos = graph.position_of(id);
    const auto lengths = graph.neighbor_lengths(pos);
    if (lengths.empty()) throw IsolatedVertex(std::to_string(id));

    const double k = static_cast<double>(lengths.size());
    double mean = 0.0;
    for (double e : lengths) mean += e;
    mean /= k;
    double var = 0.0;
    for (double e : lengths) var += (e - mean) * (e - mean);
    const double sigma = std::max(std::sqrt(var / k), kSigmaFloor);
    return std::log(1.0 / sigma);
}

LocationClustering cluster_locations(const geometry::TriangulationGraph& graph, std::size_t c) {
    const std::size_t n = graph.size();
    if (c == 0) throw ConfigInvalid("number of location clusters must be >= 1");
    if (c > n) throw TooManyClusters(c, n);

    LocationClustering out;
    const auto& vertices = graph.vertices();
    out.ids.reserve(n);
    for (const auto& v : vertices) out.ids.push_back(v.id);

    if (n == 1) {
        out.assignment = {0};
        out.centers = {out.ids[0]};
        out.density = {0.0};
        out.delta = {0.0};
        out.gamma = {0.0};
        out.parent = {std::nullopt};
        return out;
    }

    out.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.density[i] = location_density(graph, out.ids[i]);

    auto peaks = compute_deltas(std::span<const double>(out.density), std::span<const LocationIndex>(out.ids),
                                [&](std::uint32_t a, std::uint32_t b) {
                                    return std::hypot(vertices[a].x - vertices[b].x, vertices[a].y - vertices[b].y);
                                });

    out.delta = peaks.delta;
    out.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.gamma[i] = out.density[i] * out.delta[i];

    const auto centers = select_centers(out.gamma, out.ids, peaks.rank_order[0], c);
    out.assignment = assign_by_parents(peaks, centers);
    for (auto pos : centers) out.centers.push_back(out.ids[pos]);
    out.parent.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (peaks.parent[i]) out.parent[i] = out.ids[*peaks.parent[i]];
    return out;
}

double auto_cutoff(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 1.0;
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    double min_positive = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::fabs(values[i] - values[j]);
            dist.push_back(d);
            if (d > 0.0 && (min_positive == 0.0 || d < min_positive)) min_positive = d;
        }
    }
    // 1-based position round(2% of the pair count), as in the reference CFDP code.
    const auto m = static_cast<double>(dist.size());
    auto position = static_cast<std::ptrdiff_t>(std::llround(0.02 * m)) - 1;
    position = std::clamp<std::ptrdiff_t>(position, 0, static_cast<std::ptrdiff_t>(dist.size()) - 1);
    std::nth_element(dist.begin(), dist.begin() + position, dist.end());
    const double cutoff = dist[static_cast<std::size_t>(position)];
    if (cutoff > 0.0) return cutoff;
    return min_positive > 0.0 ? min_positive : 1.0;
}

ReadingClustering cluster_readings_cfdp(std::span<const LocationIndex> ids, std::span<const double> values,
                                        std::size_t n_v, std::optional<double> d_c) {
    if (ids.size() != values.size()) throw std::invalid_argument("ids and values differ in length");
    if (n_v == 0) throw ConfigInvalid("number of reading clusters must be >= 1");
    if (d_c && !(*d_c > 0.0)) throw ConfigInvalid("d_c must be positive");
    const std::size_t n = values.size();
    if (n == 0) throw DegenerateValues(0, n_v);

    {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        if (distinct < n_v) throw DegenerateValues(distinct, n_v);
    }

    ReadingClustering out;
    out.ids.assign(ids.begin(), ids.end());
    out.values.assign(values.begin(), values.end());
    out.d_c = d_c ? *d_c : auto_cutoff(values);

    // Terms with (d/d_c)^2 beyond ~745 underflow to exactly 0, so the sorted
    // window below visits every non-zero term of the full O(n^2) sum.
    constexpr double kUnderflow = 750.0;
    std::vector<std::uint32_t> by_value(n);
    std::iota(by_value.begin(), by_value.end(), 0u);
    std::sort(by_value.begin(), by_value.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    const double reach = out.d_c * std::sqrt(kUnderflow);
    std::vector<double> density(n, 0.0);
    std::size_t lo = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto i = by_value[s];
        while (values[by_value[lo]] < values[i] - reach) ++lo;
        double rho = 0.0;
        for (std::size_t q = lo; q < n; ++q) {
            const auto j = by_value[q];
            const double d = values[j] - values[i];
            if (d > reach) break;
            if (j == i) continue;
            const double u = d / out.d_c;
            rho += std::exp(-u * u);
        }
        density[i] = rho;
    }

    auto peaks = compute_deltas(std::span<const double>(density), ids,
                                [&](std::uint32_t a, std::uint32_t b) { return std::fabs(values[a] - values[b]); });
    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i) gamma[i] = density[i] * peaks.delta[i];

    const auto centers = select_centers(gamma, ids, peaks.rank_order[0], n_v);
    out.assignment = assign_by_parents(peaks, centers);
    for (auto pos : centers) out.centers.push_back(ids[pos]);
    return out;
}

RegionSet intersect(const LocationClustering& loc, const ReadingClustering& read, SlotIndex t) {
    if (loc.ids.size() != read.ids.size()) throw CoverageMismatch();

    std::vector<std::pair<LocationIndex, std::uint32_t>> read_lookup;
    read_lookup.reserve(read.ids.size());
    for (std::uint32_t i = 0; i < read.ids.size(); ++i) read_lookup.emplace_back(read.ids[i], i);
    std::sort(read_lookup.begin(), read_lookup.end());

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<LocationIndex, double>>> fibers;
    for (std::size_t i = 0; i < loc.ids.size(); ++i) {
        const auto id = loc.ids[i];
        auto it = std::lower_bound(read_lookup.begin(), read_lookup.end(), std::make_pair(id, 0u));
        if (it == read_lookup.end() || it->first != id) throw CoverageMismatch();
        const auto r = it->second;
        fibers[{loc.assignment[i], read.assignment[r]}].emplace_back(id, read.values[r]);
    }

    RegionSet out;
    out.t = t;
    for (auto& [key, members] : fibers) {
        std::sort(members.begin(), members.end());
        Region region;
        region.id = static_cast<std::uint32_t>(out.regions.size());
        region.loc_cluster = key.first;
        region.read_cluster = key.second;
        for (const auto& [id, value] : members) {
            region.members.push_back(id);
            region.readings.push_back(value);
        }
        out.regions.push_back(std::move(region));
    }
    return out;
}

RegionSet split_disconnected(const RegionSet& regions, const geometry::TriangulationGraph& graph) {
    RegionSet out;
    out.t = regions.t;
    for (const auto& region : regions.regions) {
        for (const auto& piece : graph.components(region.members)) {
            Region r;
            r.id = static_cast<std::uint32_t>(out.regions.size());
            r.loc_cluster = region.loc_cluster;
            r.read_cluster = region.read_cluster;
            r.members = piece;
            for (auto id : piece) {
                auto it = std::lower_bound(region.members.begin(), region.members.end(), id);
                r.readings.push_back(region.readings[static_cast<std::size_t>(it - region.members.begin())]);
            }
            out.regions.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace stregion::partition
