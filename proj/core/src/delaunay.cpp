#include "stregion/delaunay.hpp"

#include "stregion/errors.hpp"
#include "stregion/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace stregion::geometry {

namespace {

using Triangle = std::array<std::uint32_t, 3>;

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint32_t third_vertex(const Triangle& tri, std::uint32_t a, std::uint32_t b) {
    for (auto v : tri)
        if (v != a && v != b) return v;
    throw std::logic_error("degenerate triangle");
}

/// Sweep-hull triangulation followed by Lawson flips. `order` lists vertex
/// positions sorted lexicographically; the first three must not be collinear
/// once collinear prefix handling is done by the caller.
class Triangulator {
public:
    Triangulator(const std::vector<Point2>& pts, const std::vector<std::uint32_t>& order, std::size_t apex)
        : pts_(pts) {
        seed_fan(order, apex);
        for (std::size_t i = apex + 1; i < order.size(); ++i) insert_outside(order[i]);
        legalize();
    }

    std::vector<Triangle> take() && { return std::move(tris_); }

private:
    int orient(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        return orient2d(pts_[a], pts_[b], pts_[c]);
    }

    void add_triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (orient(a, b, c) < 0) std::swap(b, c);
        const auto index = static_cast<std::uint32_t>(tris_.size());
        tris_.push_back({a, b, c});
        owner_[edge_key(a, b)] = index;
        owner_[edge_key(b, c)] = index;
        owner_[edge_key(c, a)] = index;
    }

    void seed_fan(const std::vector<std::uint32_t>& order, std::size_t apex) {
        const auto p = order[apex];
        for (std::size_t i = 0; i + 1 < apex; ++i) add_triangle(order[i], order[i + 1], p);

        if (orient(order[0], order[1], p) > 0) {
            for (std::size_t i = 0; i < apex; ++i) hull_.push_back(order[i]);
            hull_.push_back(p);
        } else {
            hull_.push_back(order[0]);
            hull_.push_back(p);
            for (std::size_t i = apex - 1; i >= 1; --i) hull_.push_back(order[i]);
        }
    }

    // p is lexicographically larger than every inserted point, hence strictly
    // outside the current hull; its visible edges form one contiguous chain.
    void insert_outside(std::uint32_t p) {
        const std::size_t h = hull_.size();
        auto visible = [&](std::size_t j) { return orient(hull_[j], hull_[(j + 1) % h], p) < 0; };

        std::size_t start = h;
        for (std::size_t j = 0; j < h; ++j) {
            if (visible(j) && !visible((j + h - 1) % h)) {
                start = j;
                break;
            }
        }
        if (start == h) throw std::logic_error("point not outside hull");

        std::size_t count = 0;
        while (visible((start + count) % h)) {
            const auto a = hull_[(start + count) % h];
            const auto b = hull_[(start + count + 1) % h];
            add_triangle(b, a, p);
            ++count;
        }

        // Replace the interior vertices of the visible chain with p.
        std::vector<std::uint32_t> next;
        next.reserve(h + 1);
        const std::size_t end = (start + count) % h;
        for (std::size_t j = 0; j < h; ++j) {
            const std::size_t idx = (end + j) % h;
            next.push_back(hull_[idx]);
            if (idx == start) {
                next.push_back(p);
                break;
            }
        }
        hull_ = std::move(next);
    }

    void legalize() {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;
        for (const auto& tri : tris_) {
            for (int k = 0; k < 3; ++k) {
                const auto a = tri[k], b = tri[(k + 1) % 3];
                if (a < b && owner_.count(edge_key(b, a))) stack.emplace_back(a, b);
            }
        }
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            auto left = owner_.find(edge_key(a, b));
            auto right = owner_.find(edge_key(b, a));
            if (left == owner_.end() || right == owner_.end()) continue;
            const auto t1 = left->second, t2 = right->second;
            const auto c = third_vertex(tris_[t1], a, b);
            const auto d = third_vertex(tris_[t2], a, b);
            if (incircle(pts_[a], pts_[b], pts_[c], pts_[d]) <= 0) continue;

            owner_.erase(edge_key(a, b));
            owner_.erase(edge_key(b, a));
            tris_[t1] = {d, b, c};
            tris_[t2] = {a, d, c};
            owner_[edge_key(d, b)] = t1;
            owner_[edge_key(b, c)] = t1;
            owner_[edge_key(c, d)] = t1;
            owner_[edge_key(a, d)] = t2;
            owner_[edge_key(d, c)] = t2;
            owner_[edge_key(c, a)] = t2;
            stack.emplace_back(a, d);
            stack.emplace_back(d, b);
            stack.emplace_back(b, c);
            stack.emplace_back(c, a);
        }
    }

    const std::vector<Point2>& pts_;
    std::vector<Triangle> tris_;
    std::vector<std::uint32_t> hull_;
    std::unordered_map<std::uint64_t, std::uint32_t> owner_;
};

void jitter_duplicates(std::vector<Point2>& pts, std::vector<std::uint32_t>& order, std::uint64_t seed) {
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const auto& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    double diag = std::hypot(max_x - min_x, max_y - min_y);
    if (diag == 0.0) diag = 1.0;
    const double magnitude = 1e-9 * diag / std::sqrt(2.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-magnitude, magnitude);
    for (std::size_t i = 1; i < order.size(); ++i) {
        auto& cur = pts[order[i]];
        const auto& prev = pts[order[i - 1]];
        if (cur.x == prev.x && cur.y == prev.y) {
            cur.x += offset(rng);
            cur.y += offset(rng);
        }
    }
}

} // namespace

std::uint32_t TriangulationGraph::position_of(LocationIndex id) const {
    auto it = std::lower_bound(by_id_.begin(), by_id_.end(), id,
                               [](const auto& entry, LocationIndex key) { return entry.first < key; });
    if (it == by_id_.end() || it->first != id) throw UnknownVertex(std::to_string(id));
    return it->second;
}

bool TriangulationGraph::contains(LocationIndex id) const noexcept {
    auto it = std::lower_bound(by_id_.begin(), by_id_.end(), id,
                               [](const auto& entry, LocationIndex key) { return entry.first < key; });
    return it != by_id_.end() && it->first == id;
}

std::vector<LocationIndex> TriangulationGraph::neighbors(LocationIndex id) const {
    std::vector<LocationIndex> out;
    for (auto pos : adjacency_[position_of(id)]) out.push_back(vertices_[pos].id);
    std::sort(out.begin(), out.end());
    return out;
}

double TriangulationGraph::edge_length(LocationIndex a, LocationIndex b) const {
    const auto pa = position_of(a), pb = position_of(b);
    const auto& adj = adjacency_[pa];
    for (std::size_t k = 0; k < adj.size(); ++k)
        if (adj[k] == pb) return adjacency_lengths_[pa][k];
    throw std::out_of_range("no edge between " + std::to_string(a) + " and " + std::to_string(b));
}

std::vector<std::vector<LocationIndex>> TriangulationGraph::components(
    std::span<const LocationIndex> subset) const {
    std::vector<char> in_subset(vertices_.size(), 0);
    std::vector<std::uint32_t> positions;
    positions.reserve(subset.size());
    for (auto id : subset) {
        const auto pos = position_of(id);
        if (!in_subset[pos]) positions.push_back(pos);
        in_subset[pos] = 1;
    }

    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::vector<LocationIndex>> out;
    std::vector<std::uint32_t> queue;
    for (auto start : positions) {
        if (seen[start]) continue;
        std::vector<LocationIndex> component;
        queue.assign(1, start);
        seen[start] = 1;
        while (!queue.empty()) {
            const auto cur = queue.back();
            queue.pop_back();
            component.push_back(vertices_[cur].id);
            for (auto nb : adjacency_[cur]) {
                if (in_subset[nb] && !seen[nb]) {
                    seen[nb] = 1;
                    queue.push_back(nb);
                }
            }
        }
        std::sort(component.begin(), component.end());
        out.push_back(std::move(component));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

TriangulationGraph build_delaunay(std::span<const PlanarPoint> points, const DelaunayOptions& options) {
    TriangulationGraph graph;
    graph.vertices_.assign(points.begin(), points.end());
    const auto n = static_cast<std::uint32_t>(points.size());

    graph.by_id_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
            throw std::invalid_argument("non-finite coordinate for vertex " + std::to_string(points[i].id));
        graph.by_id_.emplace_back(points[i].id, i);
    }
    std::sort(graph.by_id_.begin(), graph.by_id_.end());
    for (std::size_t i = 1; i < graph.by_id_.size(); ++i)
        if (graph.by_id_[i - 1].first == graph.by_id_[i].first)
            throw std::invalid_argument("repeated vertex id " + std::to_string(graph.by_id_[i].first));

    std::vector<Point2> pts(n);
    for (std::uint32_t i = 0; i < n; ++i) pts[i] = {points[i].x, points[i].y};

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    auto lex_less = [&](std::uint32_t a, std::uint32_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
        return points[a].id < points[b].id;
    };
    std::sort(order.begin(), order.end(), lex_less);

    for (int attempt = 0;; ++attempt) {
        std::size_t dup = 0;
        for (std::size_t i = 1; i < order.size() && dup == 0; ++i) {
            const auto& a = pts[order[i - 1]];
            const auto& b = pts[order[i]];
            if (a.x == b.x && a.y == b.y) dup = i;
        }
        if (dup == 0) break;
        if (!options.jitter_duplicates || attempt >= 8)
            throw DuplicatePoints(std::to_string(points[order[dup - 1]].id), std::to_string(points[order[dup]].id));
        jitter_duplicates(pts, order, options.jitter_seed + static_cast<std::uint64_t>(attempt));
        std::sort(order.begin(), order.end(), lex_less);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        graph.vertices_[i].x = pts[i].x;
        graph.vertices_[i].y = pts[i].y;
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    if (n == 2) {
        pairs.emplace_back(0, 1);
    } else if (n >= 3) {
        std::size_t apex = 2;
        while (apex < n && orient2d(pts[order[0]], pts[order[1]], pts[order[apex]]) == 0) ++apex;
        if (apex == n) {
            for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(order[i], order[i + 1]);
        } else {
            graph.triangles_ = Triangulator(pts, order, apex).take();
            for (const auto& tri : graph.triangles_) {
                for (int k = 0; k < 3; ++k) pairs.emplace_back(tri[k], tri[(k + 1) % 3]);
            }
        }
    }

    for (auto& [a, b] : pairs)
        if (a > b) std::swap(a, b);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    graph.adjacency_.assign(n, {});
    graph.adjacency_lengths_.assign(n, {});
    graph.edges_.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        const double len = std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
        graph.edges_.push_back({a, b, len});
        graph.adjacency_[a].push_back(b);
        graph.adjacency_[b].push_back(a);
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        auto& adj = graph.adjacency_[v];
        std::sort(adj.begin(), adj.end());
        auto& lens = graph.adjacency_lengths_[v];
        lens.reserve(adj.size());
        for (auto nb : adj) lens.push_back(std::hypot(pts[v].x - pts[nb].x, pts[v].y - pts[nb].y));
    }
    return graph;
}

} // namespace stregion::geometry
