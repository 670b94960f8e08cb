#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond its public types.

#include "stregion/delaunay.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

/// Exact sign of the in-circle determinant for a counter-clockwise triangle.
inline int incircle_sign(double ax, double ay, double bx, double by, double cx, double cy, double dx, double dy) {
    const Rational adx = Rational(ax) - Rational(dx), ady = Rational(ay) - Rational(dy);
    const Rational bdx = Rational(bx) - Rational(dx), bdy = Rational(by) - Rational(dy);
    const Rational cdx = Rational(cx) - Rational(dx), cdy = Rational(cy) - Rational(dy);
    const Rational a2 = adx * adx + ady * ady, b2 = bdx * bdx + bdy * bdy, c2 = cdx * cdx + cdy * cdy;
    const Rational det = adx * (bdy * c2 - b2 * cdy) - ady * (bdx * c2 - b2 * cdx) + a2 * (bdx * cdy - bdy * cdx);
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

inline int orient_sign(double ax, double ay, double bx, double by, double cx, double cy) {
    const Rational det = (Rational(bx) - Rational(ax)) * (Rational(cy) - Rational(ay)) -
                         (Rational(by) - Rational(ay)) * (Rational(cx) - Rational(ax));
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

/// Number of (triangle, point) pairs where the point lies strictly inside
/// the triangle's circumcircle.
inline std::size_t circumcircle_violations(const stregion::geometry::TriangulationGraph& g) {
    std::size_t bad = 0;
    const auto& v = g.vertices();
    for (const auto& tri : g.triangles()) {
        auto a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
        if (orient_sign(a.x, a.y, b.x, b.y, c.x, c.y) < 0) std::swap(b, c);
        for (std::uint32_t p = 0; p < v.size(); ++p) {
            if (p == tri[0] || p == tri[1] || p == tri[2]) continue;
            if (incircle_sign(a.x, a.y, b.x, b.y, c.x, c.y, v[p].x, v[p].y) > 0) ++bad;
        }
    }
    return bad;
}

/// Undirected edge set keyed by location id.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> edge_ids(const stregion::geometry::TriangulationGraph& g) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& e : g.edges()) {
        auto a = g.vertices()[e.u].id, b = g.vertices()[e.v].id;
        out.emplace(std::min(a, b), std::max(a, b));
    }
    return out;
}

struct PeakClustering {
    std::map<std::uint32_t, double> rho;
    std::map<std::uint32_t, double> delta;
    std::map<std::uint32_t, std::uint32_t> label; ///< id -> center id
    std::set<std::uint32_t> centers;
};

/// Brute-force triangulation density peaks: rho from incident edge lengths,
/// delta and parent over every pair, centers by gamma with the densest
/// vertex forced in, labels by walking parents.
inline PeakClustering brute_force_location_clusters(const stregion::geometry::TriangulationGraph& g, std::size_t c) {
    PeakClustering out;
    const auto& v = g.vertices();
    std::map<std::uint32_t, std::vector<double>> incident;
    std::map<std::uint32_t, std::pair<double, double>> xy;
    for (const auto& p : v) xy[p.id] = {p.x, p.y};
    for (const auto& e : g.edges()) {
        const auto a = v[e.u], b = v[e.v];
        const double len = std::hypot(a.x - b.x, a.y - b.y);
        incident[a.id].push_back(len);
        incident[b.id].push_back(len);
    }
    for (const auto& p : v) {
        const auto& lens = incident[p.id];
        double mu = 0.0;
        for (double l : lens) mu += l;
        mu /= static_cast<double>(lens.size());
        double var = 0.0;
        for (double l : lens) var += (l - mu) * (l - mu);
        const double sigma = std::max(std::sqrt(var / static_cast<double>(lens.size())), 1e-12);
        out.rho[p.id] = std::log(1.0 / sigma);
    }
    auto higher = [&](std::uint32_t a, std::uint32_t b) {
        return out.rho[a] > out.rho[b] || (out.rho[a] == out.rho[b] && a < b);
    };
    std::map<std::uint32_t, std::optional<std::uint32_t>> parent;
    std::optional<std::uint32_t> top;
    double max_delta = 0.0;
    for (const auto& p : v) {
        std::optional<std::uint32_t> best;
        double best_d = 0.0;
        for (const auto& q : v) {
            if (!higher(q.id, p.id)) continue;
            const double d = std::hypot(p.x - q.x, p.y - q.y);
            if (!best || d < best_d || (d == best_d && higher(q.id, *best))) {
                best = q.id;
                best_d = d;
            }
        }
        parent[p.id] = best;
        if (best) {
            out.delta[p.id] = best_d;
            max_delta = std::max(max_delta, best_d);
        } else {
            top = p.id;
        }
    }
    if (!top) return out;
    out.delta[*top] = v.size() > 1 ? max_delta : 0.0;

    std::vector<std::pair<double, std::uint32_t>> gamma;
    for (const auto& p : v) gamma.emplace_back(out.rho[p.id] * out.delta[p.id], p.id);
    std::sort(gamma.begin(), gamma.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    out.centers.insert(*top);
    for (const auto& [gm, id] : gamma) {
        if (out.centers.size() >= c) break;
        out.centers.insert(id);
    }
    for (const auto& p : v) {
        auto cur = p.id;
        while (!out.centers.count(cur)) cur = *parent[cur];
        out.label[p.id] = cur;
    }
    return out;
}

/// Labels expressed as the partition they induce, independent of numbering.
template <typename Map>
std::set<std::set<std::uint32_t>> as_partition(const Map& label) {
    std::map<std::uint32_t, std::set<std::uint32_t>> groups;
    for (const auto& [id, l] : label) groups[static_cast<std::uint32_t>(l)].insert(id);
    std::set<std::set<std::uint32_t>> out;
    for (auto& [l, g] : groups) out.insert(g);
    return out;
}

/// KL(p || q) of two Gaussian mixtures by composite Simpson quadrature.
inline double quadrature_kl(const std::vector<double>& p_support, double p_bw, const std::vector<double>& q_support,
                            double q_bw) {
    auto mixture = [](const std::vector<double>& s, double bw, double x) {
        double acc = 0.0;
        for (double v : s) {
            const double z = (x - v) / bw;
            acc += std::exp(-0.5 * z * z);
        }
        return acc / (static_cast<double>(s.size()) * bw * std::sqrt(2.0 * M_PI));
    };
    double lo = *std::min_element(p_support.begin(), p_support.end()) - 12.0 * p_bw;
    double hi = *std::max_element(p_support.begin(), p_support.end()) + 12.0 * p_bw;
    const int n = 4000;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + h * i;
        const double p = mixture(p_support, p_bw, x);
        const double q = std::max(mixture(q_support, q_bw, x), 1e-12);
        const double f = p > 0.0 ? p * std::log(std::max(p, 1e-12) / q) : 0.0;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * h / 3.0;
}

/// Two planted blobs: points on a jittered grid with the given spacing, the
/// second blob offset so the closest cross-blob pair is at least `gap`.
struct TwoBlobs {
    std::vector<stregion::geometry::PlanarPoint> points;
    std::map<std::uint32_t, int> truth;
};

inline TwoBlobs two_blobs(std::mt19937_64& rng, double spacing, double gap_factor) {
    std::uniform_int_distribution<int> side(4, 7);
    std::uniform_real_distribution<double> wiggle(-0.15 * spacing, 0.15 * spacing);
    TwoBlobs out;
    std::uint32_t id = 0;
    double offset = 0.0;
    for (int blob = 0; blob < 2; ++blob) {
        const int w = side(rng), h = side(rng);
        double max_x = 0.0;
        for (int i = 0; i < w; ++i) {
            for (int j = 0; j < h; ++j) {
                const double x = offset + i * spacing + wiggle(rng);
                const double y = j * spacing + wiggle(rng);
                max_x = std::max(max_x, x);
                out.points.push_back({id, x, y});
                out.truth[id++] = blob;
            }
        }
        // 0.3 * spacing covers the jitter on both sides of the gap.
        offset = max_x + gap_factor * spacing + 0.3 * spacing;
    }
    return out;
}

} // namespace oracle
