#include "stregion/synth.hpp"

#include "stregion/delaunay.hpp"
#include "stregion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace stregion::synth {

namespace {

// Independent streams derived from one seed.
enum Stream : std::uint64_t { kBaseNoise = 1, kExternal = 2, kAnomaly = 3, kReadingNoise = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    return std::mt19937_64(seq);
}

std::int64_t uniform_int(std::mt19937_64& rng, double lo, double hi) {
    const auto a = static_cast<std::int64_t>(std::llround(lo));
    const auto b = static_cast<std::int64_t>(std::llround(hi));
    return std::uniform_int_distribution<std::int64_t>(a, std::max(a, b))(rng);
}

double uniform_real(std::mt19937_64& rng, Range r) {
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

bool inside(const std::vector<geometry::Point2>& poly, geometry::Point2 p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

double polygon_area(const std::vector<geometry::Point2>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        twice += (poly[j].x * poly[i].y) - (poly[i].x * poly[j].y);
    return std::fabs(twice) / 2.0;
}

/// Rejection sampling with a minimum spacing so no two locations crowd
/// together; the spacing relaxes if the polygon fills up.
std::vector<geometry::Point2> sample_region(const RegionSpec& spec, std::mt19937_64& rng) {
    double min_x = spec.polygon[0].x, max_x = min_x, min_y = spec.polygon[0].y, max_y = min_y;
    for (const auto& p : spec.polygon) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    std::uniform_real_distribution<double> ux(min_x, max_x), uy(min_y, max_y);
    double spacing = 0.6 * std::sqrt(polygon_area(spec.polygon) / static_cast<double>(spec.points));

    std::vector<geometry::Point2> pts;
    std::size_t misses = 0;
    while (pts.size() < spec.points) {
        const geometry::Point2 p{ux(rng), uy(rng)};
        if (!inside(spec.polygon, p)) continue;
        const bool crowded = std::any_of(pts.begin(), pts.end(), [&](const geometry::Point2& q) {
            return std::hypot(p.x - q.x, p.y - q.y) < spacing;
        });
        if (crowded) {
            if (++misses > 2000) {
                spacing *= 0.9;
                misses = 0;
            }
            continue;
        }
        pts.push_back(p);
    }
    return pts;
}

} // namespace

void SynthConfig::validate() const {
    if (regions.empty()) throw ConfigInvalid("at least one region is required");
    for (const auto& r : regions) {
        if (r.polygon.size() < 3) throw ConfigInvalid("region '" + r.name + "' needs a polygon with >= 3 vertices");
        if (r.points < 1) throw ConfigInvalid("region '" + r.name + "' needs at least one point");
        if (polygon_area(r.polygon) <= 0.0) throw ConfigInvalid("region '" + r.name + "' has zero area");
        if (!std::isfinite(r.amplitude) || !std::isfinite(r.bias))
            throw ConfigInvalid("region '" + r.name + "' has a non-finite base curve");
    }
    if (n_slots < 1) throw ConfigInvalid("n_slots must be >= 1");
    if (!(noise_std >= 0.0) || !(base_noise_std >= 0.0)) throw ConfigInvalid("noise std must be >= 0");
    if (!std::isfinite(sample_step)) throw ConfigInvalid("sample_step must be finite");
    auto check_range = [](Range r, const char* name, double min_lo) {
        if (!(r.lo <= r.hi) || !(r.lo >= min_lo) || !std::isfinite(r.hi))
            throw ConfigInvalid(std::string(name) + " range must satisfy " + std::to_string(min_lo) + " <= lo <= hi");
    };
    check_range(external_delta, "external delta", 0.0);
    check_range(external_length, "external length", 1.0);
    check_range(anomaly_nu, "anomaly nu", 0.0);
    check_range(anomaly_length, "anomaly length", 1.0);
    check_range(anomaly_size, "anomaly size", 1.0);
}

SynthConfig default_config() {
    SynthConfig cfg;
    // Separated blobs so each region is one location cluster at c = 4; R1 is
    // the sparsest, R2 an L shape, R4 a strip.
    cfg.regions = {
        {"R1", {{-74.045, 40.700}, {-74.010, 40.700}, {-74.005, 40.745}, {-74.043, 40.750}}, 38, 3.0, 1.0},
        {"R2",
         {{-73.975, 40.760}, {-73.945, 40.760}, {-73.945, 40.772}, {-73.960, 40.772}, {-73.960, 40.790},
          {-73.975, 40.790}},
         62, 1.0, 0.5},
        {"R3", {{-73.975, 40.700}, {-73.945, 40.700}, {-73.945, 40.735}, {-73.975, 40.735}}, 63, 1.0, 0.5},
        {"R4", {{-73.925, 40.705}, {-73.910, 40.705}, {-73.910, 40.770}, {-73.925, 40.770}}, 60, 3.0, 1.0},
    };
    return cfg;
}

double base_curve(const RegionSpec& region, double sample_step, SlotIndex t) {
    return region.amplitude * std::fabs(std::sin(static_cast<double>(t) * sample_step)) + region.bias;
}

SynthOutput generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n_regions = config.regions.size();
    const auto n_slots = static_cast<SlotIndex>(config.n_slots);

    // Locations. Ids are zero-padded so lexical order equals generation order.
    std::vector<Location> locations;
    GroundTruth truth;
    std::vector<std::size_t> region_of;
    {
        std::mt19937_64 layout = make_stream(config.layout_seed, 0);
        std::size_t total = 0;
        for (const auto& r : config.regions) total += r.points;
        const int width = std::max(3, static_cast<int>(std::to_string(total).size()));
        for (std::size_t r = 0; r < n_regions; ++r) {
            truth.region_names.push_back(config.regions[r].name);
            truth.region_members.emplace_back();
            for (const auto& p : sample_region(config.regions[r], layout)) {
                char id[32];
                std::snprintf(id, sizeof(id), "L%0*zu", width, locations.size());
                truth.region_members[r].push_back(static_cast<LocationIndex>(locations.size()));
                region_of.push_back(r);
                locations.push_back({id, p.x, p.y});
            }
        }
    }

    // Base curves with shared noise g.
    std::vector<std::vector<double>> base(n_regions, std::vector<double>(config.n_slots));
    {
        auto rng = make_stream(config.seed, kBaseNoise);
        std::normal_distribution<double> g(0.0, config.base_noise_std > 0.0 ? config.base_noise_std : 1.0);
        for (SlotIndex t = 0; t < n_slots; ++t) {
            for (std::size_t r = 0; r < n_regions; ++r) {
                double v = base_curve(config.regions[r], config.sample_step, t);
                if (config.base_noise_std > 0.0) v += g(rng);
                base[r][static_cast<std::size_t>(t)] = v;
            }
        }
    }

    // External influences shift whole regions together.
    {
        auto rng = make_stream(config.seed, kExternal);
        for (std::size_t e = 0; e < config.n_external; ++e) {
            ExternalInfluence ext;
            const auto len = std::min<SlotIndex>(
                n_slots, uniform_int(rng, config.external_length.lo, config.external_length.hi));
            ext.t_start = std::uniform_int_distribution<SlotIndex>(0, n_slots - len)(rng);
            ext.t_end = ext.t_start + len - 1;
            const auto affected = static_cast<std::size_t>(uniform_int(rng, 1.0, static_cast<double>(n_regions)));
            std::vector<std::size_t> pool(n_regions);
            for (std::size_t r = 0; r < n_regions; ++r) pool[r] = r;
            std::shuffle(pool.begin(), pool.end(), rng);
            ext.regions.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(affected));
            std::sort(ext.regions.begin(), ext.regions.end());
            const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
            ext.delta = sign * uniform_real(rng, config.external_delta);
            for (auto r : ext.regions)
                for (SlotIndex t = ext.t_start; t <= ext.t_end; ++t) base[r][static_cast<std::size_t>(t)] += ext.delta;
            truth.externals.push_back(std::move(ext));
        }
    }

    // Anomalies: a connected patch inside one region, over an interval that
    // does not touch another anomaly of the same region.
    if (config.n_anomalies > 0) {
        std::vector<geometry::PlanarPoint> pts;
        for (LocationIndex i = 0; i < locations.size(); ++i) pts.push_back({i, locations[i].x, locations[i].y});
        const auto graph = geometry::build_delaunay(pts);

        auto rng = make_stream(config.seed, kAnomaly);
        std::vector<std::vector<std::pair<SlotIndex, SlotIndex>>> busy(n_regions);
        std::size_t attempts = 0;
        while (truth.anomalies.size() < config.n_anomalies) {
            if (++attempts > 200000) throw ConfigInvalid("cannot place the requested anomalies without overlap");
            InjectedAnomaly a;
            a.region = std::uniform_int_distribution<std::size_t>(0, n_regions - 1)(rng);
            const auto len =
                std::min<SlotIndex>(n_slots, uniform_int(rng, config.anomaly_length.lo, config.anomaly_length.hi));
            a.t_start = std::uniform_int_distribution<SlotIndex>(0, n_slots - len)(rng);
            a.t_end = a.t_start + len - 1;
            const bool clash = std::any_of(busy[a.region].begin(), busy[a.region].end(), [&](const auto& iv) {
                return a.t_start <= iv.second + 1 && iv.first <= a.t_end + 1;
            });
            if (clash) continue;

            const auto& members = truth.region_members[a.region];
            const auto size = std::min<std::size_t>(
                members.size(),
                static_cast<std::size_t>(uniform_int(rng, config.anomaly_size.lo, config.anomaly_size.hi)));
            std::set<LocationIndex> patch{members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)]};
            while (patch.size() < size) {
                std::set<LocationIndex> frontier;
                for (auto id : patch)
                    for (auto nb : graph.neighbors(id))
                        if (region_of[nb] == a.region && !patch.count(nb)) frontier.insert(nb);
                if (frontier.empty()) break;
                auto it = frontier.begin();
                std::advance(it, std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng));
                patch.insert(*it);
            }
            a.members.assign(patch.begin(), patch.end());
            a.sign = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
            a.nu = uniform_real(rng, config.anomaly_nu);
            busy[a.region].emplace_back(a.t_start, a.t_end);
            truth.anomalies.push_back(std::move(a));
        }
        std::sort(truth.anomalies.begin(), truth.anomalies.end(), [](const auto& x, const auto& y) {
            if (x.t_start != y.t_start) return x.t_start < y.t_start;
            return x.members < y.members;
        });
    }

    // Readings.
    std::vector<TimeSlice> slices(config.n_slots);
    {
        for (SlotIndex t = 0; t < n_slots; ++t) {
            auto& slice = slices[static_cast<std::size_t>(t)];
            slice.t = t;
            slice.members.reserve(locations.size());
            for (LocationIndex i = 0; i < locations.size(); ++i)
                slice.members.push_back({i, t, base[region_of[i]][static_cast<std::size_t>(t)]});
        }
        for (const auto& a : truth.anomalies)
            for (SlotIndex t = a.t_start; t <= a.t_end; ++t)
                for (auto id : a.members) slices[static_cast<std::size_t>(t)].members[id].value += a.sign * a.nu;

        if (config.noise_std > 0.0) {
            auto rng = make_stream(config.seed, kReadingNoise);
            std::normal_distribution<double> noise(0.0, config.noise_std);
            for (auto& slice : slices)
                for (auto& m : slice.members) m.value += noise(rng);
        }
    }

    return {Dataset(std::move(locations), std::move(slices)), std::move(truth)};
}

} // namespace stregion::synth
