#include "stregion/pipeline.hpp"

#include "stregion/errors.hpp"
#include "stregion/hotelling.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>

namespace stregion {

std::string_view to_string(Approach approach) {
    switch (approach) {
    case Approach::Weighted: return "weighted";
    case Approach::Wavy: return "wavy";
    case Approach::HotellingT2: return "baseline-t2";
    }
    return "unknown";
}

Approach parse_approach(std::string_view text) {
    if (text == "weighted") return Approach::Weighted;
    if (text == "wavy") return Approach::Wavy;
    if (text == "baseline-t2" || text == "t2") return Approach::HotellingT2;
    throw ConfigInvalid("unknown approach '" + std::string(text) + "'");
}

void DetectorConfig::validate() const {
    if (location_clusters < 1) throw ConfigInvalid("c (location clusters) must be >= 1");
    if (reading_clusters < 1) throw ConfigInvalid("n_v (reading clusters) must be >= 1");
    if (d_c && !(*d_c > 0.0)) throw ConfigInvalid("d_c must be positive");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigInvalid("lambda must be in [0, 1]");
    if (tau < 1) throw ConfigInvalid("tau must be >= 1");
    // With tau = 1 there are no lag terms, so theta is unused and 0 is allowed.
    const bool theta_ok = (theta > 0.0 && theta <= 1.0) || (tau == 1 && theta == 0.0);
    if (!theta_ok) throw ConfigInvalid("theta must be in (0, 1] (0 only with tau = 1)");
    if (!(jmath >= 0.0 && jmath <= 1.0)) throw ConfigInvalid("jmath must be in [0, 1]");
    if (bandwidth.fixed && !(*bandwidth.fixed > 0.0)) throw ConfigInvalid("fixed bandwidth must be positive");
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw ConfigInvalid("alpha level must be in (0, 1)");
    if (t2_window < 2) throw ConfigInvalid("T^2 window must be >= 2");
    if (jobs < 1) throw ConfigInvalid("jobs must be >= 1");
}

SlotAnalyzer::SlotAnalyzer(const Dataset& dataset, DetectorConfig config)
    : dataset_(dataset), config_(std::move(config)) {}

void SlotAnalyzer::refresh_geometry(const TimeSlice& slice) {
    auto members = slice.locations();
    if (graph_ && members == cached_members_) return;

    std::vector<geometry::PlanarPoint> points;
    points.reserve(members.size());
    for (auto id : members) {
        const auto& loc = dataset_.location(id);
        points.push_back({id, loc.x, loc.y});
    }
    auto graph = std::make_shared<geometry::TriangulationGraph>(geometry::build_delaunay(points, config_.delaunay));
    const auto c = std::min(config_.location_clusters, graph->size());
    clustering_ = std::make_shared<partition::LocationClustering>(partition::cluster_locations(*graph, c));
    graph_ = std::move(graph);
    cached_members_ = std::move(members);
}

std::shared_ptr<const geometry::TriangulationGraph> SlotAnalyzer::triangulate(const TimeSlice& slice) {
    refresh_geometry(slice);
    return graph_;
}

SlotAnalysis SlotAnalyzer::analyze(const TimeSlice& slice) {
    refresh_geometry(slice);

    SlotAnalysis out;
    out.t = slice.t;
    out.graph = graph_;
    out.locations = clustering_;

    const auto ids = slice.locations();
    const auto values = slice.values();
    std::set<double> distinct(values.begin(), values.end());
    const auto n_v = std::min(config_.reading_clusters, distinct.size());
    out.readings = partition::cluster_readings_cfdp(ids, values, n_v, config_.d_c);

    out.regions = partition::intersect(*clustering_, out.readings, slice.t);
    if (config_.split_regions) out.regions = partition::split_disconnected(out.regions, *graph_);
    out.divergence = divergence::regional_divergence(out.regions, config_.lambda, config_.bandwidth);
    return out;
}

void for_each_slot(const Dataset& dataset, const DetectorConfig& config,
                   const std::function<void(const SlotAnalysis&)>& sink) {
    config.validate();
    const auto& slices = dataset.slices();
    const std::size_t jobs = std::max<std::size_t>(1, config.jobs);

    auto analyze_guarded = [](SlotAnalyzer& analyzer, const TimeSlice& slice) {
        try {
            return analyzer.analyze(slice);
        } catch (const SlotError&) {
            throw;
        } catch (const std::exception& e) {
            throw SlotError(slice.t, e.what());
        }
    };

    if (jobs == 1) {
        SlotAnalyzer analyzer(dataset, config);
        for (const auto& slice : slices) sink(analyze_guarded(analyzer, slice));
        return;
    }

    // Contiguous blocks per worker keep the geometry cache effective.
    constexpr std::size_t kBatch = 512;
    std::vector<SlotAnalyzer> analyzers;
    analyzers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) analyzers.emplace_back(dataset, config);

    for (std::size_t begin = 0; begin < slices.size(); begin += kBatch) {
        const std::size_t end = std::min(slices.size(), begin + kBatch);
        std::vector<std::optional<SlotAnalysis>> batch(end - begin);
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> workers;
        const std::size_t per = (end - begin + jobs - 1) / jobs;
        for (std::size_t w = 0; w < jobs; ++w) {
            const std::size_t lo = begin + w * per;
            const std::size_t hi = std::min(end, lo + per);
            if (lo >= hi) break;
            workers.emplace_back([&, w, lo, hi] {
                try {
                    for (std::size_t i = lo; i < hi; ++i) batch[i - begin] = analyze_guarded(analyzers[w], slices[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
        for (auto& slot : batch) sink(*slot);
    }
}

namespace {

std::vector<double> member_values(const detection::PointValues& alphas, const std::vector<LocationIndex>& members) {
    std::vector<double> out;
    out.reserve(members.size());
    for (auto id : members) {
        auto it = std::lower_bound(alphas.begin(), alphas.end(), id, [](const auto& p, LocationIndex key) { return p.first < key; });
        out.push_back(it->second);
    }
    return out;
}

} // namespace

WeightedDetector::WeightedDetector(const DetectorConfig& config) : config_(config), history_(config.tau) {}

detection::AnomalyReport WeightedDetector::step(const SlotAnalysis& slot) {
    const auto alphas = detection::assign_point_divergences(slot.regions, slot.divergence.regions);
    history_.record(slot.t, alphas);

    const auto& regions = slot.regions.regions;
    std::vector<detection::ScoredRegion> scored;
    scored.reserve(regions.size());
    for (const auto& region : regions) {
        const auto region_alphas = member_values(alphas, region.members);
        std::vector<double> weights;
        weights.reserve(region.members.size());
        for (std::size_t k = 0; k < region.members.size(); ++k) {
            const auto lags = history_.lags(region.members[k], slot.t);
            weights.push_back(detection::point_weight(region_alphas[k], lags, config_.theta, config_.tau));
        }
        scored.push_back({region.members.size(), detection::weighted_region_divergence(weights, region_alphas)});
    }

    detection::AnomalyReport report{slot.t, {}};
    for (auto i : detection::threshold_weighted(scored, state_, config_.jmath))
        report.anomalies.push_back({regions[i].members, scored[i].divergence, detection::AnomalyKind::Region});
    return report;
}

WavyDetector::WavyDetector(const DetectorConfig& config) : config_(config), history_(config.tau) {}

detection::AnomalyReport WavyDetector::step(const SlotAnalysis& slot) {
    const auto alphas = detection::assign_point_divergences(slot.regions, slot.divergence.regions);
    history_.record(slot.t, alphas);
    const auto flagged = detection::wavy_point_anomalies(history_, alphas, slot.t, state_, config_.jmath);
    return {slot.t, detection::aggregate_points(*slot.graph, flagged)};
}

std::map<Approach, std::vector<detection::AnomalyReport>> detect_many(const Dataset& dataset,
                                                                      const DetectorConfig& config,
                                                                      const std::vector<Approach>& approaches) {
    config.validate();
    std::map<Approach, std::vector<detection::AnomalyReport>> out;
    const bool want_weighted = std::count(approaches.begin(), approaches.end(), Approach::Weighted) > 0;
    const bool want_wavy = std::count(approaches.begin(), approaches.end(), Approach::Wavy) > 0;
    const bool want_t2 = std::count(approaches.begin(), approaches.end(), Approach::HotellingT2) > 0;

    if (want_weighted || want_wavy) {
        WeightedDetector weighted(config);
        WavyDetector wavy(config);
        auto* weighted_out = want_weighted ? &out[Approach::Weighted] : nullptr;
        auto* wavy_out = want_wavy ? &out[Approach::Wavy] : nullptr;
        for_each_slot(dataset, config, [&](const SlotAnalysis& slot) {
            try {
                if (weighted_out) weighted_out->push_back(weighted.step(slot));
                if (wavy_out) wavy_out->push_back(wavy.step(slot));
            } catch (const std::exception& e) {
                throw SlotError(slot.t, e.what());
            }
        });
    }

    if (want_t2) {
        auto& reports = out[Approach::HotellingT2];
        SlotAnalyzer analyzer(dataset, config);
        detection::HotellingDetector t2(config.t2_window, config.alpha_level);
        for (const auto& slice : dataset.slices()) {
            try {
                reports.push_back(t2.step(slice, *analyzer.triangulate(slice)));
            } catch (const SlotError&) {
                throw;
            } catch (const std::exception& e) {
                throw SlotError(slice.t, e.what());
            }
        }
    }
    return out;
}

std::vector<detection::AnomalyReport> detect(const Dataset& dataset, const DetectorConfig& config) {
    auto all = detect_many(dataset, config, {config.approach});
    return std::move(all[config.approach]);
}

} // namespace stregion
