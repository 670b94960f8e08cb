#pragma once

#include "stregion/dataset.hpp"
#include "stregion/delaunay.hpp"
#include "stregion/detection.hpp"
#include "stregion/divergence.hpp"
#include "stregion/partition.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stregion {

enum class Approach { Weighted, Wavy, HotellingT2 };

std::string_view to_string(Approach approach);
/// Accepts "weighted", "wavy" and "baseline-t2" (or "t2"). Throws ConfigInvalid.
Approach parse_approach(std::string_view text);

struct DetectorConfig {
    Approach approach = Approach::Weighted;
    std::size_t location_clusters = 4; ///< c
    std::size_t reading_clusters = 2;  ///< n_v
    std::optional<double> d_c;         ///< unset: CFDP 2% rule
    double lambda = 1.0;               ///< local/global blend
    std::size_t tau = 10;              ///< history window
    double theta = 1.0;                ///< weight decay
    double jmath = 0.9;                ///< momentum on history
    divergence::BandwidthRule bandwidth;
    double alpha_level = 0.05;         ///< T^2 baseline significance
    std::size_t t2_window = 10;
    bool split_regions = false;
    geometry::DelaunayOptions delaunay;
    std::size_t jobs = 1;

    /// Throws ConfigInvalid when a parameter is outside its documented range.
    void validate() const;
};

/// Everything the per-slot, history-free stages produce.
struct SlotAnalysis {
    SlotIndex t = 0;
    std::shared_ptr<const geometry::TriangulationGraph> graph;
    std::shared_ptr<const partition::LocationClustering> locations;
    partition::ReadingClustering readings;
    partition::RegionSet regions;
    divergence::SlotDivergence divergence;
};

/// Runs triangulation, both clusterings, intersection and divergence for
/// slices one at a time. The triangulation and location clustering depend
/// only on the member locations, so they are reused while that set does not
/// change between consecutive calls.
class SlotAnalyzer {
public:
    SlotAnalyzer(const Dataset& dataset, DetectorConfig config);

    SlotAnalysis analyze(const TimeSlice& slice);
    std::shared_ptr<const geometry::TriangulationGraph> triangulate(const TimeSlice& slice);

private:
    void refresh_geometry(const TimeSlice& slice);

    const Dataset& dataset_;
    DetectorConfig config_;
    std::vector<LocationIndex> cached_members_;
    std::shared_ptr<const geometry::TriangulationGraph> graph_;
    std::shared_ptr<const partition::LocationClustering> clustering_;
};

/// Calls `sink` once per slot in time order. The stateless stages run on up
/// to config.jobs threads; `sink` always runs on the calling thread.
void for_each_slot(const Dataset& dataset, const DetectorConfig& config,
                   const std::function<void(const SlotAnalysis&)>& sink);

class WeightedDetector {
public:
    explicit WeightedDetector(const DetectorConfig& config);
    detection::AnomalyReport step(const SlotAnalysis& slot);

private:
    DetectorConfig config_;
    detection::PointDivergenceHistory history_;
    detection::MomentumState state_;
};

class WavyDetector {
public:
    explicit WavyDetector(const DetectorConfig& config);
    detection::AnomalyReport step(const SlotAnalysis& slot);

private:
    DetectorConfig config_;
    detection::PointDivergenceHistory history_;
    detection::MomentumState state_;
};

/// One report per slot, in time order. Errors are rethrown as SlotError.
std::vector<detection::AnomalyReport> detect(const Dataset& dataset, const DetectorConfig& config);

/// Runs several approaches over one dataset, sharing the per-slot analysis
/// between the weighted and wavy detectors.
std::map<Approach, std::vector<detection::AnomalyReport>> detect_many(const Dataset& dataset,
                                                                      const DetectorConfig& config,
                                                                      const std::vector<Approach>& approaches);

} // namespace stregion
