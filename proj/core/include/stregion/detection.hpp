#pragma once

#include "stregion/dataset.hpp"
#include "stregion/delaunay.hpp"
#include "stregion/divergence.hpp"
#include "stregion/partition.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stregion::detection {

enum class AnomalyKind { Region, AggregatedPoints };

struct Anomaly {
    std::vector<LocationIndex> members; ///< ascending
    double score = 0.0;
    AnomalyKind kind = AnomalyKind::Region;

    bool operator==(const Anomaly&) const = default;
};

struct AnomalyReport {
    SlotIndex t = 0;
    std::vector<Anomaly> anomalies;

    bool operator==(const AnomalyReport&) const = default;
};

/// (location, alpha) pairs sorted by location.
using PointValues = std::vector<std::pair<LocationIndex, double>>;

/// Every member of a region inherits the region's blended divergence.
PointValues assign_point_divergences(const partition::RegionSet& regions,
                                     std::span<const divergence::RegionDivergence> divs);

/// Last-tau divergence values per location, keyed by slot index. A location
/// missing from a slot simply has no entry for it.
class PointDivergenceHistory {
public:
    explicit PointDivergenceHistory(std::size_t tau);

    std::size_t tau() const noexcept { return tau_; }

    /// Appends values for slot t; t must be later than anything recorded.
    void record(SlotIndex t, const PointValues& values);

    /// lags[j - 1] = alpha at slot t - j for j = 1 .. tau - 1.
    std::vector<std::optional<double>> lags(LocationIndex id, SlotIndex t) const;

    /// Present values within [t - tau + 1, t], oldest first.
    std::vector<double> window(LocationIndex id, SlotIndex t) const;

private:
    std::size_t tau_;
    SlotIndex last_t_ = 0;
    bool any_ = false;
    std::vector<std::deque<std::pair<SlotIndex, double>>> buffers_;
};

/// Trend weight 2 / (1 + exp(-a)) where a is the decayed mean difference
/// between the current value and each of the last tau - 1 lags. Missing lags
/// contribute nothing. 1 for a flat history, above 1 for a rising one.
double point_weight(double current, std::span<const std::optional<double>> lagged, double theta, std::size_t tau);

/// Mean of weight * alpha over the region's members.
double weighted_region_divergence(std::span<const double> weights, std::span<const double> alphas);

/// Momentum-smoothed statistics carried from slot to slot. `jmath` in [0,1]
/// is the weight on history; 0 keeps no memory, 1 freezes the statistics at
/// whatever the first slot produced.
struct MomentumState {
    double mean_global = 0.0;
    double std_global = 0.0;
    bool initialized = false;
    /// Wavy mode only: smoothed window mean per location.
    std::vector<std::optional<double>> mean_point;
};

/// Population mean and standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

struct ScoredRegion {
    std::size_t size = 0;
    double divergence = 0.0;
};

/// Updates the momentum statistics with this slot's region divergences and
/// returns the indices of regions at or above mean + (mean / |r|) * std,
/// |r| being the region's member count.
std::vector<std::size_t> threshold_weighted(std::span<const ScoredRegion> regions, MomentumState& state,
                                            double jmath);

/// Wavy test. Uses each point's window (>= 2 values, else the point is
/// skipped) to update the global fluctuation level and the point's smoothed
/// mean, then flags points with alpha > 0 and
/// alpha >= mean_i + (mean_i / alpha) * std. Returns flagged (id, alpha).
PointValues wavy_point_anomalies(const PointDivergenceHistory& history, const PointValues& current, SlotIndex t,
                                 MomentumState& state, double jmath);

/// Groups flagged points into connected pieces of the triangulation; each
/// piece scores the mean of its members' values.
std::vector<Anomaly> aggregate_points(const geometry::TriangulationGraph& graph, const PointValues& points);

} // namespace stregion::detection
