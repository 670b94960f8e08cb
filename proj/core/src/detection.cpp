#include "stregion/detection.hpp"

#include "stregion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stregion::detection {

PointValues assign_point_divergences(const partition::RegionSet& regions,
                                     std::span<const divergence::RegionDivergence> divs) {
    if (divs.size() != regions.regions.size())
        throw std::invalid_argument("one divergence per region is required");
    PointValues out;
    out.reserve(regions.member_count());
    for (std::size_t i = 0; i < regions.regions.size(); ++i) {
        for (auto id : regions.regions[i].members) out.emplace_back(id, divs[i].blended);
    }
    std::sort(out.begin(), out.end());
    return out;
}

PointDivergenceHistory::PointDivergenceHistory(std::size_t tau) : tau_(tau) {
    if (tau == 0) throw ConfigInvalid("tau must be >= 1");
}

void PointDivergenceHistory::record(SlotIndex t, const PointValues& values) {
    if (any_ && t <= last_t_) throw std::invalid_argument("history slots must increase");
    any_ = true;
    last_t_ = t;
    const auto horizon = t - static_cast<SlotIndex>(tau_);
    for (const auto& [id, alpha] : values) {
        if (id >= buffers_.size()) buffers_.resize(static_cast<std::size_t>(id) + 1);
        auto& buf = buffers_[id];
        buf.emplace_back(t, alpha);
        while (!buf.empty() && buf.front().first <= horizon) buf.pop_front();
    }
}

std::vector<std::optional<double>> PointDivergenceHistory::lags(LocationIndex id, SlotIndex t) const {
    std::vector<std::optional<double>> out(tau_ > 0 ? tau_ - 1 : 0);
    if (id >= buffers_.size()) return out;
    for (const auto& [slot, alpha] : buffers_[id]) {
        const auto lag = t - slot;
        if (lag >= 1 && lag < static_cast<SlotIndex>(tau_)) out[static_cast<std::size_t>(lag - 1)] = alpha;
    }
    return out;
}

std::vector<double> PointDivergenceHistory::window(LocationIndex id, SlotIndex t) const {
    std::vector<double> out;
    if (id >= buffers_.size()) return out;
    const auto oldest = t - static_cast<SlotIndex>(tau_) + 1;
    for (const auto& [slot, alpha] : buffers_[id])
        if (slot >= oldest && slot <= t) out.push_back(alpha);
    return out;
}

double point_weight(double current, std::span<const std::optional<double>> lagged, double theta, std::size_t tau) {
    if (tau == 0) throw ConfigInvalid("tau must be >= 1");
    double acc = 0.0;
    double decay = 1.0;
    for (std::size_t j = 1; j < tau; ++j) {
        decay *= theta;
        if (j - 1 < lagged.size() && lagged[j - 1]) acc += decay * (current - *lagged[j - 1]);
    }
    const double trend = acc / static_cast<double>(tau);
    return 2.0 / (1.0 + std::exp(-trend));
}

double weighted_region_divergence(std::span<const double> weights, std::span<const double> alphas) {
    if (weights.size() != alphas.size() || weights.empty())
        throw std::invalid_argument("weights and alphas must be non-empty and aligned");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] * alphas[i];
    return sum / static_cast<double>(weights.size());
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

std::vector<std::size_t> threshold_weighted(std::span<const ScoredRegion> regions, MomentumState& state,
                                            double jmath) {
    if (!(jmath >= 0.0 && jmath <= 1.0)) throw ConfigInvalid("jmath must be in [0, 1]");
    std::vector<std::size_t> flagged;
    if (regions.empty()) return flagged;

    std::vector<double> divs;
    divs.reserve(regions.size());
    for (const auto& r : regions) divs.push_back(r.divergence);
    const auto [cur_mean, cur_std] = mean_and_std(divs);
    if (!state.initialized) {
        state.mean_global = cur_mean;
        state.std_global = cur_std;
        state.initialized = true;
    } else {
        state.mean_global = jmath * state.mean_global + (1.0 - jmath) * cur_mean;
        state.std_global = jmath * state.std_global + (1.0 - jmath) * cur_std;
    }

    for (std::size_t i = 0; i < regions.size(); ++i) {
        const double size = static_cast<double>(std::max<std::size_t>(regions[i].size, 1));
        const double threshold = state.mean_global + (state.mean_global / size) * state.std_global;
        if (regions[i].divergence >= threshold) flagged.push_back(i);
    }
    return flagged;
}

PointValues wavy_point_anomalies(const PointDivergenceHistory& history, const PointValues& current, SlotIndex t,
                                 MomentumState& state, double jmath) {
    if (!(jmath >= 0.0 && jmath <= 1.0)) throw ConfigInvalid("jmath must be in [0, 1]");

    struct Eligible {
        LocationIndex id;
        double alpha;
        double window_mean;
    };
    std::vector<Eligible> eligible;
    std::vector<double> stds;
    for (const auto& [id, alpha] : current) {
        const auto window = history.window(id, t);
        if (window.size() < 2) continue;
        const auto [m, s] = mean_and_std(window);
        eligible.push_back({id, alpha, m});
        stds.push_back(s);
    }
    PointValues flagged;
    if (eligible.empty()) return flagged;

    double mean_std = 0.0;
    for (double s : stds) mean_std += s;
    mean_std /= static_cast<double>(stds.size());
    if (!state.initialized) {
        state.std_global = mean_std;
        state.initialized = true;
    } else {
        state.std_global = jmath * state.std_global + (1.0 - jmath) * mean_std;
    }

    for (const auto& e : eligible) {
        if (e.id >= state.mean_point.size()) state.mean_point.resize(static_cast<std::size_t>(e.id) + 1);
        auto& mean_i = state.mean_point[e.id];
        mean_i = mean_i ? jmath * *mean_i + (1.0 - jmath) * e.window_mean : e.window_mean;
        if (!(e.alpha > 0.0)) continue;
        if (e.alpha >= *mean_i + (*mean_i / e.alpha) * state.std_global) flagged.emplace_back(e.id, e.alpha);
    }
    return flagged;
}

std::vector<Anomaly> aggregate_points(const geometry::TriangulationGraph& graph, const PointValues& flagged) {
    PointValues points = flagged;
    std::sort(points.begin(), points.end());
    std::vector<LocationIndex> ids;
    ids.reserve(points.size());
    for (const auto& p : points) ids.push_back(p.first);

    std::vector<Anomaly> out;
    for (auto& component : graph.components(ids)) {
        double sum = 0.0;
        for (auto id : component) {
            auto it = std::lower_bound(points.begin(), points.end(), id, [](const auto& p, LocationIndex key) { return p.first < key; });
            sum += it->second;
        }
        const double score = sum / static_cast<double>(component.size());
        out.push_back({std::move(component), score, AnomalyKind::AggregatedPoints});
    }
    return out;
}

} // namespace stregion::detection
