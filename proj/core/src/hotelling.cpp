#include "stregion/hotelling.hpp"

#include "stregion/errors.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <cmath>
#include <limits>

namespace stregion::detection {

double hotelling_t2(std::span<const double> window, double x) {
    if (window.size() < 2) throw InsufficientHistory(window.size(), 2);
    const double n = static_cast<double>(window.size());
    double mean = 0.0;
    for (double v : window) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : window) ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1.0);
    const double diff = x - mean;
    if (var == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return n / (n + 1.0) * diff * diff / var;
}

double hotelling_critical_value(std::size_t window_size, double alpha_level) {
    if (window_size < 2) throw InsufficientHistory(window_size, 2);
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw ConfigInvalid("alpha level must be in (0, 1)");
    const boost::math::fisher_f dist(1.0, static_cast<double>(window_size) - 1.0);
    return boost::math::quantile(boost::math::complement(dist, alpha_level));
}

bool hotelling_flag(std::span<const double> window, double x, double alpha_level) {
    return hotelling_t2(window, x) > hotelling_critical_value(window.size(), alpha_level);
}

HotellingDetector::HotellingDetector(std::size_t window, double alpha_level)
    : window_(window), alpha_level_(alpha_level), critical_(hotelling_critical_value(window, alpha_level)) {}

AnomalyReport HotellingDetector::step(const TimeSlice& slice, const geometry::TriangulationGraph& graph) {
    PointValues flagged;
    std::vector<double> buffer;
    for (const auto& m : slice.members) {
        if (m.location >= history_.size()) history_.resize(static_cast<std::size_t>(m.location) + 1);
        auto& hist = history_[m.location];
        if (hist.size() == window_) {
            buffer.assign(hist.begin(), hist.end());
            const double stat = hotelling_t2(buffer, m.value);
            // A flat window gives an infinite statistic; cap it so component
            // means and JSON output stay finite.
            if (stat > critical_) flagged.emplace_back(m.location, std::min(stat, 1e300));
        }
        hist.push_back(m.value);
        if (hist.size() > window_) hist.pop_front();
    }
    return {slice.t, aggregate_points(graph, flagged)};
}

} // namespace stregion::detection
