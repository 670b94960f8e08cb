#pragma once

#include "stregion/dataset.hpp"
#include "stregion/delaunay.hpp"
#include "stregion/detection.hpp"

#include <deque>
#include <map>
#include <span>
#include <vector>

namespace stregion::detection {

/// Univariate Hotelling T^2 of a new reading against a trailing window:
/// n/(n+1) * (x - mean)^2 / s^2, with s^2 the sample variance of the window.
/// Under normality this follows F(1, n-1). A zero-variance window gives 0
/// when x equals its mean and +inf otherwise. Throws InsufficientHistory for
/// fewer than 2 window values.
double hotelling_t2(std::span<const double> window, double x);

/// Upper (1 - alpha_level) quantile of F(1, n-1) for a window of n values.
double hotelling_critical_value(std::size_t window_size, double alpha_level);

bool hotelling_flag(std::span<const double> window, double x, double alpha_level);

/// Point-wise T^2 baseline followed by triangulation aggregation. Each
/// location keeps its own trailing window of raw readings; a location is
/// tested once its window is full.
class HotellingDetector {
public:
    HotellingDetector(std::size_t window, double alpha_level);

    AnomalyReport step(const TimeSlice& slice, const geometry::TriangulationGraph& graph);

private:
    std::size_t window_;
    double alpha_level_;
    double critical_;
    std::vector<std::deque<double>> history_;
};

} // namespace stregion::detection
