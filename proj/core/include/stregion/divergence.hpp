#pragma once

#include "stregion/partition.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stregion::divergence {

/// Densities are floored here before taking logs so disjoint supports give a
/// large finite divergence instead of infinity.
inline constexpr double kDensityFloor = 1e-12;

/// Bandwidth used when the sample has no spread.
double bandwidth_floor(double sample_mean);

/// Scott's rule, s * n^(-1/5) with s the sample (n-1) standard deviation.
double scott_bandwidth(std::span<const double> values);

/// Gaussian kernel density estimate over a scalar sample.
class DensityModel {
public:
    /// Throws std::invalid_argument for an empty support or bandwidth <= 0.
    DensityModel(std::vector<double> support, double bandwidth);

    /// Bandwidth chosen by scott_bandwidth().
    static DensityModel scott(std::vector<double> support);

    const std::vector<double>& support() const noexcept { return support_; }
    double bandwidth() const noexcept { return bandwidth_; }

    /// Raw mixture density, no floor.
    double density(double x) const;

private:
    std::vector<double> support_;
    double bandwidth_;
    double norm_;
    double inv_bandwidth_;
};

/// Density at x, floored at kDensityFloor.
double kde_eval(const DensityModel& model, double x);

/// Monte-Carlo estimate of KL(p || q) over samples drawn from p: the mean of
/// log p(v) - log q(v). Not clamped; small negative values are estimation
/// noise. Throws std::invalid_argument when samples is empty.
double kl_divergence(const DensityModel& p, const DensityModel& q, std::span<const double> samples);

/// How density models pick their bandwidth: Scott's rule per model, or one
/// fixed value for every model.
struct BandwidthRule {
    std::optional<double> fixed;

    DensityModel make(std::vector<double> support) const;
};

struct RegionDivergence {
    std::uint32_t region = 0;
    double local = 0.0;   ///< against the containing location cluster
    double global = 0.0;  ///< against every other reading of the slot
    double blended = 0.0; ///< lambda * local + (1 - lambda) * global
};

struct SlotDivergence {
    std::vector<RegionDivergence> regions; ///< aligned with RegionSet::regions
    std::vector<std::string> warnings;
};

/// Local/global divergence of every region. When a slot is a single region
/// there is nothing to compare globally: the global term is 0 and, if
/// lambda < 1, a SingletonSlot warning is attached.
SlotDivergence regional_divergence(const partition::RegionSet& regions, double lambda,
                                   const BandwidthRule& rule = {});

} // namespace stregion::divergence
