#include "stregion/divergence.hpp"

#include "stregion/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace stregion::divergence {

double bandwidth_floor(double sample_mean) { return 1e-6 * (1.0 + std::fabs(sample_mean)); }

double scott_bandwidth(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("bandwidth of an empty sample");
    const double n = static_cast<double>(values.size());
    // Running mean and scaled deviations so values near the double range do
    // not overflow.
    double mean = 0.0;
    double k = 0.0;
    for (double v : values) mean += (v - mean) / ++k;
    if (values.size() < 2) return bandwidth_floor(mean);

    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::fabs(v / 2.0 - mean / 2.0));
    if (!(scale > 0.0)) return bandwidth_floor(mean);
    double ss = 0.0;
    for (double v : values) {
        const double z = (v / 2.0 - mean / 2.0) / scale;
        ss += z * z;
    }
    const double s = 2.0 * scale * std::sqrt(ss / (n - 1.0));
    if (!(s > 0.0) || !std::isfinite(s)) return bandwidth_floor(mean);
    return s * std::pow(n, -0.2);
}

DensityModel::DensityModel(std::vector<double> support, double bandwidth)
    : support_(std::move(support)), bandwidth_(bandwidth) {
    if (support_.empty()) throw std::invalid_argument("density model needs a non-empty support");
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
        throw std::invalid_argument("density model bandwidth must be positive");
    // Standard 1-D normalisation (2 pi sigma^2)^(-1/2).
    norm_ = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth_ * static_cast<double>(support_.size()));
    inv_bandwidth_ = 1.0 / bandwidth_;
}

DensityModel DensityModel::scott(std::vector<double> support) {
    const double bw = scott_bandwidth(support);
    return DensityModel(std::move(support), bw);
}

double DensityModel::density(double x) const {
    double sum = 0.0;
    for (double v : support_) {
        const double z = (x - v) * inv_bandwidth_;
        sum += std::exp(-0.5 * z * z);
    }
    return sum * norm_;
}

double kde_eval(const DensityModel& model, double x) { return std::max(model.density(x), kDensityFloor); }

double kl_divergence(const DensityModel& p, const DensityModel& q, std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("KL estimate needs at least one sample");
    double sum = 0.0;
    for (double v : samples) sum += std::log(kde_eval(p, v)) - std::log(kde_eval(q, v));
    return sum / static_cast<double>(samples.size());
}

DensityModel BandwidthRule::make(std::vector<double> support) const {
    if (fixed) return DensityModel(std::move(support), *fixed);
    return DensityModel::scott(std::move(support));
}

SlotDivergence regional_divergence(const partition::RegionSet& regions, double lambda, const BandwidthRule& rule) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigInvalid("lambda must be in [0, 1]");

    SlotDivergence out;
    const auto& rs = regions.regions;
    if (rs.empty()) return out;

    std::map<std::uint32_t, std::vector<double>> cluster_readings;
    for (const auto& r : rs) {
        auto& bucket = cluster_readings[r.loc_cluster];
        bucket.insert(bucket.end(), r.readings.begin(), r.readings.end());
    }
    std::map<std::uint32_t, DensityModel> cluster_models;
    for (auto& [cluster, readings] : cluster_readings) cluster_models.emplace(cluster, rule.make(readings));

    if (rs.size() == 1 && lambda < 1.0)
        out.warnings.push_back("SingletonSlot: slot t=" + std::to_string(regions.t) +
                               " has a single region; global divergence set to 0");

    out.regions.reserve(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& region = rs[i];
        const auto p = rule.make(region.readings);

        RegionDivergence d;
        d.region = region.id;
        d.local = kl_divergence(p, cluster_models.at(region.loc_cluster), region.readings);

        std::vector<double> rest;
        rest.reserve(regions.member_count() - region.readings.size());
        for (std::size_t j = 0; j < rs.size(); ++j)
            if (j != i) rest.insert(rest.end(), rs[j].readings.begin(), rs[j].readings.end());
        d.global = rest.empty() ? 0.0 : kl_divergence(p, rule.make(std::move(rest)), region.readings);

        d.blended = lambda * d.local + (1.0 - lambda) * d.global;
        out.regions.push_back(d);
    }
    return out;
}

} // namespace stregion::divergence
