#pragma once

#include "stregion/dataset.hpp"
#include "stregion/predicates.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stregion::synth {

struct RegionSpec {
    std::string name;
    std::vector<geometry::Point2> polygon; ///< simple polygon, any orientation
    std::size_t points = 0;                ///< locations sampled inside it
    double amplitude = 1.0;                ///< y0
    double bias = 0.0;                     ///< b
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct SynthConfig {
    std::vector<RegionSpec> regions;
    std::size_t n_slots = 6402;
    double sample_step = 0.1;      ///< x_t = t * sample_step
    double noise_std = 0.5;        ///< per-location, per-slot reading noise
    double base_noise_std = 0.1;   ///< g: shared noise on each region's base curve
    std::size_t n_external = 82;
    Range external_delta{0.5, 1.5};  ///< magnitude; sign is random
    Range external_length{20, 100};  ///< slots
    std::size_t n_anomalies = 200;
    Range anomaly_nu{1.5, 2.0};
    Range anomaly_length{10, 50};    ///< slots
    Range anomaly_size{10, 25};       ///< locations
    std::uint64_t seed = 1;
    /// Fixes the sampled coordinates independently of `seed`.
    std::uint64_t layout_seed = 20200;

    /// Throws ConfigInvalid.
    void validate() const;
};

/// Four regions of different size, shape and density (R1 the sparsest),
/// 223 locations, 6402 slots, 82 external influences and 200 anomalies.
SynthConfig default_config();

struct InjectedAnomaly {
    std::vector<LocationIndex> members; ///< ascending, connected within one region
    std::size_t region = 0;
    SlotIndex t_start = 0;
    SlotIndex t_end = 0; ///< inclusive
    int sign = 1;
    double nu = 0.0;
};

struct ExternalInfluence {
    std::vector<std::size_t> regions;
    SlotIndex t_start = 0;
    SlotIndex t_end = 0; ///< inclusive
    double delta = 0.0;
};

struct GroundTruth {
    std::vector<std::string> region_names;
    std::vector<std::vector<LocationIndex>> region_members;
    std::vector<InjectedAnomaly> anomalies;
    std::vector<ExternalInfluence> externals;
};

struct SynthOutput {
    Dataset dataset;
    GroundTruth truth;
};

/// Samples the locations, base curves y0*|sin(x_t)| + b + g, external shifts
/// and injected anomalies. Fully determined by the config.
SynthOutput generate(const SynthConfig& config);

/// Noiseless base curve value for a region at slot t.
double base_curve(const RegionSpec& region, double sample_step, SlotIndex t);

} // namespace stregion::synth
