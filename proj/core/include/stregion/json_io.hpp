#pragma once

#include "stregion/dataset.hpp"
#include "stregion/delaunay.hpp"
#include "stregion/detection.hpp"
#include "stregion/divergence.hpp"
#include "stregion/evaluation.hpp"
#include "stregion/partition.hpp"
#include "stregion/pipeline.hpp"
#include "stregion/synth.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stregion::io {

/// Bidirectional location id <-> index mapping. Used when reading report and
/// truth files without the dataset they came from.
class NameTable {
public:
    NameTable() = default;
    explicit NameTable(const Dataset& dataset);

    LocationIndex intern(const std::string& name);
    const std::string& name(LocationIndex index) const { return names_.at(index); }
    std::size_t size() const noexcept { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, LocationIndex> index_;
};

// Anomaly reports: one compact JSON object per line,
// {"t":..,"anomalies":[{"members":[..],"score":..,"kind":"region"}]}.
std::string report_to_json(const detection::AnomalyReport& report, const NameTable& names);
std::string summary_to_json(std::span<const detection::AnomalyReport> reports, Approach approach);
/// Skips blank lines and the summary line. Throws Error on malformed input.
std::vector<detection::AnomalyReport> parse_reports_jsonl(std::string_view text, NameTable& names);

std::string truth_to_json(const synth::GroundTruth& truth, const NameTable& names);
synth::GroundTruth parse_truth_json(std::string_view text, NameTable& names);

/// {"vertices":[{"id","x","y"}],"edges":[[id,id]]}
std::string graph_to_json(const geometry::TriangulationGraph& graph, const NameTable& names);

/// {"t","regions":[{"id","loc_cluster","read_cluster","members":[..]}]}, with
/// "local"/"global"/"divergence" per region when divergences are given.
std::string regions_to_json(const partition::RegionSet& regions, const NameTable& names,
                            const divergence::SlotDivergence* divergences = nullptr);

std::string metrics_to_json(const evaluation::Metrics& metrics, double external_overlap_ratio);

/// Missing keys keep the values already in `base`. Throws ConfigInvalid.
synth::SynthConfig parse_synth_config(std::string_view text, synth::SynthConfig base);
std::string synth_config_to_json(const synth::SynthConfig& config);

DetectorConfig parse_detector_config(std::string_view text, DetectorConfig base);
std::string detector_config_to_json(const DetectorConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace stregion::io
