#pragma once

#include "stregion/dataset.hpp"
#include "stregion/detection.hpp"
#include "stregion/synth.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace stregion::evaluation {

/// One (location, slot) cell of the spatio-temporal grid.
using Cell = std::pair<LocationIndex, SlotIndex>;

/// Sorts and deduplicates.
std::vector<Cell> normalize_cells(std::vector<Cell> cells);

/// |A ∩ B| / |A ∪ B| over sorted, duplicate-free cell sets; 0 when both are
/// empty.
double iou(std::span<const Cell> detected, std::span<const Cell> truth);

/// Per-slot detections chained into events: anomalies in consecutive slots
/// sharing at least one member belong to the same event.
struct DetectionEvent {
    std::vector<Cell> cells; ///< sorted
    double score = 0.0;      ///< highest per-slot score in the event
    SlotIndex t_start = 0;
    SlotIndex t_end = 0;
};

std::vector<DetectionEvent> build_events(std::span<const detection::AnomalyReport> reports);

std::vector<Cell> truth_cells(const synth::InjectedAnomaly& anomaly);

struct Match {
    std::size_t event = 0;
    std::size_t truth = 0;
    double iou = 0.0;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t detections = 0;
    std::size_t truths = 0;
    std::vector<Match> matches;
};

/// IoU-matched precision, recall and F1. A truth anomaly is hit by an event
/// with IoU strictly above `iou_threshold`; pairs are taken greedily by
/// descending IoU (ties: earlier truth start) so each side is used once.
/// `top_k` keeps only the highest-scoring events.
Metrics score_events(std::span<const DetectionEvent> events, const synth::GroundTruth& truth,
                     double iou_threshold = 0.5, std::optional<std::size_t> top_k = std::nullopt);

Metrics score(std::span<const detection::AnomalyReport> reports, const synth::GroundTruth& truth,
              double iou_threshold = 0.5, std::optional<std::size_t> top_k = std::nullopt);

/// Share of detection events touching any external-influence cell
/// (affected region members over the influence interval). 0 with no events.
double external_overlap_ratio(std::span<const DetectionEvent> events, const synth::GroundTruth& truth);
double external_overlap_ratio(std::span<const detection::AnomalyReport> reports, const synth::GroundTruth& truth);

/// Ground truth as per-slot reports (one region anomaly per slot of each
/// injected anomaly). Scoring these against the same truth gives F1 = 1.
std::vector<detection::AnomalyReport> truth_as_reports(const synth::GroundTruth& truth);

} // namespace stregion::evaluation
