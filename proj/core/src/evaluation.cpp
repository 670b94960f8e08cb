#include "stregion/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace stregion::evaluation {

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

bool share_member(const std::vector<LocationIndex>& a, const std::vector<LocationIndex>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i;
        else ++j;
    }
    return false;
}

struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept {
        return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(c.first) << 40) ^
                                          static_cast<std::uint64_t>(c.second));
    }
};

} // namespace

std::vector<Cell> normalize_cells(std::vector<Cell> cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

double iou(std::span<const Cell> detected, std::span<const Cell> truth) {
    std::size_t inter = 0;
    auto i = detected.begin();
    auto j = truth.begin();
    while (i != detected.end() && j != truth.end()) {
        if (*i == *j) {
            ++inter;
            ++i;
            ++j;
        } else if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = detected.size() + truth.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<DetectionEvent> build_events(std::span<const detection::AnomalyReport> reports) {
    struct Item {
        std::size_t report;
        std::size_t anomaly;
    };
    std::vector<Item> items;
    std::vector<std::size_t> first_item(reports.size() + 1, 0);
    for (std::size_t r = 0; r < reports.size(); ++r) {
        first_item[r] = items.size();
        for (std::size_t a = 0; a < reports[r].anomalies.size(); ++a) items.push_back({r, a});
    }
    first_item[reports.size()] = items.size();

    DisjointSets sets(items.size());
    for (std::size_t r = 1; r < reports.size(); ++r) {
        if (reports[r].t != reports[r - 1].t + 1) continue;
        for (std::size_t i = first_item[r]; i < first_item[r + 1]; ++i) {
            const auto& cur = reports[r].anomalies[items[i].anomaly].members;
            for (std::size_t j = first_item[r - 1]; j < first_item[r]; ++j) {
                if (share_member(cur, reports[r - 1].anomalies[items[j].anomaly].members)) sets.unite(i, j);
            }
        }
    }

    std::map<std::size_t, DetectionEvent> grouped;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& report = reports[items[i].report];
        const auto& anomaly = report.anomalies[items[i].anomaly];
        auto [it, fresh] = grouped.try_emplace(sets.find(i));
        auto& ev = it->second;
        if (fresh) {
            ev.score = anomaly.score;
            ev.t_start = ev.t_end = report.t;
        }
        ev.score = std::max(ev.score, anomaly.score);
        ev.t_start = std::min(ev.t_start, report.t);
        ev.t_end = std::max(ev.t_end, report.t);
        for (auto id : anomaly.members) ev.cells.emplace_back(id, report.t);
    }

    std::vector<DetectionEvent> out;
    out.reserve(grouped.size());
    for (auto& [root, ev] : grouped) {
        ev.cells = normalize_cells(std::move(ev.cells));
        out.push_back(std::move(ev));
    }
    return out;
}

std::vector<Cell> truth_cells(const synth::InjectedAnomaly& anomaly) {
    std::vector<Cell> cells;
    for (SlotIndex t = anomaly.t_start; t <= anomaly.t_end; ++t)
        for (auto id : anomaly.members) cells.emplace_back(id, t);
    return normalize_cells(std::move(cells));
}

Metrics score_events(std::span<const DetectionEvent> all_events, const synth::GroundTruth& truth,
                     double iou_threshold, std::optional<std::size_t> top_k) {
    std::vector<std::size_t> kept(all_events.size());
    std::iota(kept.begin(), kept.end(), 0u);
    if (top_k && *top_k < kept.size()) {
        std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
            if (all_events[a].score != all_events[b].score) return all_events[a].score > all_events[b].score;
            return all_events[a].t_start < all_events[b].t_start;
        });
        kept.resize(*top_k);
        std::sort(kept.begin(), kept.end());
    }

    std::unordered_map<Cell, std::size_t, CellHash> owner;
    for (std::size_t k = 0; k < kept.size(); ++k)
        for (const auto& cell : all_events[kept[k]].cells) owner.emplace(cell, k);

    std::vector<Match> candidates;
    for (std::size_t g = 0; g < truth.anomalies.size(); ++g) {
        const auto cells = truth_cells(truth.anomalies[g]);
        std::map<std::size_t, std::size_t> inter;
        for (const auto& cell : cells) {
            auto it = owner.find(cell);
            if (it != owner.end()) ++inter[it->second];
        }
        for (const auto& [k, count] : inter) {
            const auto& ev = all_events[kept[k]];
            const double value = static_cast<double>(count) /
                                 static_cast<double>(ev.cells.size() + cells.size() - count);
            if (value > iou_threshold) candidates.push_back({kept[k], g, value});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Match& a, const Match& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        const auto sa = truth.anomalies[a.truth].t_start, sb = truth.anomalies[b.truth].t_start;
        if (sa != sb) return sa < sb;
        if (a.truth != b.truth) return a.truth < b.truth;
        return a.event < b.event;
    });

    Metrics m;
    m.detections = kept.size();
    m.truths = truth.anomalies.size();
    std::vector<char> event_used(all_events.size(), 0), truth_used(truth.anomalies.size(), 0);
    for (const auto& c : candidates) {
        if (event_used[c.event] || truth_used[c.truth]) continue;
        event_used[c.event] = truth_used[c.truth] = 1;
        m.matches.push_back(c);
    }
    const double hits = static_cast<double>(m.matches.size());
    m.precision = m.detections ? hits / static_cast<double>(m.detections) : 0.0;
    m.recall = m.truths ? hits / static_cast<double>(m.truths) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

Metrics score(std::span<const detection::AnomalyReport> reports, const synth::GroundTruth& truth,
              double iou_threshold, std::optional<std::size_t> top_k) {
    const auto events = build_events(reports);
    return score_events(events, truth, iou_threshold, top_k);
}

double external_overlap_ratio(std::span<const DetectionEvent> events, const synth::GroundTruth& truth) {
    if (events.empty()) return 0.0;
    std::unordered_map<LocationIndex, std::size_t> region_of;
    for (std::size_t r = 0; r < truth.region_members.size(); ++r)
        for (auto id : truth.region_members[r]) region_of.emplace(id, r);

    std::size_t overlapping = 0;
    for (const auto& ev : events) {
        bool hit = false;
        for (const auto& ext : truth.externals) {
            if (ext.t_end < ev.t_start || ext.t_start > ev.t_end) continue;
            for (const auto& [id, t] : ev.cells) {
                if (t < ext.t_start || t > ext.t_end) continue;
                auto it = region_of.find(id);
                if (it != region_of.end() &&
                    std::binary_search(ext.regions.begin(), ext.regions.end(), it->second)) {
                    hit = true;
                    break;
                }
            }
            if (hit) break;
        }
        if (hit) ++overlapping;
    }
    return static_cast<double>(overlapping) / static_cast<double>(events.size());
}

double external_overlap_ratio(std::span<const detection::AnomalyReport> reports, const synth::GroundTruth& truth) {
    const auto events = build_events(reports);
    return external_overlap_ratio(events, truth);
}

std::vector<detection::AnomalyReport> truth_as_reports(const synth::GroundTruth& truth) {
    std::map<SlotIndex, detection::AnomalyReport> by_slot;
    for (const auto& a : truth.anomalies) {
        for (SlotIndex t = a.t_start; t <= a.t_end; ++t) {
            auto& report = by_slot[t];
            report.t = t;
            report.anomalies.push_back({a.members, a.nu, detection::AnomalyKind::Region});
        }
    }
    std::vector<detection::AnomalyReport> out;
    for (auto& [t, report] : by_slot) out.push_back(std::move(report));
    return out;
}

} // namespace stregion::evaluation
