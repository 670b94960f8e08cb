#include "stregion/json_io.hpp"

#include "stregion/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace stregion::io {

using nlohmann::json;

NameTable::NameTable(const Dataset& dataset) {
    for (const auto& loc : dataset.locations()) intern(loc.id);
}

LocationIndex NameTable::intern(const std::string& name) {
    auto [it, fresh] = index_.try_emplace(name, static_cast<LocationIndex>(names_.size()));
    if (fresh) names_.push_back(name);
    return it->second;
}

namespace {

json names_of(const std::vector<LocationIndex>& ids, const NameTable& names) {
    json out = json::array();
    for (auto id : ids) out.push_back(names.name(id));
    return out;
}

std::vector<LocationIndex> interned(const json& arr, NameTable& names) {
    std::vector<LocationIndex> out;
    for (const auto& v : arr) out.push_back(names.intern(v.get<std::string>()));
    std::sort(out.begin(), out.end());
    return out;
}

std::string_view kind_name(detection::AnomalyKind kind) {
    return kind == detection::AnomalyKind::Region ? "region" : "aggregated-points";
}

json parse_or_throw(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("cannot parse ") + what + ": " + e.what());
    }
}

json parse_config_or_throw(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("cannot parse ") + what + ": " + e.what());
    }
}

synth::Range range_from(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2) throw ConfigInvalid(std::string(key) + " must be a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string report_to_json(const detection::AnomalyReport& report, const NameTable& names) {
    json anomalies = json::array();
    for (const auto& a : report.anomalies) {
        anomalies.push_back(
            {{"members", names_of(a.members, names)}, {"score", a.score}, {"kind", kind_name(a.kind)}});
    }
    return json{{"t", report.t}, {"anomalies", std::move(anomalies)}}.dump();
}

std::string summary_to_json(std::span<const detection::AnomalyReport> reports, Approach approach) {
    std::size_t anomalies = 0;
    std::size_t flagged_slots = 0;
    for (const auto& r : reports) {
        anomalies += r.anomalies.size();
        if (!r.anomalies.empty()) ++flagged_slots;
    }
    return json{{"summary",
                 {{"approach", to_string(approach)},
                  {"slots", reports.size()},
                  {"slots_with_anomalies", flagged_slots},
                  {"anomalies", anomalies}}}}
        .dump();
}

std::vector<detection::AnomalyReport> parse_reports_jsonl(std::string_view text, NameTable& names) {
    std::vector<detection::AnomalyReport> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(line);
            if (j.contains("summary")) continue;
            detection::AnomalyReport report;
            report.t = j.at("t").get<SlotIndex>();
            for (const auto& a : j.at("anomalies")) {
                detection::Anomaly anomaly;
                anomaly.members = interned(a.at("members"), names);
                anomaly.score = a.value("score", 0.0);
                anomaly.kind = a.value("kind", std::string("region")) == "region"
                                   ? detection::AnomalyKind::Region
                                   : detection::AnomalyKind::AggregatedPoints;
                report.anomalies.push_back(std::move(anomaly));
            }
            out.push_back(std::move(report));
        } catch (const json::exception& e) {
            throw Error("anomaly report line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return out;
}

std::string truth_to_json(const synth::GroundTruth& truth, const NameTable& names) {
    json anomalies = json::array();
    for (const auto& a : truth.anomalies) {
        anomalies.push_back({{"members", names_of(a.members, names)},
                             {"region", truth.region_names.at(a.region)},
                             {"t_start", a.t_start},
                             {"t_end", a.t_end},
                             {"nu", a.nu},
                             {"sign", a.sign}});
    }
    json externals = json::array();
    for (const auto& e : truth.externals) {
        json regions = json::array();
        for (auto r : e.regions) regions.push_back(truth.region_names.at(r));
        externals.push_back({{"regions", regions}, {"t_start", e.t_start}, {"t_end", e.t_end}, {"delta", e.delta}});
    }
    json regions = json::object();
    for (std::size_t r = 0; r < truth.region_names.size(); ++r)
        regions[truth.region_names[r]] = names_of(truth.region_members[r], names);
    return json{{"regions", regions}, {"anomalies", anomalies}, {"externals", externals}}.dump(1);
}

synth::GroundTruth parse_truth_json(std::string_view text, NameTable& names) {
    const auto j = parse_or_throw(text, "ground truth");
    synth::GroundTruth truth;
    try {
        std::unordered_map<std::string, std::size_t> region_index;
        if (j.contains("regions")) {
            for (const auto& [name, members] : j.at("regions").items()) {
                region_index.emplace(name, truth.region_names.size());
                truth.region_names.push_back(name);
                truth.region_members.push_back(interned(members, names));
            }
        }
        auto region_of = [&](const std::string& name) {
            auto it = region_index.find(name);
            if (it != region_index.end()) return it->second;
            region_index.emplace(name, truth.region_names.size());
            truth.region_names.push_back(name);
            truth.region_members.emplace_back();
            return truth.region_names.size() - 1;
        };
        for (const auto& a : j.at("anomalies")) {
            synth::InjectedAnomaly anomaly;
            anomaly.members = interned(a.at("members"), names);
            anomaly.t_start = a.at("t_start").get<SlotIndex>();
            anomaly.t_end = a.at("t_end").get<SlotIndex>();
            anomaly.nu = a.value("nu", 0.0);
            anomaly.sign = a.value("sign", 1);
            if (a.contains("region")) anomaly.region = region_of(a.at("region").get<std::string>());
            truth.anomalies.push_back(std::move(anomaly));
        }
        if (j.contains("externals")) {
            for (const auto& e : j.at("externals")) {
                synth::ExternalInfluence ext;
                for (const auto& r : e.at("regions")) ext.regions.push_back(region_of(r.get<std::string>()));
                std::sort(ext.regions.begin(), ext.regions.end());
                ext.t_start = e.at("t_start").get<SlotIndex>();
                ext.t_end = e.at("t_end").get<SlotIndex>();
                ext.delta = e.value("delta", 0.0);
                truth.externals.push_back(std::move(ext));
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed ground truth: ") + e.what());
    }
    return truth;
}

std::string graph_to_json(const geometry::TriangulationGraph& graph, const NameTable& names) {
    json vertices = json::array();
    for (const auto& v : graph.vertices()) vertices.push_back({{"id", names.name(v.id)}, {"x", v.x}, {"y", v.y}});
    json edges = json::array();
    for (const auto& e : graph.edges())
        edges.push_back({names.name(graph.vertices()[e.u].id), names.name(graph.vertices()[e.v].id)});
    return json{{"vertices", vertices}, {"edges", edges}}.dump();
}

std::string regions_to_json(const partition::RegionSet& regions, const NameTable& names,
                            const divergence::SlotDivergence* divergences) {
    json out_regions = json::array();
    for (std::size_t i = 0; i < regions.regions.size(); ++i) {
        const auto& r = regions.regions[i];
        json item{{"id", r.id},
                  {"loc_cluster", r.loc_cluster},
                  {"read_cluster", r.read_cluster},
                  {"members", names_of(r.members, names)}};
        if (divergences) {
            const auto& d = divergences->regions.at(i);
            item["local"] = d.local;
            item["global"] = d.global;
            item["divergence"] = d.blended;
        }
        out_regions.push_back(std::move(item));
    }
    json out{{"t", regions.t}, {"regions", out_regions}};
    if (divergences && !divergences->warnings.empty()) out["warnings"] = divergences->warnings;
    return out.dump();
}

std::string metrics_to_json(const evaluation::Metrics& metrics, double external_overlap_ratio) {
    return json{{"precision", metrics.precision},
                {"recall", metrics.recall},
                {"f1", metrics.f1},
                {"external_overlap_ratio", external_overlap_ratio},
                {"detections", metrics.detections},
                {"truths", metrics.truths},
                {"hits", metrics.matches.size()}}
        .dump(1);
}

synth::SynthConfig parse_synth_config(std::string_view text, synth::SynthConfig cfg) {
    const auto j = parse_config_or_throw(text, "synth config");
    if (!j.is_object()) throw ConfigInvalid("synth config must be a JSON object");
    try {
        if (j.contains("regions")) {
            cfg.regions.clear();
            for (const auto& r : j.at("regions")) {
                synth::RegionSpec spec;
                spec.name = r.at("name").get<std::string>();
                for (const auto& p : r.at("polygon")) spec.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
                spec.points = r.at("points").get<std::size_t>();
                spec.amplitude = r.at("amplitude").get<double>();
                spec.bias = r.at("bias").get<double>();
                cfg.regions.push_back(std::move(spec));
            }
        }
        if (j.contains("n_slots")) cfg.n_slots = j.at("n_slots").get<std::size_t>();
        if (j.contains("sample_step")) cfg.sample_step = j.at("sample_step").get<double>();
        if (j.contains("noise_std")) cfg.noise_std = j.at("noise_std").get<double>();
        if (j.contains("base_noise_std")) cfg.base_noise_std = j.at("base_noise_std").get<double>();
        if (j.contains("n_external")) cfg.n_external = j.at("n_external").get<std::size_t>();
        if (j.contains("external_delta")) cfg.external_delta = range_from(j.at("external_delta"), "external_delta");
        if (j.contains("external_length")) cfg.external_length = range_from(j.at("external_length"), "external_length");
        if (j.contains("n_anomalies")) cfg.n_anomalies = j.at("n_anomalies").get<std::size_t>();
        if (j.contains("anomaly_nu")) cfg.anomaly_nu = range_from(j.at("anomaly_nu"), "anomaly_nu");
        if (j.contains("anomaly_length")) cfg.anomaly_length = range_from(j.at("anomaly_length"), "anomaly_length");
        if (j.contains("anomaly_size")) cfg.anomaly_size = range_from(j.at("anomaly_size"), "anomaly_size");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("layout_seed")) cfg.layout_seed = j.at("layout_seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(e.what());
    }
    cfg.validate();
    return cfg;
}

std::string synth_config_to_json(const synth::SynthConfig& cfg) {
    json regions = json::array();
    for (const auto& r : cfg.regions) {
        json poly = json::array();
        for (const auto& p : r.polygon) poly.push_back({p.x, p.y});
        regions.push_back(
            {{"name", r.name}, {"polygon", poly}, {"points", r.points}, {"amplitude", r.amplitude}, {"bias", r.bias}});
    }
    auto pair = [](synth::Range r) { return json::array({r.lo, r.hi}); };
    return json{{"regions", regions},
                {"n_slots", cfg.n_slots},
                {"sample_step", cfg.sample_step},
                {"noise_std", cfg.noise_std},
                {"base_noise_std", cfg.base_noise_std},
                {"n_external", cfg.n_external},
                {"external_delta", pair(cfg.external_delta)},
                {"external_length", pair(cfg.external_length)},
                {"n_anomalies", cfg.n_anomalies},
                {"anomaly_nu", pair(cfg.anomaly_nu)},
                {"anomaly_length", pair(cfg.anomaly_length)},
                {"anomaly_size", pair(cfg.anomaly_size)},
                {"seed", cfg.seed},
                {"layout_seed", cfg.layout_seed}}
        .dump(2);
}

DetectorConfig parse_detector_config(std::string_view text, DetectorConfig cfg) {
    const auto j = parse_config_or_throw(text, "detector config");
    if (!j.is_object()) throw ConfigInvalid("detector config must be a JSON object");
    try {
        if (j.contains("approach")) cfg.approach = parse_approach(j.at("approach").get<std::string>());
        if (j.contains("c")) cfg.location_clusters = j.at("c").get<std::size_t>();
        if (j.contains("n_v")) cfg.reading_clusters = j.at("n_v").get<std::size_t>();
        if (j.contains("d_c")) {
            const auto& v = j.at("d_c");
            if (v.is_string() && v.get<std::string>() == "auto") cfg.d_c.reset();
            else cfg.d_c = v.get<double>();
        }
        if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
        if (j.contains("tau")) cfg.tau = j.at("tau").get<std::size_t>();
        if (j.contains("theta")) cfg.theta = j.at("theta").get<double>();
        if (j.contains("jmath")) cfg.jmath = j.at("jmath").get<double>();
        if (j.contains("bandwidth")) {
            const auto& v = j.at("bandwidth");
            if (v.is_string() && v.get<std::string>() == "scott") cfg.bandwidth.fixed.reset();
            else cfg.bandwidth.fixed = v.get<double>();
        }
        if (j.contains("alpha_level")) cfg.alpha_level = j.at("alpha_level").get<double>();
        if (j.contains("t2_window")) cfg.t2_window = j.at("t2_window").get<std::size_t>();
        if (j.contains("split_regions")) cfg.split_regions = j.at("split_regions").get<bool>();
        if (j.contains("jitter")) cfg.delaunay.jitter_duplicates = j.at("jitter").get<bool>();
        if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(e.what());
    }
    cfg.validate();
    return cfg;
}

std::string detector_config_to_json(const DetectorConfig& cfg) {
    json j{{"approach", to_string(cfg.approach)},
           {"c", cfg.location_clusters},
           {"n_v", cfg.reading_clusters},
           {"lambda", cfg.lambda},
           {"tau", cfg.tau},
           {"theta", cfg.theta},
           {"jmath", cfg.jmath},
           {"alpha_level", cfg.alpha_level},
           {"t2_window", cfg.t2_window},
           {"split_regions", cfg.split_regions},
           {"jitter", cfg.delaunay.jitter_duplicates}};
    if (cfg.d_c) j["d_c"] = *cfg.d_c;
    else j["d_c"] = "auto";
    if (cfg.bandwidth.fixed) j["bandwidth"] = *cfg.bandwidth.fixed;
    else j["bandwidth"] = "scott";
    return j.dump(2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace stregion::io
