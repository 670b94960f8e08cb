#include "commands.hpp"

#include "stregion/dataset.hpp"
#include "stregion/errors.hpp"
#include "stregion/evaluation.hpp"
#include "stregion/json_io.hpp"
#include "stregion/pipeline.hpp"
#include "stregion/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

namespace stregion::cli {

namespace {

/// Detector flags. Each is optional so that only flags given on the command
/// line override the config file.
struct DetectorFlags {
    std::optional<std::string> config_path;
    std::optional<std::string> profile;
    std::optional<std::string> approach;
    std::optional<std::size_t> c;
    std::optional<std::size_t> n_v;
    std::optional<std::string> d_c;
    std::optional<double> lambda;
    std::optional<std::size_t> tau;
    std::optional<double> theta;
    std::optional<double> jmath;
    std::optional<std::string> bandwidth;
    std::optional<double> alpha_level;
    std::optional<std::size_t> t2_window;
    bool split_regions = false;
    bool jitter = false;
    std::optional<std::size_t> jobs;
};

void add_detector_flags(CLI::App& cmd, DetectorFlags& f, bool with_temporal) {
    cmd.add_option("--config", f.config_path, "JSON detector config; command-line flags take precedence");
    cmd.add_option("--profile", f.profile,
                   "Parameter preset: 'reference' (c=4, n_v=2, lambda=theta=jmath=1, tau=10) or "
                   "'case-study-credit' (c=6, n_v=3, lambda=tau=1, theta=jmath=0)")
        ->check(CLI::IsMember({"reference", "case-study-credit"}));
    cmd.add_option("-c,--location-clusters", f.c, "n_t(l): number of location clusters c (default 4)");
    cmd.add_option("--n-v,--reading-clusters", f.n_v, "n_t(v): number of reading clusters (default 2)");
    cmd.add_option("--d-c", f.d_c, "d_c: CFDP cutoff distance for readings, or 'auto' (2% quantile rule)");
    cmd.add_option("--lambda", f.lambda, "lambda: weight of the local divergence, in [0,1] (default 1)");
    cmd.add_option("--bandwidth", f.bandwidth, "sigma: KDE bandwidth, 'scott' (default) or a positive number");
    cmd.add_option("--split-regions", f.split_regions, "Split each region into its triangulation-connected pieces");
    cmd.add_flag("--jitter", f.jitter, "Perturb exactly coincident locations instead of failing");
    cmd.add_option("--jobs", f.jobs, "Worker threads for the per-slot stages (default 1)");
    if (with_temporal) {
        cmd.add_option("--approach", f.approach, "Detector: weighted | wavy | baseline-t2 (default weighted)")
            ->check(CLI::IsMember({"weighted", "wavy", "baseline-t2", "t2"}));
        cmd.add_option("--tau", f.tau, "tau: divergence history window in slots (default 10)");
        cmd.add_option("--theta", f.theta, "theta (vartheta): decay of lagged differences, in (0,1] (default 1)");
        cmd.add_option("--jmath", f.jmath,
                       "jmath: momentum weight on past mean/std, in [0,1] (default 0.9; 1 freezes the "
                       "statistics at their first value)");
        cmd.add_option("--alpha-level", f.alpha_level, "Significance level of the T^2 baseline (default 0.05)");
        cmd.add_option("--t2-window", f.t2_window, "Trailing window of the T^2 baseline in slots (default 10)");
    }
}

DetectorConfig resolve_detector_config(const DetectorFlags& f) {
    DetectorConfig cfg;
    if (f.config_path) cfg = io::parse_detector_config(io::read_file(*f.config_path), cfg);
    if (f.profile) {
        if (*f.profile == "reference") {
            cfg.location_clusters = 4;
            cfg.reading_clusters = 2;
            cfg.lambda = 1.0;
            cfg.theta = 1.0;
            cfg.jmath = 1.0;
            cfg.tau = 10;
        } else {
            cfg.location_clusters = 6;
            cfg.reading_clusters = 3;
            cfg.lambda = 1.0;
            cfg.tau = 1;
            cfg.theta = 0.0;
            cfg.jmath = 0.0;
        }
    }
    if (f.approach) cfg.approach = parse_approach(*f.approach);
    if (f.c) cfg.location_clusters = *f.c;
    if (f.n_v) cfg.reading_clusters = *f.n_v;
    if (f.d_c) {
        if (*f.d_c == "auto") cfg.d_c.reset();
        else {
            try {
                cfg.d_c = std::stod(*f.d_c);
            } catch (const std::exception&) {
                throw ConfigInvalid("--d-c expects 'auto' or a number");
            }
        }
    }
    if (f.lambda) cfg.lambda = *f.lambda;
    if (f.tau) cfg.tau = *f.tau;
    if (f.theta) cfg.theta = *f.theta;
    if (f.jmath) cfg.jmath = *f.jmath;
    if (f.bandwidth) {
        if (*f.bandwidth == "scott") cfg.bandwidth.fixed.reset();
        else {
            try {
                cfg.bandwidth.fixed = std::stod(*f.bandwidth);
            } catch (const std::exception&) {
                throw ConfigInvalid("--bandwidth expects 'scott' or a number");
            }
        }
    }
    if (f.alpha_level) cfg.alpha_level = *f.alpha_level;
    if (f.t2_window) cfg.t2_window = *f.t2_window;
    if (f.split_regions) cfg.split_regions = true;
    if (f.jitter) cfg.delaunay.jitter_duplicates = true;
    if (f.jobs) cfg.jobs = *f.jobs;
    cfg.validate();
    return cfg;
}

Dataset load_dataset(const std::string& path, std::int64_t bin) {
    auto dataset = parse_observations(io::read_file(path));
    if (bin > 1) dataset = rebin(dataset, bin);
    return dataset;
}

void emit(const std::optional<std::string>& path, std::string_view content, std::ostream& out) {
    if (path) io::write_file(*path, content);
    else out << content;
}

struct SynthFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_slots;
    std::optional<double> noise_std;
    std::optional<std::size_t> n_anomalies;
    std::optional<std::size_t> n_external;
    std::string out_dir = ".";
    std::optional<std::string> dataset_path;
    std::optional<std::string> truth_path;
    bool dump_config = false;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
    synth::SynthConfig cfg = synth::default_config();
    if (f.config_path) cfg = io::parse_synth_config(io::read_file(*f.config_path), cfg);
    if (f.seed) cfg.seed = *f.seed;
    if (f.n_slots) cfg.n_slots = *f.n_slots;
    if (f.noise_std) {
        cfg.noise_std = *f.noise_std;
        if (*f.noise_std == 0.0) cfg.base_noise_std = 0.0;
    }
    if (f.n_anomalies) cfg.n_anomalies = *f.n_anomalies;
    if (f.n_external) cfg.n_external = *f.n_external;
    cfg.validate();
    if (f.dump_config) {
        out << io::synth_config_to_json(cfg) << '\n';
        return kOk;
    }

    const auto result = synth::generate(cfg);
    const io::NameTable names(result.dataset);
    std::filesystem::create_directories(f.out_dir);
    const auto dataset_path = f.dataset_path.value_or((std::filesystem::path(f.out_dir) / "dataset.csv").string());
    const auto truth_path = f.truth_path.value_or((std::filesystem::path(f.out_dir) / "truth.json").string());
    io::write_file(dataset_path, to_csv(result.dataset));
    io::write_file(truth_path, io::truth_to_json(result.truth, names) + "\n");
    out << "wrote " << result.dataset.locations().size() << " locations x " << result.dataset.slices().size()
        << " slots to " << dataset_path << "; " << result.truth.anomalies.size() << " anomalies and "
        << result.truth.externals.size() << " external influences to " << truth_path << '\n';
    return kOk;
}

int cmd_detect(const std::string& dataset_path, std::int64_t bin, const DetectorFlags& flags,
               const std::optional<std::string>& out_path, std::ostream& out) {
    const auto cfg = resolve_detector_config(flags);
    const auto dataset = load_dataset(dataset_path, bin);
    const auto reports = detect(dataset, cfg);
    const io::NameTable names(dataset);
    std::string text;
    for (const auto& r : reports) {
        text += io::report_to_json(r, names);
        text += '\n';
    }
    text += io::summary_to_json(reports, cfg.approach);
    text += '\n';
    emit(out_path, text, out);
    return kOk;
}

int cmd_partition(const std::string& dataset_path, std::int64_t bin, SlotIndex t, bool with_divergence,
                  const std::optional<std::string>& graph_path, const DetectorFlags& flags,
                  const std::optional<std::string>& out_path, std::ostream& out) {
    const auto cfg = resolve_detector_config(flags);
    const auto dataset = load_dataset(dataset_path, bin);
    const auto& slice = dataset.slice(t);
    SlotAnalyzer analyzer(dataset, cfg);
    SlotAnalysis analysis;
    try {
        analysis = analyzer.analyze(slice);
    } catch (const Error& e) {
        throw SlotError(t, e.what());
    }
    const io::NameTable names(dataset);
    if (graph_path) io::write_file(*graph_path, io::graph_to_json(*analysis.graph, names) + "\n");
    emit(out_path,
         io::regions_to_json(analysis.regions, names, with_divergence ? &analysis.divergence : nullptr) + "\n", out);
    return kOk;
}

int cmd_eval(const std::string& reports_path, const std::string& truth_path, double iou_threshold,
             std::optional<std::size_t> top_k, const std::optional<std::string>& out_path, std::ostream& out) {
    if (!(iou_threshold >= 0.0 && iou_threshold < 1.0)) throw ConfigInvalid("--iou must be in [0, 1)");
    io::NameTable names;
    const auto truth = io::parse_truth_json(io::read_file(truth_path), names);
    const auto known = names.size();
    const auto reports = io::parse_reports_jsonl(io::read_file(reports_path), names);

    // A truth file with a region table lists every location of its dataset.
    if (known > 0) {
        for (const auto& r : reports)
            for (const auto& a : r.anomalies)
                for (auto id : a.members)
                    if (id >= known)
                        throw Error("reports mention location '" + names.name(id) +
                                    "' which the ground truth does not know; mismatched datasets?");
    }

    const auto events = evaluation::build_events(reports);
    const auto metrics = evaluation::score_events(events, truth, iou_threshold, top_k);
    const auto ratio = evaluation::external_overlap_ratio(events, truth);
    emit(out_path, io::metrics_to_json(metrics, ratio) + "\n", out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regional anomaly detection for spatio-temporal point data"};
    app.name("stregion");
    app.require_subcommand(1);

    SynthFlags synth_flags;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic benchmark (dataset.csv + truth.json)");
    synth->add_option("--config", synth_flags.config_path, "JSON generator config; missing keys keep the defaults");
    synth->add_option("--seed", synth_flags.seed, "Seed for every random draw except the location layout");
    synth->add_option("--n-slots", synth_flags.n_slots, "Number of time slots (default 6402)");
    synth->add_option("--noise-std", synth_flags.noise_std,
                      "Std of the per-reading Gaussian noise (default 0.5); 0 also disables the base-curve noise g");
    synth->add_option("--n-anomalies", synth_flags.n_anomalies, "Injected anomalies (default 200)");
    synth->add_option("--n-external", synth_flags.n_external, "External influences (default 82)");
    synth->add_option("--out-dir", synth_flags.out_dir, "Directory for dataset.csv and truth.json");
    synth->add_option("--dataset", synth_flags.dataset_path, "Explicit dataset CSV path");
    synth->add_option("--truth", synth_flags.truth_path, "Explicit ground-truth JSON path");
    synth->add_flag("--dump-config", synth_flags.dump_config, "Print the resolved config as JSON and exit");

    std::string dataset_path;
    std::int64_t bin = 1;
    std::optional<std::string> out_path;
    DetectorFlags detect_flags;
    auto* det = app.add_subcommand("detect", "Run a detector and write one JSON report per slot");
    det->add_option("--dataset", dataset_path, "Observation CSV (location_id,lon,lat,t,value)")->required();
    det->add_option("--bin", bin, "Merge every N consecutive slots (readings averaged)")->check(CLI::PositiveNumber);
    det->add_option("--out", out_path, "Output JSON-lines path (default stdout)");
    add_detector_flags(*det, detect_flags, true);

    SlotIndex part_t = 0;
    bool with_divergence = false;
    std::optional<std::string> graph_path;
    DetectorFlags part_flags;
    auto* part = app.add_subcommand("partition", "Print the region partition of one slot as JSON");
    part->add_option("--dataset", dataset_path, "Observation CSV")->required();
    part->add_option("--t", part_t, "Time slot to partition")->required();
    part->add_option("--bin", bin, "Merge every N consecutive slots")->check(CLI::PositiveNumber);
    part->add_flag("--with-divergence", with_divergence, "Add local/global/blended divergence per region");
    part->add_option("--graph-json", graph_path, "Also write the slot's Delaunay graph here");
    part->add_option("--out", out_path, "Output path (default stdout)");
    add_detector_flags(*part, part_flags, false);

    std::string reports_path, truth_path;
    double iou_threshold = 0.5;
    std::optional<std::size_t> top_k;
    auto* ev = app.add_subcommand("eval", "Score detections against ground truth (IoU-matched F1)");
    ev->add_option("--reports", reports_path, "anomalies.jsonl produced by detect")->required();
    ev->add_option("--truth", truth_path, "truth.json produced by synth")->required();
    ev->add_option("--iou", iou_threshold, "A hit needs IoU strictly above this (default 0.5)");
    ev->add_option("--top-k", top_k, "Score only the k highest-scoring detection events");
    ev->add_option("--out", out_path, "Output path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_flags, out);
        if (det->parsed()) return cmd_detect(dataset_path, bin, detect_flags, out_path, out);
        if (part->parsed())
            return cmd_partition(dataset_path, bin, part_t, with_divergence, graph_path, part_flags, out_path, out);
        if (ev->parsed()) return cmd_eval(reports_path, truth_path, iou_threshold, top_k, out_path, out);
    } catch (const ConfigInvalid& e) {
        err << "stregion: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "stregion: " << e.what() << '\n';
        return kPipelineError;
    }
    return kConfigError;
}

} // namespace stregion::cli
