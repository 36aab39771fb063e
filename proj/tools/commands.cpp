#include "commands.hpp"

#include "hmsort/ablation.hpp"
#include "hmsort/io.hpp"
#include "hmsort/metrics.hpp"
#include "hmsort/synth.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>

namespace hmsort::cli {

namespace {

TrackingConfig load_config(const std::optional<std::filesystem::path>& path) {
    return path ? io::read_config(*path) : TrackingConfig{};
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

}  // namespace

void cmd_track(const TrackArgs& args, std::ostream& out) {
    const TrackingConfig cfg = load_config(args.config);
    io::SequenceBundle bundle = io::read_detections(args.dets);
    if (args.embeddings) bundle = io::read_embeddings(*args.embeddings, std::move(bundle));
    const ablation::SequenceRun run = ablation::run_sequence(bundle, cfg);
    io::write_results(args.out, run.outputs);
    const double fps = run.seconds > 0.0 ? static_cast<double>(run.outputs.size()) / run.seconds : 0.0;
    fmt::print(out, "frames={} detections={} tracklets={} embeddings={} fps={:.1f}\n",
               run.outputs.size(), bundle.detection_count(), run.tracklets,
               bundle.has_embeddings ? "yes" : "no", fps);
    if (bundle.clamped_scores || bundle.skipped_boxes) {
        fmt::print(out, "clamped_scores={} skipped_boxes={}\n", bundle.clamped_scores, bundle.skipped_boxes);
    }
}

void cmd_eval(const EvalArgs& args, std::ostream& out) {
    const std::vector<FrameOutput> gt = io::read_tracks(args.gt);
    const std::vector<FrameOutput> pred = io::read_tracks(args.results);
    if (!pred.empty()) {
        if (gt.empty()) {
            throw ContractError(fmt::format("frame range mismatch: '{}' has no frames but '{}' does",
                                            args.gt.string(), args.results.string()));
        }
        const int lo = gt.front().frame;
        const int hi = gt.back().frame;
        if (pred.front().frame < lo || pred.back().frame > hi) {
            throw ContractError(fmt::format(
                "frame range mismatch: results span frames {}..{} but ground truth spans {}..{}",
                pred.front().frame, pred.back().frame, lo, hi));
        }
    }
    const metrics::MetricsReport report = metrics::evaluate(gt, pred, args.results.stem().string());
    out << metrics::format_report_text(report);
    if (args.report) io::write_text(*args.report, metrics::format_report_kv(report));
}

void cmd_synth(const SynthArgs& args, std::ostream& out) {
    const synth::ScenarioSpec spec = synth::read_scenario(args.spec);
    const synth::Scenario scenario = synth::generate(spec, args.spec.stem().string());
    for (const auto& path : synth::write_scenario(scenario, args.out)) {
        fmt::print(out, "wrote {}\n", path.string());
    }
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError(fmt::format("'{}' is not a directory", dir.string()));
    }
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".scenario") out.push_back(entry.path());
    }
    if (ec) throw IoError(fmt::format("cannot list '{}': {}", dir.string(), ec.message()));
    std::sort(out.begin(), out.end());
    return out;
}

void cmd_ablate(const AblateArgs& args, std::ostream& out) {
    const TrackingConfig base = load_config(args.config);
    const auto specs = list_scenarios(args.scenarios);
    if (specs.empty()) {
        throw ContractError(fmt::format("no .scenario files in '{}'", args.scenarios.string()));
    }
    std::vector<synth::Scenario> scenarios;
    for (const auto& path : specs) {
        scenarios.push_back(synth::generate(synth::read_scenario(path), path.stem().string()));
    }
    const auto arms = ablation::run_ablation(scenarios, base, args.threads);

    ensure_dir(args.out / "gt");
    for (const auto& arm : arms) ensure_dir(args.out / arm.arm.name());
    for (const auto& sc : scenarios) {
        io::write_results(args.out / "gt" / (sc.name + ".txt"), sc.ground_truth);
    }
    for (const auto& arm : arms) {
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            io::write_text(args.out / arm.arm.name() / (scenarios[s].name + ".txt"), arm.results[s]);
        }
    }
    const std::string table = ablation::format_table(arms);
    io::write_text(args.out / "ablation.txt", table);
    io::write_text(args.out / "ablation_kv.txt", ablation::format_table_kv(arms));
    fmt::print(out, "{} scenarios\n{}", scenarios.size(), table);
}

}  // namespace hmsort::cli
