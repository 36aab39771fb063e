#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    using namespace hmsort::cli;

    CLI::App app{"hmsort: multi-object tracker, evaluator and scenario generator"};
    app.require_subcommand(1);

    TrackArgs track;
    std::string track_emb, track_cfg;
    auto* t = app.add_subcommand("track", "track one detection sequence");
    t->add_option("--dets", track.dets, "MOT detection file")->required();
    t->add_option("--embeddings", track_emb, "embedding sidecar file");
    t->add_option("--config", track_cfg, "tracker settings file");
    t->add_option("--out", track.out, "result file to write")->required();

    EvalArgs eval;
    std::string eval_report;
    auto* e = app.add_subcommand("eval", "score results against ground truth");
    e->add_option("--gt", eval.gt, "ground-truth file")->required();
    e->add_option("--results", eval.results, "result file")->required();
    e->add_option("--report", eval_report, "key=value report to write");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate a synthetic scenario");
    s->add_option("--spec", synth.spec, "scenario spec file")->required();
    s->add_option("--out", synth.out, "output directory")->required();

    AblateArgs ablate;
    std::string ablate_cfg;
    auto* a = app.add_subcommand("ablate", "run the fusion/retention ablation grid");
    a->add_option("--scenarios", ablate.scenarios, "directory of .scenario files")->required();
    a->add_option("--out", ablate.out, "output directory")->required();
    a->add_option("--threads", ablate.threads, "worker threads (0 = all cores)");
    a->add_option("--config", ablate_cfg, "base tracker settings file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Error& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    }

    auto opt = [](const std::string& v) {
        return v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v);
    };
    return run_guarded(
        [&] {
            if (t->parsed()) {
                track.embeddings = opt(track_emb);
                track.config = opt(track_cfg);
                cmd_track(track, std::cout);
            } else if (e->parsed()) {
                eval.report = opt(eval_report);
                cmd_eval(eval, std::cout);
            } else if (s->parsed()) {
                cmd_synth(synth, std::cout);
            } else {
                ablate.config = opt(ablate_cfg);
                cmd_ablate(ablate, std::cout);
            }
        },
        std::cerr);
}
