#include "hmsort/ablation.hpp"

#include "hmsort/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace hmsort::ablation {

std::string AblationArm::name() const {
    return fmt::format("{}_{}", fusion_mode == FusionMode::HarmonicMean ? "hm" : "min",
                       keep_all_tracks ? "keep" : "buffer");
}

TrackingConfig arm_config(const TrackingConfig& base, const AblationArm& arm) {
    TrackingConfig cfg = base;
    cfg.fusion_mode = arm.fusion_mode;
    cfg.keep_all_tracks = arm.keep_all_tracks;
    return cfg;
}

SequenceRun run_sequence(const io::SequenceBundle& bundle, const TrackingConfig& cfg,
                         bool use_embeddings) {
    std::vector<FrameInput> inputs = bundle.frame_inputs();
    if (!use_embeddings) {
        for (FrameInput& in : inputs) {
            for (Detection& d : in.detections) d.embedding.reset();
        }
    }
    SequenceRun run;
    run.outputs.reserve(inputs.size());
    Tracker tracker(cfg);
    const auto start = std::chrono::steady_clock::now();
    for (const FrameInput& in : inputs) run.outputs.push_back(tracker.step(in));
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.tracklets = tracker.tracklets().size();
    return run;
}

namespace {

struct Slot {
    metrics::SequenceMetrics metrics;
    std::size_t spawned = 0;
    std::string results;
};

}  // namespace

std::vector<ArmResult> run_ablation(const std::vector<synth::Scenario>& scenarios,
                                    const TrackingConfig& base, std::size_t threads) {
    base.validate();
    const std::size_t jobs = kArms.size() * scenarios.size();
    std::vector<Slot> slots(jobs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (std::size_t job = next++; job < jobs; job = next++) {
            try {
                const AblationArm& arm = kArms[job / scenarios.size()];
                const synth::Scenario& sc = scenarios[job % scenarios.size()];
                SequenceRun run = run_sequence(sc.detections, arm_config(base, arm));
                Slot& slot = slots[job];
                slot.metrics = metrics::evaluate_sequence(sc.ground_truth, run.outputs, sc.name);
                slot.spawned = run.tracklets;
                slot.results = io::format_results(run.outputs);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs;
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(jobs, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<ArmResult> out;
    for (std::size_t a = 0; a < kArms.size(); ++a) {
        ArmResult r{kArms[a], {}, 0, {}};
        std::vector<metrics::SequenceMetrics> seqs;
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            Slot& slot = slots[a * scenarios.size() + s];
            seqs.push_back(slot.metrics);
            r.spawned += slot.spawned;
            r.results.push_back(std::move(slot.results));
        }
        r.report = metrics::aggregate(std::move(seqs));
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_table(const std::vector<ArmResult>& arms) {
    std::string out = fmt::format("{:<12} {:>9} {:>9} {:>7} {:>7} {:>8}\n", "arm", "MOTA", "IDF1",
                                  "IDSW", "Frag", "spawned");
    for (const ArmResult& r : arms) {
        out += fmt::format("{:<12} {:>9.4f} {:>9.4f} {:>7} {:>7} {:>8}\n", r.arm.name(), r.report.mota,
                           r.report.idf1, r.report.idsw, r.report.frag, r.spawned);
    }
    return out;
}

std::string format_table_kv(const std::vector<ArmResult>& arms) {
    std::string out;
    for (const ArmResult& r : arms) {
        const std::string n = r.arm.name();
        out += fmt::format("{0}.mota={1:.6f}\n{0}.idf1={2:.6f}\n{0}.idsw={3}\n{0}.frag={4}\n{0}.spawned={5}\n",
                           n, r.report.mota, r.report.idf1, r.report.idsw, r.report.frag, r.spawned);
    }
    return out;
}

}  // namespace hmsort::ablation
