#pragma once

#include "hmsort/metrics.hpp"
#include "hmsort/model.hpp"
#include "hmsort/synth.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hmsort::ablation {

struct AblationArm {
    FusionMode fusion_mode;
    bool keep_all_tracks;

    /// e.g. "min_buffer", "hm_keep"
    std::string name() const;
    friend bool operator==(const AblationArm&, const AblationArm&) = default;
};

/// The 2x2 grid: (min, buffer), (min, keep), (hm, buffer), (hm, keep).
inline constexpr std::array<AblationArm, 4> kArms = {{
    {FusionMode::Minimum, false},
    {FusionMode::Minimum, true},
    {FusionMode::HarmonicMean, false},
    {FusionMode::HarmonicMean, true},
}};

/// `base` with only the fusion operator and retention policy replaced.
TrackingConfig arm_config(const TrackingConfig& base, const AblationArm& arm);

struct SequenceRun {
    std::vector<FrameOutput> outputs;
    std::size_t tracklets = 0;
    double seconds = 0.0;  ///< tracker-only wall clock
};

SequenceRun run_sequence(const io::SequenceBundle& bundle, const TrackingConfig& cfg,
                         bool use_embeddings = true);

struct ArmResult {
    AblationArm arm;
    metrics::MetricsReport report;
    std::size_t spawned = 0;
    /// MOT result text per scenario, in scenario order.
    std::vector<std::string> results;
};

/// Runs every arm over every scenario on `threads` workers (0 picks the
/// hardware concurrency). Output does not depend on the thread count.
std::vector<ArmResult> run_ablation(const std::vector<synth::Scenario>& scenarios,
                                    const TrackingConfig& base, std::size_t threads = 1);

std::string format_table(const std::vector<ArmResult>& arms);
std::string format_table_kv(const std::vector<ArmResult>& arms);

}  // namespace hmsort::ablation
