#pragma once

#include "hmsort/model.hpp"
#include "hmsort/motion.hpp"

#include <optional>
#include <vector>

namespace hmsort {

/// One reported box, either a tracker output or a ground-truth label.
struct TrackEntry {
    int id;
    BoundingBox box;
    double score = 1.0;
};

struct FrameInput {
    int frame = 0;
    /// Embeddings are all present or all absent within a frame.
    std::vector<Detection> detections;
};

struct FrameOutput {
    int frame = 0;
    std::vector<TrackEntry> entries;  ///< sorted by id
};

/// Online tracker for one sequence.
///
/// Every frame runs a cascade of three association rounds:
///   1. all eligible tracklets vs high-score detections at the initial
///      expansion, appearance fused when embeddings are present;
///   2. the leftovers again at the increased expansion;
///   3. leftover Tracked tracklets vs low-score detections, geometry only.
/// Lost tracklets are frozen in place and, with keep_all_tracks, stay
/// eligible for re-association forever.
class Tracker {
public:
    /// Throws ContractError if the config is invalid.
    explicit Tracker(TrackingConfig config, KalmanFilter filter = KalmanFilter{});

    /// Throws ContractError for out-of-order frames, detections tagged with
    /// another frame, mixed embedding presence or a dimension change.
    FrameOutput step(const FrameInput& input);

    /// Every tracklet created so far, including Lost ones, in id order.
    const std::vector<Tracklet>& tracklets() const noexcept { return tracklets_; }
    std::vector<Tracklet> finalize() const { return tracklets_; }

    const TrackingConfig& config() const noexcept { return config_; }
    std::optional<int> last_frame() const noexcept { return last_frame_; }

private:
    bool eligible(const Tracklet& t, int frame) const;
    void apply_match(Tracklet& t, const Detection& d, int frame, bool was_lost);
    void spawn(const Detection& d, int frame);

    TrackingConfig config_;
    KalmanFilter filter_;
    std::vector<Tracklet> tracklets_;
    int next_id_ = 1;
    std::optional<int> last_frame_;
    std::optional<std::size_t> embedding_dim_;
    std::optional<bool> has_embeddings_;
};

/// Box implied by a Kalman state; degenerate sizes are clamped to 1 px.
BoundingBox state_box(const StateVector& mean);

}  // namespace hmsort
