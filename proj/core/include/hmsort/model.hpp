#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hmsort {

/// Kalman measurement space: [cx, cy, w, h].
using Measurement = Eigen::Vector4d;
/// Kalman state: [cx, cy, w, h, vcx, vcy, vw, vh], pixels and pixels/frame.
using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;

/// Axis-aligned box in pixel coordinates, top-left origin.
///
/// Width and height are strictly positive and every field is finite; the
/// constructor throws ContractError otherwise.
class BoundingBox {
public:
    BoundingBox(double left, double top, double width, double height);

    double left() const noexcept { return left_; }
    double top() const noexcept { return top_; }
    double width() const noexcept { return width_; }
    double height() const noexcept { return height_; }
    double right() const noexcept { return left_ + width_; }
    double bottom() const noexcept { return top_ + height_; }
    double center_x() const noexcept { return left_ + width_ / 2.0; }
    double center_y() const noexcept { return top_ + height_ / 2.0; }
    double area() const noexcept { return width_ * height_; }

    static bool is_valid(double left, double top, double width, double height) noexcept;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

private:
    double left_;
    double top_;
    double width_;
    double height_;
};

/// Unit-norm appearance vector. Normalized at construction.
class Embedding {
public:
    /// Throws ContractError for an empty, zero or non-finite vector.
    explicit Embedding(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    /// Throws ContractError when dimensions differ.
    double dot(const Embedding& other) const;

    friend bool operator==(const Embedding&, const Embedding&) = default;

private:
    std::vector<double> values_;
};

struct Detection {
    int frame = 1;
    BoundingBox bbox;
    double score = 0.0;
    std::optional<Embedding> embedding;
};

/// Throws ContractError when frame < 1 or score is outside [0, 1].
void validate(const Detection& detection);

/// There is no Removed state: tracklets persist for the whole sequence.
enum class TrackState { Tracked, Lost };

struct KalmanDistribution {
    StateVector mean = StateVector::Zero();
    StateCovariance covariance = StateCovariance::Identity();
};

struct HistoryEntry {
    int frame;
    BoundingBox box;
};

struct Tracklet {
    int id = 0;
    KalmanDistribution kalman;
    /// Smoothed appearance, updated on every appearance-bearing match.
    std::optional<Embedding> embedding;
    TrackState state = TrackState::Tracked;
    int start_frame = 0;
    int last_matched_frame = 0;
    std::vector<HistoryEntry> history;
};

enum class FusionMode { HarmonicMean, Minimum };

std::string_view to_string(FusionMode mode) noexcept;
std::string_view to_string(TrackState state) noexcept;

/// Tracker hyperparameters. ema_alpha and max_lost_frames defaults follow
/// BoT-SORT.
struct TrackingConfig {
    double det_score_min = 0.4;
    double high_score_thresh = 0.6;
    double new_track_thresh = 0.5;
    double iou_gate = 0.8;
    double appearance_gate = 0.3;
    double expansion_initial = 0.3;
    double expansion_increment = 0.3;
    double ema_alpha = 0.9;
    bool keep_all_tracks = true;
    int max_lost_frames = 30;
    FusionMode fusion_mode = FusionMode::HarmonicMean;

    /// Throws ContractError naming the first violated invariant.
    void validate() const;

    friend bool operator==(const TrackingConfig&, const TrackingConfig&) = default;
};

Measurement bbox_to_measurement(const BoundingBox& box) noexcept;

/// Inverse of bbox_to_measurement. Throws ContractError for a non-positive size.
BoundingBox measurement_to_bbox(const Measurement& m);

}  // namespace hmsort
