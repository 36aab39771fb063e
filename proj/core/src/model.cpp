#include "hmsort/model.hpp"

#include "hmsort/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hmsort {

BoundingBox::BoundingBox(double left, double top, double width, double height)
    : left_(left), top_(top), width_(width), height_(height) {
    if (!is_valid(left, top, width, height)) {
        throw ContractError("bounding box needs finite fields and positive size, got (" +
                            std::to_string(left) + ", " + std::to_string(top) + ", " +
                            std::to_string(width) + ", " + std::to_string(height) + ")");
    }
}

bool BoundingBox::is_valid(double left, double top, double width, double height) noexcept {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
           std::isfinite(height) && width > 0.0 && height > 0.0;
}

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw ContractError("embedding must have at least one component");
    }
    double sq = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ContractError("embedding contains a non-finite component");
        }
        sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ContractError("embedding cannot be normalized (zero vector)");
    }
    for (double& v : values_) {
        v /= norm;
    }
}

double Embedding::dot(const Embedding& other) const {
    if (other.dim() != dim()) {
        throw ContractError("embedding dimension mismatch: " + std::to_string(dim()) + " vs " +
                            std::to_string(other.dim()));
    }
    return std::inner_product(values_.begin(), values_.end(), other.values_.begin(), 0.0);
}

void validate(const Detection& detection) {
    if (detection.frame < 1) {
        throw ContractError("detection frame must be >= 1, got " + std::to_string(detection.frame));
    }
    if (!(detection.score >= 0.0 && detection.score <= 1.0)) {
        throw ContractError("detection score must lie in [0, 1], got " +
                            std::to_string(detection.score));
    }
}

std::string_view to_string(FusionMode mode) noexcept {
    switch (mode) {
        case FusionMode::HarmonicMean: return "harmonic_mean";
        case FusionMode::Minimum: return "minimum";
    }
    return "unknown";
}

std::string_view to_string(TrackState state) noexcept {
    switch (state) {
        case TrackState::Tracked: return "tracked";
        case TrackState::Lost: return "lost";
    }
    return "unknown";
}

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) {
        throw ContractError(std::string("invalid tracking config: ") + invariant);
    }
}

bool finite_all(std::initializer_list<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

void TrackingConfig::validate() const {
    require(finite_all({det_score_min, high_score_thresh, new_track_thresh, iou_gate,
                        appearance_gate, expansion_initial, expansion_increment, ema_alpha}),
            "all numeric fields must be finite");
    require(0.0 <= det_score_min, "0 <= det_score_min");
    require(det_score_min <= new_track_thresh, "det_score_min <= new_track_thresh");
    require(new_track_thresh <= high_score_thresh, "new_track_thresh <= high_score_thresh");
    require(high_score_thresh <= 1.0, "high_score_thresh <= 1");
    require(0.0 <= iou_gate && iou_gate <= 1.0, "0 <= iou_gate <= 1");
    require(0.0 <= appearance_gate && appearance_gate <= 1.0, "0 <= appearance_gate <= 1");
    // e = a = 0 is the plain-IoU configuration; otherwise both are positive.
    require(expansion_initial >= 0.0, "expansion_initial >= 0");
    require(expansion_increment >= 0.0, "expansion_increment >= 0");
    require(expansion_increment <= expansion_initial, "expansion_increment <= expansion_initial");
    require(expansion_initial == 0.0 || expansion_increment > 0.0,
            "expansion_increment > 0 when expansion_initial > 0");
    require(0.0 <= ema_alpha && ema_alpha <= 1.0, "0 <= ema_alpha <= 1");
    require(max_lost_frames >= 0, "max_lost_frames >= 0");
}

Measurement bbox_to_measurement(const BoundingBox& box) noexcept {
    return Measurement(box.center_x(), box.center_y(), box.width(), box.height());
}

BoundingBox measurement_to_bbox(const Measurement& m) {
    return BoundingBox(m[0] - m[2] / 2.0, m[1] - m[3] / 2.0, m[2], m[3]);
}

}  // namespace hmsort
