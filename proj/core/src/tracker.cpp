#include "hmsort/tracker.hpp"

#include "hmsort/association.hpp"
#include "hmsort/error.hpp"

#include <algorithm>
#include <string>

namespace hmsort {

namespace {

constexpr double kMinBoxSide = 1.0;

struct Pool {
    std::vector<std::size_t> tracks;  // indices into tracklets_
    std::vector<std::size_t> dets;    // indices into input.detections
};

}  // namespace

BoundingBox state_box(const StateVector& mean) {
    const double w = std::max(mean[2], kMinBoxSide);
    const double h = std::max(mean[3], kMinBoxSide);
    return BoundingBox(mean[0] - w / 2.0, mean[1] - h / 2.0, w, h);
}

Tracker::Tracker(TrackingConfig config, KalmanFilter filter)
    : config_(config), filter_(filter) {
    config_.validate();
}

bool Tracker::eligible(const Tracklet& t, int frame) const {
    if (config_.keep_all_tracks) return true;
    // Frames since the last match, so skipped frames count as lost time.
    return frame - t.last_matched_frame - 1 <= config_.max_lost_frames;
}

void Tracker::apply_match(Tracklet& t, const Detection& d, int frame, bool was_lost) {
    const Measurement m = bbox_to_measurement(d.bbox);
    // A long-frozen state carries stale velocity and overconfident covariance.
    t.kalman = was_lost ? filter_.initiate(m) : filter_.update(t.kalman, m);

    if (t.embedding && d.embedding && config_.ema_alpha < 1.0) {
        const double a = config_.ema_alpha;
        const auto prev = t.embedding->values();
        const auto obs = d.embedding->values();
        std::vector<double> mixed(prev.size());
        double sq = 0.0;
        for (std::size_t i = 0; i < mixed.size(); ++i) {
            mixed[i] = a * prev[i] + (1.0 - a) * obs[i];
            sq += mixed[i] * mixed[i];
        }
        t.embedding = sq > 0.0 ? Embedding(std::move(mixed)) : *d.embedding;
    } else if (!t.embedding && d.embedding) {
        t.embedding = d.embedding;
    }

    t.state = TrackState::Tracked;
    t.last_matched_frame = frame;
    t.history.push_back({frame, d.bbox});
}

void Tracker::spawn(const Detection& d, int frame) {
    Tracklet t;
    t.id = next_id_++;
    t.kalman = filter_.initiate(bbox_to_measurement(d.bbox));
    t.embedding = d.embedding;
    t.state = TrackState::Tracked;
    t.start_frame = frame;
    t.last_matched_frame = frame;
    t.history.push_back({frame, d.bbox});
    tracklets_.push_back(std::move(t));
}

FrameOutput Tracker::step(const FrameInput& input) {
    const int frame = input.frame;
    if (frame < 1) {
        throw ContractError("frame index must be >= 1, got " + std::to_string(frame));
    }
    if (last_frame_ && frame <= *last_frame_) {
        throw ContractError("frames must be strictly increasing: got " + std::to_string(frame) +
                            " after " + std::to_string(*last_frame_));
    }

    const auto& dets = input.detections;
    std::size_t with_embedding = 0;
    for (const Detection& d : dets) {
        validate(d);
        if (d.frame != frame) {
            throw ContractError("detection tagged with frame " + std::to_string(d.frame) +
                                " passed to frame " + std::to_string(frame));
        }
        if (d.embedding) {
            ++with_embedding;
            if (embedding_dim_ && d.embedding->dim() != *embedding_dim_) {
                throw ContractError("embedding dimension changed mid-sequence: " +
                                    std::to_string(d.embedding->dim()) + " vs " +
                                    std::to_string(*embedding_dim_));
            }
            embedding_dim_ = d.embedding->dim();
        }
    }
    if (with_embedding != 0 && with_embedding != dets.size()) {
        throw ContractError("frame " + std::to_string(frame) +
                            " mixes detections with and without embeddings");
    }
    if (!dets.empty()) {
        const bool present = with_embedding != 0;
        if (has_embeddings_ && *has_embeddings_ != present) {
            throw ContractError("embedding presence changed mid-sequence at frame " +
                                std::to_string(frame));
        }
        has_embeddings_ = present;
    }
    const bool use_appearance = with_embedding != 0;
    last_frame_ = frame;

    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (dets[i].score < config_.det_score_min) continue;
        (dets[i].score >= config_.high_score_thresh ? high : low).push_back(i);
    }

    std::vector<std::size_t> candidates;
    std::vector<char> was_tracked(tracklets_.size(), 0);
    for (std::size_t i = 0; i < tracklets_.size(); ++i) {
        Tracklet& t = tracklets_[i];
        if (t.state == TrackState::Tracked) {
            t.kalman = filter_.predict(t.kalman);
            was_tracked[i] = 1;
        }
        if (eligible(t, frame)) {
            candidates.push_back(i);
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (tracklet, detection)
    auto run_round = [&](const std::vector<std::size_t>& track_pool,
                         const std::vector<std::size_t>& det_pool, double expansion,
                         bool appearance) -> Pool {
        Pool left;
        if (track_pool.empty() || det_pool.empty()) {
            left.tracks = track_pool;
            left.dets = det_pool;
            return left;
        }
        std::vector<AssociationInput> track_views;
        track_views.reserve(track_pool.size());
        for (std::size_t ti : track_pool) {
            const Tracklet& t = tracklets_[ti];
            track_views.push_back({state_box(t.kalman.mean), t.embedding ? &*t.embedding : nullptr});
        }
        std::vector<AssociationInput> det_views;
        det_views.reserve(det_pool.size());
        for (std::size_t di : det_pool) {
            const Detection& d = dets[di];
            det_views.push_back({d.bbox, d.embedding ? &*d.embedding : nullptr});
        }
        const CostMatrix costs =
            build_cost_matrix(track_views, det_views, expansion, config_, appearance);
        const Assignment a = linear_assignment(costs);
        for (const Match& m : a.matches) {
            matched.emplace_back(track_pool[m.row], det_pool[m.col]);
        }
        for (std::size_t r : a.unmatched_rows) left.tracks.push_back(track_pool[r]);
        for (std::size_t c : a.unmatched_cols) left.dets.push_back(det_pool[c]);
        return left;
    };

    const double e1 = config_.expansion_initial;
    const double e2 = config_.expansion_initial + config_.expansion_increment;

    const Pool after_first = run_round(candidates, high, e1, use_appearance);
    const Pool after_second = run_round(after_first.tracks, after_first.dets, e2, use_appearance);

    std::vector<std::size_t> tracked_leftovers;
    for (std::size_t ti : after_second.tracks) {
        if (was_tracked[ti]) tracked_leftovers.push_back(ti);
    }
    run_round(tracked_leftovers, low, e2, false);

    FrameOutput out;
    out.frame = frame;
    std::vector<char> matched_now(tracklets_.size(), 0);
    for (const auto& [ti, di] : matched) {
        apply_match(tracklets_[ti], dets[di], frame, !was_tracked[ti]);
        matched_now[ti] = 1;
        out.entries.push_back({tracklets_[ti].id, dets[di].bbox, dets[di].score});
    }
    for (std::size_t i = 0; i < matched_now.size(); ++i) {
        if (!matched_now[i]) tracklets_[i].state = TrackState::Lost;
    }

    for (std::size_t di : after_second.dets) {
        if (dets[di].score >= config_.new_track_thresh) {
            spawn(dets[di], frame);
            out.entries.push_back({tracklets_.back().id, dets[di].bbox, dets[di].score});
        }
    }

    std::sort(out.entries.begin(), out.entries.end(),
              [](const TrackEntry& a, const TrackEntry& b) { return a.id < b.id; });
    return out;
}

}  // namespace hmsort
