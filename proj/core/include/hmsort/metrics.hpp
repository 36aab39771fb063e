#pragma once

#include "hmsort/tracker.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hmsort::metrics {

inline constexpr double kDefaultIouThreshold = 0.5;

struct Correspondence {
    int gt_id;
    int pred_id;
};

struct FrameMatch {
    std::vector<Correspondence> matches;  ///< sorted by gt id
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_pred;
};

/// CLEAR correspondence for one frame.
///
/// Pairs from `previous` (gt id -> pred id, last frame's matches) are kept
/// while their IoU stays at or above the threshold; the rest is solved by
/// an IoU-weighted assignment restricted to IoU >= threshold.
FrameMatch clear_match(std::span<const TrackEntry> gt, std::span<const TrackEntry> pred,
                       const std::map<int, int>& previous,
                       double iou_threshold = kDefaultIouThreshold);

struct SequenceMetrics {
    std::string name;
    std::size_t gt_total = 0;
    std::size_t pred_total = 0;
    std::size_t matches = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t idsw = 0;
    std::size_t frag = 0;
    std::size_t idtp = 0;
    std::size_t idfp = 0;
    std::size_t idfn = 0;
    std::size_t gt_ids = 0;
    std::size_t pred_ids = 0;
    double mota = 1.0;
    double idf1 = 1.0;
};

struct MetricsReport {
    double mota = 1.0;
    double idf1 = 1.0;
    std::size_t idsw = 0;
    std::size_t frag = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t gt_total = 0;
    std::size_t pred_total = 0;
    std::size_t idtp = 0;
    std::vector<SequenceMetrics> sequences;
};

/// CLEAR MOT counts and IDF1 for one sequence.
///
/// Throws ContractError when a frame lists the same id twice, in either input.
SequenceMetrics evaluate_sequence(const std::vector<FrameOutput>& gt,
                                  const std::vector<FrameOutput>& pred, std::string name = "sequence",
                                  double iou_threshold = kDefaultIouThreshold);

MetricsReport evaluate(const std::vector<FrameOutput>& gt, const std::vector<FrameOutput>& pred,
                       std::string name = "sequence", double iou_threshold = kDefaultIouThreshold);

/// Sums counts in the given order and recomputes the ratios.
MetricsReport aggregate(std::vector<SequenceMetrics> sequences);

/// 1 - (fp + fn + idsw) / gt_total, with gt_total floored at 1.
double mota(std::size_t fp, std::size_t fn, std::size_t idsw, std::size_t gt_total) noexcept;

/// 2 IDTP / (gt_total + pred_total); 1 when both are empty.
double idf1(std::size_t idtp, std::size_t gt_total, std::size_t pred_total) noexcept;

std::string format_report_text(const MetricsReport& report);
/// `key=value` lines: overall keys first, then `<sequence>.<key>`.
std::string format_report_kv(const MetricsReport& report);

}  // namespace hmsort::metrics
