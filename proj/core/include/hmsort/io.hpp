#pragma once

#include "hmsort/model.hpp"
#include "hmsort/tracker.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmsort::io {

/// Detections of one sequence grouped by frame (index 0 is frame 1).
struct SequenceBundle {
    std::string name;
    int frames = 0;
    std::vector<std::vector<Detection>> detections;
    /// Position of each kept detection in its frame's file order, counting
    /// skipped rows, which is the key used by the embedding sidecar.
    std::vector<std::vector<int>> file_index;
    /// Rows seen per frame, kept or not.
    std::vector<int> file_rows;
    bool has_embeddings = false;
    std::optional<std::size_t> embedding_dim;
    std::size_t clamped_scores = 0;
    std::size_t skipped_boxes = 0;

    std::size_t detection_count() const noexcept;
    std::vector<FrameInput> frame_inputs() const;
};

/// One `key = value` line of a settings file.
struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

/// Splits `key = value` lines, dropping blanks and `#` comments.
/// Throws ParseError for a line without `=` or a repeated key.
std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view source);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// MOTChallenge detections: `frame,id,left,top,width,height,conf[,x,y,z]`.
///
/// Scores outside [0, 1] are clamped and counted; rows with a non-positive
/// size are dropped and counted. `frame_count` extends the bundle with
/// trailing empty frames.
SequenceBundle parse_detections(std::string_view text, std::string_view source,
                                std::optional<int> frame_count = std::nullopt);
SequenceBundle read_detections(const std::filesystem::path& path,
                               std::optional<int> frame_count = std::nullopt);

/// Sidecar lines `frame,det_index,v0,...,v{D-1}`; every kept detection must
/// be covered exactly once.
SequenceBundle attach_embeddings(std::string_view text, std::string_view source,
                                 SequenceBundle bundle);
SequenceBundle read_embeddings(const std::filesystem::path& path, SequenceBundle bundle);

/// `frame,id,left,top,width,height,score,-1,-1,-1`, two decimals, sorted by
/// (frame, id), one line per entry.
std::string format_results(const std::vector<FrameOutput>& outputs);
void write_results(const std::filesystem::path& path, const std::vector<FrameOutput>& outputs);

/// Reads result or ground-truth rows (id >= 1). Frames without rows are
/// omitted; the returned list is sorted by frame.
std::vector<FrameOutput> parse_tracks(std::string_view text, std::string_view source);
std::vector<FrameOutput> read_tracks(const std::filesystem::path& path);

std::string format_detections(const SequenceBundle& bundle);
std::string format_embeddings(const SequenceBundle& bundle);

TrackingConfig parse_config(std::string_view text, std::string_view source);
TrackingConfig read_config(const std::filesystem::path& path);
std::string format_config(const TrackingConfig& cfg);

std::optional<FusionMode> parse_fusion_mode(std::string_view text);

}  // namespace hmsort::io
