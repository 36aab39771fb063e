#include "hmsort/io.hpp"

#include "hmsort/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace hmsort::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    int number = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        fn(text.substr(start, end - start), number);
        start = end + 1;
    }
}

std::optional<double> to_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<long long> to_integer(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

[[noreturn]] void fail(std::string_view source, int line, std::string_view what) {
    throw ParseError(fmt::format("{}:{}: {}", source, line, what));
}

double field_double(std::string_view source, int line, std::string_view field,
                    std::string_view name) {
    const auto v = to_double(field);
    if (!v || !std::isfinite(*v)) {
        fail(source, line, fmt::format("{} is not a finite number: '{}'", name, field));
    }
    return *v;
}

int field_int(std::string_view source, int line, std::string_view field, std::string_view name) {
    const auto v = to_integer(field);
    if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
        fail(source, line, fmt::format("{} is not an integer: '{}'", name, field));
    }
    return static_cast<int>(*v);
}

void ensure_frames(SequenceBundle& b, int frames) {
    if (frames <= b.frames) return;
    b.frames = frames;
    b.detections.resize(static_cast<std::size_t>(frames));
    b.file_index.resize(static_cast<std::size_t>(frames));
    b.file_rows.resize(static_cast<std::size_t>(frames), 0);
}

std::string path_name(const std::filesystem::path& p) { return p.string(); }

}  // namespace

std::size_t SequenceBundle::detection_count() const noexcept {
    std::size_t n = 0;
    for (const auto& f : detections) n += f.size();
    return n;
}

std::vector<FrameInput> SequenceBundle::frame_inputs() const {
    std::vector<FrameInput> inputs;
    inputs.reserve(detections.size());
    for (std::size_t i = 0; i < detections.size(); ++i) {
        inputs.push_back({static_cast<int>(i) + 1, detections[i]});
    }
    return inputs;
}

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view source) {
    std::vector<KeyValue> out;
    std::set<std::string, std::less<>> seen;
    for_each_line(text, [&](std::string_view raw, int number) {
        const auto hash = raw.find('#');
        const std::string_view line = trim(raw.substr(0, hash));
        if (line.empty()) return;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(source, number, fmt::format("expected 'key = value', got '{}'", line));
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(source, number, "missing key before '='");
        if (!seen.insert(key).second) fail(source, number, fmt::format("duplicate key '{}'", key));
        out.push_back({std::move(key), std::move(value), number});
    });
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path_name(path)));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError(fmt::format("error while reading '{}'", path_name(path)));
    }
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot open '{}' for writing", path_name(path)));
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw IoError(fmt::format("error while writing '{}'", path_name(path)));
    }
}

SequenceBundle parse_detections(std::string_view text, std::string_view source,
                                std::optional<int> frame_count) {
    SequenceBundle bundle;
    bundle.name = std::string(source);
    for_each_line(text, [&](std::string_view raw, int number) {
        const std::string_view line = trim(raw);
        if (line.empty()) return;
        const auto f = split(line, ',');
        if (f.size() < 7 || f.size() > 10) {
            fail(source, number, fmt::format("expected 7 to 10 fields, got {}", f.size()));
        }
        const int frame = field_int(source, number, f[0], "frame");
        if (frame < 1) fail(source, number, "frame must be >= 1");
        field_int(source, number, f[1], "id");
        const double left = field_double(source, number, f[2], "bb_left");
        const double top = field_double(source, number, f[3], "bb_top");
        const double width = field_double(source, number, f[4], "bb_width");
        const double height = field_double(source, number, f[5], "bb_height");
        double score = field_double(source, number, f[6], "conf");

        ensure_frames(bundle, frame);
        const auto slot = static_cast<std::size_t>(frame - 1);
        const int index = bundle.file_rows[slot]++;
        if (!(width > 0.0 && height > 0.0)) {
            ++bundle.skipped_boxes;
            return;
        }
        if (score < 0.0 || score > 1.0) {
            score = std::clamp(score, 0.0, 1.0);
            ++bundle.clamped_scores;
        }
        bundle.detections[slot].push_back(
            Detection{frame, BoundingBox(left, top, width, height), score, std::nullopt});
        bundle.file_index[slot].push_back(index);
    });
    if (frame_count) {
        if (*frame_count < 0) throw ContractError("frame count must be >= 0");
        ensure_frames(bundle, *frame_count);
    }
    return bundle;
}

SequenceBundle read_detections(const std::filesystem::path& path, std::optional<int> frame_count) {
    SequenceBundle b = parse_detections(read_text(path), path_name(path), frame_count);
    b.name = path.stem().string();
    return b;
}

SequenceBundle attach_embeddings(std::string_view text, std::string_view source,
                                 SequenceBundle bundle) {
    std::optional<std::size_t> dim;
    std::set<std::pair<int, int>> seen;
    for (auto& frame : bundle.detections) {
        for (auto& d : frame) d.embedding.reset();
    }

    for_each_line(text, [&](std::string_view raw, int number) {
        const std::string_view line = trim(raw);
        if (line.empty()) return;
        const auto f = split(line, ',');
        if (f.size() < 3) fail(source, number, "expected frame,det_index,v0,...");
        const int frame = field_int(source, number, f[0], "frame");
        const int det_index = field_int(source, number, f[1], "det_index");
        if (frame < 1 || frame > bundle.frames || det_index < 0 ||
            det_index >= bundle.file_rows[static_cast<std::size_t>(frame - 1)]) {
            fail(source, number,
                 fmt::format("no detection ({}, {}) in the sequence", frame, det_index));
        }
        if (!seen.emplace(frame, det_index).second) {
            fail(source, number, fmt::format("duplicate embedding for ({}, {})", frame, det_index));
        }
        const std::size_t d = f.size() - 2;
        if (dim && *dim != d) {
            fail(source, number, fmt::format("embedding dimension {} differs from {}", d, *dim));
        }
        dim = d;
        std::vector<double> values;
        values.reserve(d);
        for (std::size_t i = 2; i < f.size(); ++i) {
            values.push_back(field_double(source, number, f[i], "embedding component"));
        }

        const auto slot = static_cast<std::size_t>(frame - 1);
        const auto& indices = bundle.file_index[slot];
        const auto it = std::find(indices.begin(), indices.end(), det_index);
        if (it == indices.end()) return;  // row was dropped by the detection reader
        try {
            bundle.detections[slot][static_cast<std::size_t>(it - indices.begin())].embedding =
                Embedding(std::move(values));
        } catch (const ContractError& e) {
            fail(source, number, e.what());
        }
    });

    std::vector<std::string> uncovered;
    for (std::size_t s = 0; s < bundle.detections.size(); ++s) {
        for (std::size_t k = 0; k < bundle.detections[s].size(); ++k) {
            if (!bundle.detections[s][k].embedding) {
                uncovered.push_back(fmt::format("({}, {})", s + 1, bundle.file_index[s][k]));
            }
        }
    }
    if (!uncovered.empty()) {
        std::string list;
        for (std::size_t i = 0; i < uncovered.size() && i < 10; ++i) {
            list += (i ? ", " : "") + uncovered[i];
        }
        if (uncovered.size() > 10) list += ", ...";
        throw ParseError(fmt::format("{}: {} detection(s) without embedding: {}", source,
                                     uncovered.size(), list));
    }
    bundle.has_embeddings = bundle.detection_count() > 0;
    bundle.embedding_dim = bundle.has_embeddings ? dim : std::nullopt;
    return bundle;
}

SequenceBundle read_embeddings(const std::filesystem::path& path, SequenceBundle bundle) {
    return attach_embeddings(read_text(path), path_name(path), std::move(bundle));
}

std::string format_results(const std::vector<FrameOutput>& outputs) {
    struct Row {
        int frame;
        const TrackEntry* entry;
    };
    std::vector<Row> rows;
    for (const auto& out : outputs) {
        for (const auto& e : out.entries) rows.push_back({out.frame, &e});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.entry->id < b.entry->id;
    });
    fmt::memory_buffer buf;
    for (const Row& r : rows) {
        const TrackEntry& e = *r.entry;
        fmt::format_to(std::back_inserter(buf), "{},{},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},-1,-1,-1\n",
                       r.frame, e.id, e.box.left(), e.box.top(), e.box.width(), e.box.height(),
                       e.score);
    }
    return fmt::to_string(buf);
}

void write_results(const std::filesystem::path& path, const std::vector<FrameOutput>& outputs) {
    write_text(path, format_results(outputs));
}

std::vector<FrameOutput> parse_tracks(std::string_view text, std::string_view source) {
    std::map<int, FrameOutput> frames;
    for_each_line(text, [&](std::string_view raw, int number) {
        const std::string_view line = trim(raw);
        if (line.empty()) return;
        const auto f = split(line, ',');
        if (f.size() < 7 || f.size() > 10) {
            fail(source, number, fmt::format("expected 7 to 10 fields, got {}", f.size()));
        }
        const int frame = field_int(source, number, f[0], "frame");
        const int id = field_int(source, number, f[1], "id");
        if (frame < 1) fail(source, number, "frame must be >= 1");
        if (id < 1) fail(source, number, "track id must be >= 1");
        const double left = field_double(source, number, f[2], "bb_left");
        const double top = field_double(source, number, f[3], "bb_top");
        const double width = field_double(source, number, f[4], "bb_width");
        const double height = field_double(source, number, f[5], "bb_height");
        const double score = field_double(source, number, f[6], "conf");
        if (!BoundingBox::is_valid(left, top, width, height)) {
            fail(source, number, "box width and height must be positive");
        }
        auto& out = frames[frame];
        out.frame = frame;
        out.entries.push_back({id, BoundingBox(left, top, width, height), score});
    });
    std::vector<FrameOutput> result;
    result.reserve(frames.size());
    for (auto& [frame, out] : frames) {
        std::stable_sort(out.entries.begin(), out.entries.end(),
                         [](const TrackEntry& a, const TrackEntry& b) { return a.id < b.id; });
        result.push_back(std::move(out));
    }
    return result;
}

std::vector<FrameOutput> read_tracks(const std::filesystem::path& path) {
    return parse_tracks(read_text(path), path_name(path));
}

std::string format_detections(const SequenceBundle& bundle) {
    fmt::memory_buffer buf;
    for (std::size_t s = 0; s < bundle.detections.size(); ++s) {
        for (const Detection& d : bundle.detections[s]) {
            fmt::format_to(std::back_inserter(buf), "{},-1,{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},-1,-1,-1\n",
                           s + 1, d.bbox.left(), d.bbox.top(), d.bbox.width(), d.bbox.height(),
                           d.score);
        }
    }
    return fmt::to_string(buf);
}

std::string format_embeddings(const SequenceBundle& bundle) {
    fmt::memory_buffer buf;
    for (std::size_t s = 0; s < bundle.detections.size(); ++s) {
        for (std::size_t k = 0; k < bundle.detections[s].size(); ++k) {
            const Detection& d = bundle.detections[s][k];
            if (!d.embedding) continue;
            const int index = k < bundle.file_index[s].size() ? bundle.file_index[s][k]
                                                              : static_cast<int>(k);
            fmt::format_to(std::back_inserter(buf), "{},{}", s + 1, index);
            for (double v : d.embedding->values()) {
                fmt::format_to(std::back_inserter(buf), ",{:.6f}", v);
            }
            buf.push_back('\n');
        }
    }
    return fmt::to_string(buf);
}

std::optional<FusionMode> parse_fusion_mode(std::string_view text) {
    if (text == "harmonic_mean" || text == "harmonic") return FusionMode::HarmonicMean;
    if (text == "minimum" || text == "min") return FusionMode::Minimum;
    return std::nullopt;
}

TrackingConfig parse_config(std::string_view text, std::string_view source) {
    TrackingConfig cfg;
    for (const KeyValue& kv : parse_key_values(text, source)) {
        auto number = [&]() {
            const auto v = to_double(kv.value);
            if (!v) fail(source, kv.line, fmt::format("key '{}': cannot parse '{}' as a number",
                                                      kv.key, kv.value));
            return *v;
        };
        if (kv.key == "det_score_min") cfg.det_score_min = number();
        else if (kv.key == "high_score_thresh") cfg.high_score_thresh = number();
        else if (kv.key == "new_track_thresh") cfg.new_track_thresh = number();
        else if (kv.key == "iou_gate") cfg.iou_gate = number();
        else if (kv.key == "appearance_gate") cfg.appearance_gate = number();
        else if (kv.key == "expansion_initial") cfg.expansion_initial = number();
        else if (kv.key == "expansion_increment") cfg.expansion_increment = number();
        else if (kv.key == "ema_alpha") cfg.ema_alpha = number();
        else if (kv.key == "keep_all_tracks") {
            if (kv.value == "true" || kv.value == "1" || kv.value == "yes") cfg.keep_all_tracks = true;
            else if (kv.value == "false" || kv.value == "0" || kv.value == "no") cfg.keep_all_tracks = false;
            else fail(source, kv.line, fmt::format("key 'keep_all_tracks': expected true/false, got '{}'", kv.value));
        } else if (kv.key == "max_lost_frames") {
            const auto v = to_integer(kv.value);
            if (!v || *v < 0 || *v > std::numeric_limits<int>::max()) {
                fail(source, kv.line, fmt::format("key 'max_lost_frames': expected a non-negative integer, got '{}'", kv.value));
            }
            cfg.max_lost_frames = static_cast<int>(*v);
        } else if (kv.key == "fusion_mode") {
            const auto mode = parse_fusion_mode(kv.value);
            if (!mode) fail(source, kv.line, fmt::format("key 'fusion_mode': expected harmonic_mean or minimum, got '{}'", kv.value));
            cfg.fusion_mode = *mode;
        } else {
            fail(source, kv.line, fmt::format("unknown key '{}'", kv.key));
        }
    }
    try {
        cfg.validate();
    } catch (const ContractError& e) {
        throw ContractError(fmt::format("{}: {}", source, e.what()));
    }
    return cfg;
}

TrackingConfig read_config(const std::filesystem::path& path) {
    return parse_config(read_text(path), path_name(path));
}

std::string format_config(const TrackingConfig& cfg) {
    return fmt::format(
        "det_score_min = {}\nhigh_score_thresh = {}\nnew_track_thresh = {}\niou_gate = {}\n"
        "appearance_gate = {}\nexpansion_initial = {}\nexpansion_increment = {}\nema_alpha = {}\n"
        "keep_all_tracks = {}\nmax_lost_frames = {}\nfusion_mode = {}\n",
        cfg.det_score_min, cfg.high_score_thresh, cfg.new_track_thresh, cfg.iou_gate,
        cfg.appearance_gate, cfg.expansion_initial, cfg.expansion_increment, cfg.ema_alpha,
        cfg.keep_all_tracks ? "true" : "false", cfg.max_lost_frames, to_string(cfg.fusion_mode));
}

}  // namespace hmsort::io
