#include "hmsort/synth.hpp"

#include "hmsort/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cerrno>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <numbers>

namespace hmsort::synth {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return std::min(k, n - 1);
}

namespace {

struct Interval {
    int lo;
    int hi;
    std::size_t event;
};

std::vector<std::pair<int, Interval>> event_windows(const ScenarioSpec& spec) {
    std::vector<std::pair<int, Interval>> out;  // (identity, window)
    for (std::size_t i = 0; i < spec.events.size(); ++i) {
        if (const auto* c = std::get_if<Crossing>(&spec.events[i])) {
            const Interval w{c->at - spec.crossing_window, c->at + spec.crossing_window, i};
            out.emplace_back(c->first, w);
            out.emplace_back(c->second, w);
        } else {
            const auto& e = std::get<ExitReenter>(spec.events[i]);
            out.emplace_back(e.id, Interval{e.leave_at - 1, e.return_at, i});
        }
    }
    return out;
}

[[noreturn]] void invalid(std::string what) {
    throw ContractError("invalid scenario: " + what);
}

}  // namespace

int ScenarioSpec::team_of(int identity) const {
    if (teams.empty()) return (identity - 1) % 2;
    return teams[static_cast<std::size_t>(identity - 1)];
}

void ScenarioSpec::validate() const {
    if (n_identities < 1) invalid("n_identities must be >= 1");
    if (frames < 1) invalid("frames must be >= 1");
    if (!teams.empty()) {
        if (teams.size() != static_cast<std::size_t>(n_identities)) {
            invalid(fmt::format("teams lists {} identities, expected {}", teams.size(), n_identities));
        }
        for (int t : teams) {
            if (t != 0 && t != 1) invalid("teams entries must be 0 or 1");
        }
    }
    if (!(box_width > 0.0 && box_height > 0.0)) invalid("box size must be positive");
    if (!(box_scale_jitter >= 0.0 && box_scale_jitter < 0.5)) invalid("box_scale_jitter must be in [0, 0.5)");
    const double max_scale = 1.0 + box_scale_jitter;
    if (!(field_width > box_width * max_scale && field_height > box_height * max_scale)) {
        invalid("field must be larger than the boxes");
    }
    if (!(det_noise_sigma >= 0.0) || !std::isfinite(det_noise_sigma)) invalid("det_noise_sigma must be >= 0");
    if (!(score_mean >= 0.0 && score_mean <= 1.0)) invalid("score_mean must be in [0, 1]");
    if (!(score_sigma >= 0.0) || !std::isfinite(score_sigma)) invalid("score_sigma must be >= 0");
    if (!(miss_rate >= 0.0 && miss_rate <= 1.0)) invalid("miss_rate must be in [0, 1]");
    if (embed.dim < 2) invalid("embed_dim must be >= 2");
    for (double a : {embed.team_sep_deg, embed.identity_sep_deg, embed.obs_noise_deg}) {
        if (!(a >= 0.0 && a <= 180.0)) invalid("embedding angles must be in [0, 180] degrees");
    }
    if (!(speed >= 0.0) || !std::isfinite(speed)) invalid("speed must be >= 0");
    if (waypoint_interval < 1) invalid("waypoint_interval must be >= 1");
    if (crossing_window < 1) invalid("crossing_window must be >= 1");

    for (std::size_t i = 0; i < events.size(); ++i) {
        if (const auto* c = std::get_if<Crossing>(&events[i])) {
            if (c->first < 1 || c->first > n_identities || c->second < 1 || c->second > n_identities) {
                invalid(fmt::format("event {}: crossing identity out of range", i));
            }
            if (c->first == c->second) invalid(fmt::format("event {}: crossing needs two identities", i));
            if (c->at < 2 || c->at > frames) invalid(fmt::format("event {}: crossing frame out of range", i));
        } else {
            const auto& e = std::get<ExitReenter>(events[i]);
            if (e.id < 1 || e.id > n_identities) invalid(fmt::format("event {}: identity out of range", i));
            if (e.leave_at < 2 || e.return_at <= e.leave_at || e.return_at > frames) {
                invalid(fmt::format("event {}: needs 2 <= leave_at < return_at <= frames", i));
            }
        }
    }
    const auto windows = event_windows(*this);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        for (std::size_t j = i + 1; j < windows.size(); ++j) {
            const auto& [id_a, a] = windows[i];
            const auto& [id_b, b] = windows[j];
            if (id_a != id_b || a.event == b.event) continue;
            if (a.lo <= b.hi && b.lo <= a.hi) {
                invalid(fmt::format("event {} overlaps event {} for identity {}", b.event, a.event, id_a));
            }
        }
    }
}

namespace {

struct Point {
    double x;
    double y;
};

struct Waypoint {
    int frame;
    Point p;
};

class Path {
public:
    Path(Point start, Point lo, Point hi) : lo_(lo), hi_(hi) { points_.push_back({1, start}); }

    Point at(int frame) const {
        if (frame <= points_.front().frame) return points_.front().p;
        for (std::size_t i = 1; i < points_.size(); ++i) {
            const Waypoint& b = points_[i];
            if (frame <= b.frame) {
                const Waypoint& a = points_[i - 1];
                const double t = static_cast<double>(frame - a.frame) / (b.frame - a.frame);
                return {a.p.x + t * (b.p.x - a.p.x), a.p.y + t * (b.p.y - a.p.y)};
            }
        }
        return points_.back().p;
    }

    int last_frame() const { return points_.back().frame; }
    Point last_point() const { return points_.back().p; }

    void append(int frame, Point p) { points_.push_back({frame, clamp(p)}); }

    /// Pins the position at `frame` and drops everything after it.
    Point cut(int frame) {
        const Point p = at(frame);
        while (!points_.empty() && points_.back().frame >= frame) points_.pop_back();
        points_.push_back({frame, p});
        return p;
    }

    Point clamp(Point p) const {
        return {std::clamp(p.x, lo_.x, hi_.x), std::clamp(p.y, lo_.y, hi_.y)};
    }

    Point reflect(Point p) const {
        auto fold = [](double v, double lo, double hi) {
            if (v < lo) v = 2.0 * lo - v;
            if (v > hi) v = 2.0 * hi - v;
            return std::clamp(v, lo, hi);
        };
        return {fold(p.x, lo_.x, hi_.x), fold(p.y, lo_.y, hi_.y)};
    }

private:
    std::vector<Waypoint> points_;
    Point lo_;
    Point hi_;
};

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
    std::vector<double> v(dim);
    double sq = 0.0;
    do {
        sq = 0.0;
        for (double& x : v) {
            x = rng.normal();
            sq += x * x;
        }
    } while (sq < 1e-12);
    const double n = std::sqrt(sq);
    for (double& x : v) x /= n;
    return v;
}

/// Rotates unit vector `u` by `angle` radians towards a random orthogonal direction.
std::vector<double> rotate(const std::vector<double>& u, double angle, Rng& rng) {
    std::vector<double> w;
    double sq = 0.0;
    do {
        w = random_unit(u.size(), rng);
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d += w[i] * u[i];
        sq = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            w[i] -= d * u[i];
            sq += w[i] * w[i];
        }
    } while (sq < 1e-12);
    const double n = std::sqrt(sq);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = c * u[i] + s * (w[i] / n);
    return out;
}

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

int event_start(const ScenarioSpec& spec, const Event& e) {
    if (const auto* c = std::get_if<Crossing>(&e)) return c->at - spec.crossing_window;
    return std::get<ExitReenter>(e).leave_at - 1;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec, std::string name) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_identities);

    Rng path_rng(spec.seed);
    Rng embed_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    Rng det_rng(spec.seed ^ 0xD1B54A32D192ED03ULL);

    std::vector<double> widths(n), heights(n);
    std::vector<Path> paths;
    paths.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = 1.0 + spec.box_scale_jitter * path_rng.uniform(-1.0, 1.0);
        widths[i] = spec.box_width * scale;
        heights[i] = spec.box_height * scale;
        const Point lo{widths[i] / 2.0, heights[i] / 2.0};
        const Point hi{spec.field_width - widths[i] / 2.0, spec.field_height - heights[i] / 2.0};
        paths.emplace_back(Point{path_rng.uniform(lo.x, hi.x), path_rng.uniform(lo.y, hi.y)}, lo, hi);
    }

    auto extend = [&](std::size_t id, int frame) {
        Path& path = paths[id];
        while (path.last_frame() < frame) {
            const double angle = path_rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double dist = spec.speed * spec.waypoint_interval * path_rng.uniform(0.5, 1.5);
            const Point prev = path.last_point();
            path.append(path.last_frame() + spec.waypoint_interval,
                        path.reflect({prev.x + dist * std::cos(angle), prev.y + dist * std::sin(angle)}));
        }
    };

    std::vector<int> floor(n, 1);
    std::vector<std::vector<std::pair<int, int>>> absent(n);  // [first, last] hidden frames

    std::vector<std::size_t> order(spec.events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return event_start(spec, spec.events[a]) < event_start(spec, spec.events[b]);
    });

    for (std::size_t idx : order) {
        const Event& ev = spec.events[idx];
        if (const auto* c = std::get_if<Crossing>(&ev)) {
            const auto a = static_cast<std::size_t>(c->first - 1);
            const auto b = static_cast<std::size_t>(c->second - 1);
            const int earliest = std::max({floor[a], floor[b], 1});
            const int window = spec.crossing_window;
            // Approach speed cap keeps the boxes overlapping around the meeting frame.
            const double cap = std::max(std::min(2.0 * spec.speed, std::min(widths[a], widths[b]) / 8.0), 0.5);
            int lead = std::min(window, c->at - earliest);
            if (lead < 1) {
                throw ContractError(fmt::format("invalid scenario: event {} has no room to approach", idx));
            }
            extend(a, c->at);
            extend(b, c->at);
            for (int iter = 0; iter < 32; ++iter) {
                const Point pa = paths[a].at(c->at - lead);
                const Point pb = paths[b].at(c->at - lead);
                const double d = std::hypot(pa.x - pb.x, pa.y - pb.y);
                const int needed = static_cast<int>(std::ceil(d / (2.0 * cap)));
                const int room = c->at - earliest;
                if (needed <= lead || lead >= room) break;
                lead = std::min(needed, room);
            }
            const int t0 = c->at - lead;
            const Point pa = paths[a].cut(t0);
            const Point pb = paths[b].cut(t0);
            const Point meet{(pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0};
            const double carry = static_cast<double>(window) / lead;
            paths[a].append(c->at, meet);
            paths[a].append(c->at + window, {meet.x + (meet.x - pa.x) * carry, meet.y + (meet.y - pa.y) * carry});
            paths[b].append(c->at, meet);
            paths[b].append(c->at + window, {meet.x + (meet.x - pb.x) * carry, meet.y + (meet.y - pb.y) * carry});
            floor[a] = floor[b] = c->at + window;
        } else {
            const auto& e = std::get<ExitReenter>(ev);
            const auto id = static_cast<std::size_t>(e.id - 1);
            const int t0 = e.leave_at - 1;
            if (t0 < floor[id]) {
                throw ContractError(fmt::format("invalid scenario: event {} starts inside an earlier event", idx));
            }
            extend(id, t0);
            const Point p = paths[id].cut(t0);
            const double angle = path_rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double r = path_rng.uniform(0.0, 0.5) * heights[id];
            paths[id].append(e.return_at, {p.x + r * std::cos(angle), p.y + r * std::sin(angle)});
            floor[id] = e.return_at;
            absent[id].emplace_back(e.leave_at, e.return_at - 1);
        }
    }
    for (std::size_t i = 0; i < n; ++i) extend(i, spec.frames);

    // Appearance: team directions, identity directions around them, then
    // per-observation perturbations.
    const std::vector<double> team0 = random_unit(spec.embed.dim, embed_rng);
    const std::vector<double> team1 = rotate(team0, radians(spec.embed.team_sep_deg), embed_rng);
    std::vector<std::vector<double>> identity_mean(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& team = spec.team_of(static_cast<int>(i) + 1) == 0 ? team0 : team1;
        identity_mean[i] = rotate(team, radians(spec.embed.identity_sep_deg), embed_rng);
    }

    Scenario out;
    out.name = std::move(name);
    io::SequenceBundle& bundle = out.detections;
    bundle.name = out.name;
    bundle.frames = spec.frames;
    bundle.detections.resize(static_cast<std::size_t>(spec.frames));
    bundle.file_index.resize(static_cast<std::size_t>(spec.frames));
    bundle.file_rows.resize(static_cast<std::size_t>(spec.frames), 0);
    bundle.has_embeddings = true;
    bundle.embedding_dim = spec.embed.dim;

    const double obs_noise = radians(spec.embed.obs_noise_deg);
    for (int frame = 1; frame <= spec.frames; ++frame) {
        FrameOutput gt{frame, {}};
        std::vector<Detection> dets;
        for (std::size_t i = 0; i < n; ++i) {
            const bool hidden = std::any_of(absent[i].begin(), absent[i].end(), [&](const auto& gap) {
                return frame >= gap.first && frame <= gap.second;
            });
            if (hidden) continue;
            const Point c = paths[i].at(frame);
            const BoundingBox box(c.x - widths[i] / 2.0, c.y - heights[i] / 2.0, widths[i], heights[i]);
            gt.entries.push_back({static_cast<int>(i) + 1, box, 1.0});

            const bool missed = det_rng.uniform() < spec.miss_rate;
            const double s = spec.det_noise_sigma;
            const double dl = s * det_rng.normal();
            const double dt = s * det_rng.normal();
            const double dw = s * det_rng.normal();
            const double dh = s * det_rng.normal();
            const double score = std::clamp(spec.score_mean + spec.score_sigma * det_rng.normal(), 0.0, 1.0);
            std::vector<double> look =
                rotate(identity_mean[i], std::abs(det_rng.normal()) * obs_noise, det_rng);
            if (missed) continue;
            dets.push_back(Detection{frame,
                                     BoundingBox(box.left() + dl, box.top() + dt,
                                                 std::max(1.0, box.width() + dw),
                                                 std::max(1.0, box.height() + dh)),
                                     score, Embedding(std::move(look))});
        }
        for (std::size_t k = dets.size(); k > 1; --k) {
            std::swap(dets[k - 1], dets[det_rng.below(k)]);
        }
        const auto slot = static_cast<std::size_t>(frame - 1);
        for (std::size_t k = 0; k < dets.size(); ++k) bundle.file_index[slot].push_back(static_cast<int>(k));
        bundle.file_rows[slot] = static_cast<int>(dets.size());
        bundle.detections[slot] = std::move(dets);
        out.ground_truth.push_back(std::move(gt));
    }
    return out;
}

ScenarioFiles render(const Scenario& scenario) {
    return {io::format_results(scenario.ground_truth), io::format_detections(scenario.detections),
            io::format_embeddings(scenario.detections)};
}

std::vector<std::filesystem::path> write_scenario(const Scenario& scenario,
                                                  const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
    const ScenarioFiles files = render(scenario);
    const std::vector<std::pair<std::string, const std::string*>> items = {
        {"gt.txt", &files.gt}, {"det.txt", &files.detections}, {"emb.txt", &files.embeddings}};
    std::vector<std::filesystem::path> written;
    std::string manifest = fmt::format("scenario {}\n", scenario.name);
    for (const auto& [file, text] : items) {
        io::write_text(dir / file, *text);
        written.push_back(dir / file);
        manifest += fmt::format("{} lines={} bytes={}\n", file,
                                std::count(text->begin(), text->end(), '\n'), text->size());
    }
    io::write_text(dir / "manifest.txt", manifest);
    written.push_back(dir / "manifest.txt");
    return written;
}

namespace {

[[noreturn]] void parse_fail(std::string_view source, int line, std::string_view what) {
    throw ParseError(fmt::format("{}:{}: {}", source, line, what));
}

std::string_view strip(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(strip(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

std::optional<double> number(std::string_view s) {
    std::string buf(s);
    if (buf.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> integer(std::string_view s) {
    std::string buf(s);
    if (buf.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(buf.c_str(), &end, 10);
    if (end != buf.c_str() + buf.size() || errno != 0) return std::nullopt;
    return v;
}

Event parse_event(std::string_view text, std::size_t index, std::string_view source, int line) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
        !strip(text.substr(close + 1)).empty()) {
        parse_fail(source, line, fmt::format("event {}: expected name(args), got '{}'", index, text));
    }
    const std::string_view kind = strip(text.substr(0, open));
    std::vector<int> args;
    for (std::string_view a : split_on(text.substr(open + 1, close - open - 1), ',')) {
        const auto v = integer(a);
        if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
            parse_fail(source, line, fmt::format("event {}: '{}' is not an integer", index, a));
        }
        args.push_back(static_cast<int>(*v));
    }
    if (args.size() != 3) {
        parse_fail(source, line, fmt::format("event {}: {} takes 3 arguments", index, kind));
    }
    if (kind == "crossing") return Crossing{args[0], args[1], args[2]};
    if (kind == "exit_reenter") return ExitReenter{args[0], args[1], args[2]};
    parse_fail(source, line, fmt::format("event {}: unknown event kind '{}'", index, kind));
}

std::pair<double, double> parse_size(const io::KeyValue& kv, std::string_view source) {
    const auto x = kv.value.find('x');
    if (x != std::string::npos) {
        const auto w = number(strip(std::string_view(kv.value).substr(0, x)));
        const auto h = number(strip(std::string_view(kv.value).substr(x + 1)));
        if (w && h) return {*w, *h};
    }
    parse_fail(source, kv.line, fmt::format("key '{}': expected WIDTHxHEIGHT, got '{}'", kv.key, kv.value));
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text, std::string_view source) {
    ScenarioSpec spec;
    for (const io::KeyValue& kv : io::parse_key_values(text, source)) {
        auto real = [&]() {
            const auto v = number(kv.value);
            if (!v) parse_fail(source, kv.line, fmt::format("key '{}': cannot parse '{}' as a number", kv.key, kv.value));
            return *v;
        };
        auto whole = [&]() {
            const auto v = integer(kv.value);
            if (!v || *v < 0 || *v > std::numeric_limits<int>::max()) {
                parse_fail(source, kv.line, fmt::format("key '{}': expected a non-negative integer, got '{}'", kv.key, kv.value));
            }
            return static_cast<int>(*v);
        };
        if (kv.key == "seed") {
            std::string buf(kv.value);
            char* end = nullptr;
            errno = 0;
            const unsigned long long v = std::strtoull(buf.c_str(), &end, 10);
            if (buf.empty() || buf[0] == '-' || end != buf.c_str() + buf.size() || errno != 0) {
                parse_fail(source, kv.line, fmt::format("key 'seed': expected an unsigned integer, got '{}'", kv.value));
            }
            spec.seed = v;
        } else if (kv.key == "field") {
            std::tie(spec.field_width, spec.field_height) = parse_size(kv, source);
        } else if (kv.key == "box_size") {
            std::tie(spec.box_width, spec.box_height) = parse_size(kv, source);
        } else if (kv.key == "n_identities") spec.n_identities = whole();
        else if (kv.key == "frames") spec.frames = whole();
        else if (kv.key == "teams") {
            spec.teams.clear();
            for (std::string_view t : split_on(kv.value, ',')) {
                const auto v = integer(t);
                if (!v) parse_fail(source, kv.line, fmt::format("key 'teams': '{}' is not an integer", t));
                spec.teams.push_back(static_cast<int>(*v));
            }
        } else if (kv.key == "events") {
            spec.events.clear();
            if (strip(kv.value).empty()) continue;
            std::size_t index = 0;
            for (std::string_view e : split_on(kv.value, ';')) {
                if (e.empty()) continue;
                spec.events.push_back(parse_event(e, index++, source, kv.line));
            }
        } else if (kv.key == "det_noise_sigma") spec.det_noise_sigma = real();
        else if (kv.key == "score_mean") spec.score_mean = real();
        else if (kv.key == "score_sigma") spec.score_sigma = real();
        else if (kv.key == "miss_rate") spec.miss_rate = real();
        else if (kv.key == "embed_dim") spec.embed.dim = static_cast<std::size_t>(whole());
        else if (kv.key == "team_sep_deg") spec.embed.team_sep_deg = real();
        else if (kv.key == "identity_sep_deg") spec.embed.identity_sep_deg = real();
        else if (kv.key == "obs_noise_deg") spec.embed.obs_noise_deg = real();
        else if (kv.key == "box_scale_jitter") spec.box_scale_jitter = real();
        else if (kv.key == "speed") spec.speed = real();
        else if (kv.key == "waypoint_interval") spec.waypoint_interval = whole();
        else if (kv.key == "crossing_window") spec.crossing_window = whole();
        else parse_fail(source, kv.line, fmt::format("unknown key '{}'", kv.key));
    }
    spec.validate();
    return spec;
}

ScenarioSpec read_scenario(const std::filesystem::path& path) {
    return parse_scenario(io::read_text(path), path.string());
}

std::string format_scenario(const ScenarioSpec& spec) {
    std::string teams;
    for (std::size_t i = 0; i < spec.teams.size(); ++i) {
        teams += fmt::format("{}{}", i ? "," : "", spec.teams[i]);
    }
    std::string events;
    for (std::size_t i = 0; i < spec.events.size(); ++i) {
        if (i) events += "; ";
        if (const auto* c = std::get_if<Crossing>(&spec.events[i])) {
            events += fmt::format("crossing({}, {}, {})", c->at, c->first, c->second);
        } else {
            const auto& e = std::get<ExitReenter>(spec.events[i]);
            events += fmt::format("exit_reenter({}, {}, {})", e.id, e.leave_at, e.return_at);
        }
    }
    std::string out = fmt::format(
        "seed = {}\nfield = {}x{}\nn_identities = {}\nframes = {}\nbox_size = {}x{}\n"
        "box_scale_jitter = {}\nspeed = {}\nwaypoint_interval = {}\ncrossing_window = {}\n"
        "det_noise_sigma = {}\nscore_mean = {}\nscore_sigma = {}\nmiss_rate = {}\n"
        "embed_dim = {}\nteam_sep_deg = {}\nidentity_sep_deg = {}\nobs_noise_deg = {}\n",
        spec.seed, spec.field_width, spec.field_height, spec.n_identities, spec.frames,
        spec.box_width, spec.box_height, spec.box_scale_jitter, spec.speed, spec.waypoint_interval,
        spec.crossing_window, spec.det_noise_sigma, spec.score_mean, spec.score_sigma, spec.miss_rate,
        spec.embed.dim, spec.embed.team_sep_deg, spec.embed.identity_sep_deg, spec.embed.obs_noise_deg);
    if (!teams.empty()) out += "teams = " + teams + "\n";
    out += "events = " + events + "\n";
    return out;
}

namespace packs {

namespace {

/// Same-team pairs crossing every `spacing` frames starting at `first`.
std::vector<Event> team_crossings(const ScenarioSpec& spec, Rng& rng, int count, int first, int spacing) {
    std::vector<Event> events;
    std::map<int, std::vector<int>> by_team;
    for (int id = 1; id <= spec.n_identities; ++id) by_team[spec.team_of(id)].push_back(id);
    for (int k = 0; k < count; ++k) {
        const auto& members = by_team[k % 2];
        if (members.size() < 2) continue;
        const auto i = rng.below(members.size());
        auto j = rng.below(members.size() - 1);
        if (j >= i) ++j;
        events.push_back(Crossing{first + k * spacing, members[i], members[j]});
    }
    return events;
}

}  // namespace

ScenarioSpec perfect(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.n_identities = 10;
    spec.frames = 600;
    spec.score_mean = 0.9;
    spec.embed = {32, 60.0, 30.0, 0.0};
    Rng rng(seed * 7919 + 17);
    spec.events = team_crossings(spec, rng, 4, 80, 100);
    spec.events.push_back(ExitReenter{static_cast<int>(rng.below(10)) + 1, 460, 520});
    spec.validate();
    return spec;
}

ScenarioSpec crossings(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.n_identities = 10;
    spec.frames = 600;
    spec.det_noise_sigma = 2.0;
    spec.score_mean = 0.8;
    spec.score_sigma = 0.1;
    spec.miss_rate = 0.05;
    spec.box_scale_jitter = 0.05;
    spec.embed = {32, 50.0, 14.0, 9.0};
    Rng rng(seed * 7919 + 23);
    spec.events = team_crossings(spec, rng, 10, 40, 55);
    spec.validate();
    return spec;
}

ScenarioSpec reentry(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.n_identities = 6;
    spec.frames = 600;
    spec.det_noise_sigma = 1.0;
    spec.score_mean = 0.85;
    spec.score_sigma = 0.05;
    spec.miss_rate = 0.02;
    spec.embed = {32, 60.0, 30.0, 4.0};
    Rng rng(seed * 7919 + 29);
    for (int k = 0; k < 3; ++k) {
        const int id = 2 * k + 1 + static_cast<int>(rng.below(2));
        const int leave = 60 + 150 * k + static_cast<int>(rng.below(40));
        const int gap = 60 + static_cast<int>(rng.below(61));
        spec.events.push_back(ExitReenter{id, leave, leave + gap});
    }
    spec.validate();
    return spec;
}

}  // namespace packs

}  // namespace hmsort::synth
