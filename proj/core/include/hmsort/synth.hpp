#pragma once

#include "hmsort/io.hpp"
#include "hmsort/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hmsort::synth {

/// Seeded generator with a portable output sequence.
///
/// std::mt19937_64 is fully specified by the standard; the uniform and
/// normal transforms are implemented here (53-bit mantissa fill and
/// Box-Muller) because the standard distributions are implementation
/// defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Two identities meet at the same point at frame `at` coming from opposite
/// directions, then continue past each other.
struct Crossing {
    int at = 0;
    int first = 0;
    int second = 0;
};

/// The identity is absent from frame `leave_at` up to `return_at - 1` and
/// reappears close to where it left.
struct ExitReenter {
    int id = 0;
    int leave_at = 0;
    int return_at = 0;
};

using Event = std::variant<Crossing, ExitReenter>;

struct EmbeddingModel {
    std::size_t dim = 32;
    double team_sep_deg = 60.0;
    double identity_sep_deg = 30.0;
    double obs_noise_deg = 3.0;
};

struct ScenarioSpec {
    std::uint64_t seed = 0;
    double field_width = 1280.0;
    double field_height = 720.0;
    int n_identities = 1;
    /// Team (0 or 1) per identity; empty means alternating teams.
    std::vector<int> teams;
    int frames = 100;
    std::vector<Event> events;
    double det_noise_sigma = 0.0;
    double score_mean = 0.9;
    double score_sigma = 0.0;
    double miss_rate = 0.0;
    EmbeddingModel embed;
    double box_width = 40.0;
    double box_height = 90.0;
    /// Relative per-identity size jitter, uniform in [-j, j].
    double box_scale_jitter = 0.0;
    /// Mean random-walk speed in pixels per frame.
    double speed = 3.0;
    int waypoint_interval = 40;
    /// Frames on each side of a crossing's meeting point.
    int crossing_window = 15;

    /// Throws ContractError naming the offending field or event index.
    void validate() const;
    int team_of(int identity) const;
};

struct Scenario {
    std::string name;
    /// One entry per frame 1..frames, ids are identity numbers (1-based).
    std::vector<FrameOutput> ground_truth;
    io::SequenceBundle detections;
};

Scenario generate(const ScenarioSpec& spec, std::string name = "scenario");

struct ScenarioFiles {
    std::string gt;
    std::string detections;
    std::string embeddings;
};

ScenarioFiles render(const Scenario& scenario);

/// Writes gt.txt, det.txt, emb.txt and manifest.txt into `dir`.
/// Returns the written paths in that order.
std::vector<std::filesystem::path> write_scenario(const Scenario& scenario,
                                                  const std::filesystem::path& dir);

/// Key-value scenario description; events use
/// `crossing(at, a, b); exit_reenter(id, leave_at, return_at)`.
ScenarioSpec parse_scenario(std::string_view text, std::string_view source);
ScenarioSpec read_scenario(const std::filesystem::path& path);
std::string format_scenario(const ScenarioSpec& spec);

/// Scenario families used by the acceptance suite and the ablation examples.
namespace packs {

/// Ten noiselessly detected identities over 600 frames with crossings and
/// one exit/re-entry per scenario.
ScenarioSpec perfect(std::uint64_t seed);

/// Same-team crossings with look-alike embeddings and detector noise.
ScenarioSpec crossings(std::uint64_t seed);

/// Exit/re-entry gaps of 60 to 120 frames.
ScenarioSpec reentry(std::uint64_t seed);

}  // namespace packs

}  // namespace hmsort::synth
