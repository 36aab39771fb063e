#pragma once

#include "hmsort/error.hpp"

#include <cstddef>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace hmsort::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kParse = 3,
    kContract = 4,
    kIo = 5,
};

struct TrackArgs {
    std::filesystem::path dets;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
};

struct EvalArgs {
    std::filesystem::path gt;
    std::filesystem::path results;
    std::optional<std::filesystem::path> report;
};

struct SynthArgs {
    std::filesystem::path spec;
    std::filesystem::path out;
};

struct AblateArgs {
    std::filesystem::path scenarios;
    std::filesystem::path out;
    std::size_t threads = 1;
    std::optional<std::filesystem::path> config;
};

// Each command throws hmsort::Error subclasses on failure; run_guarded maps
// them to exit codes.
void cmd_track(const TrackArgs& args, std::ostream& out);
void cmd_eval(const EvalArgs& args, std::ostream& out);
void cmd_synth(const SynthArgs& args, std::ostream& out);
void cmd_ablate(const AblateArgs& args, std::ostream& out);

/// Scenario spec files in `dir` (extension .scenario), sorted by name.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

template <typename F>
int run_guarded(F&& f, std::ostream& err) {
    try {
        f();
        return kOk;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kContract;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace hmsort::cli
