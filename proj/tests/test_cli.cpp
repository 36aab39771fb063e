#include "commands.hpp"

#include "hmsort/io.hpp"
#include "hmsort/synth.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace hmsort;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("hmsort_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(HMSORT_CLI_PATH) + " " + args + " >" + (dir_ / "stdout").string() +
                                " 2>" + (dir_ / "stderr").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string out() const { return io::read_text(dir_ / "stdout"); }
    std::string err() const { return io::read_text(dir_ / "stderr"); }
    fs::path path(const std::string& name) const { return dir_ / name; }

    void write_spec(const std::string& name, const synth::ScenarioSpec& spec) const {
        io::write_text(path(name), synth::format_scenario(spec));
    }

    fs::path dir_;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_F(Cli, SingleIdentityScenarioKeepsOneId) {
    synth::ScenarioSpec spec;
    spec.seed = 5;
    spec.frames = 60;
    write_spec("one.scenario", spec);
    ASSERT_EQ(run("synth --spec " + q(path("one.scenario")) + " --out " + q(path("gen"))), 0) << err();
    EXPECT_TRUE(fs::exists(path("gen/manifest.txt")));
    ASSERT_EQ(run("track --dets " + q(path("gen/det.txt")) + " --embeddings " + q(path("gen/emb.txt")) +
                  " --out " + q(path("res.txt"))),
              0)
        << err();
    EXPECT_NE(out().find("frames=60"), std::string::npos);
    EXPECT_NE(out().find("fps="), std::string::npos);
    const auto res = io::read_tracks(path("res.txt"));
    ASSERT_EQ(res.size(), 60u);
    for (const auto& f : res) {
        ASSERT_EQ(f.entries.size(), 1u);
        EXPECT_EQ(f.entries[0].id, 1);
    }
}

TEST_F(Cli, TrackIsDeterministicAndWritesNoTiming) {
    write_spec("c.scenario", synth::packs::crossings(3));
    ASSERT_EQ(run("synth --spec " + q(path("c.scenario")) + " --out " + q(path("gen"))), 0) << err();
    const std::string base = "track --dets " + q(path("gen/det.txt")) + " --embeddings " + q(path("gen/emb.txt"));
    ASSERT_EQ(run(base + " --out " + q(path("a.txt"))), 0) << err();
    ASSERT_EQ(run(base + " --out " + q(path("b.txt"))), 0) << err();
    EXPECT_EQ(io::read_text(path("a.txt")), io::read_text(path("b.txt")));
    EXPECT_EQ(io::read_text(path("a.txt")).find("fps"), std::string::npos);
}

TEST_F(Cli, SynthRegeneratesByteIdentically) {
    write_spec("p.scenario", synth::packs::perfect(4));
    ASSERT_EQ(run("synth --spec " + q(path("p.scenario")) + " --out " + q(path("gen"))), 0);
    const std::string det = io::read_text(path("gen/det.txt"));
    const std::string manifest = io::read_text(path("gen/manifest.txt"));
    ASSERT_EQ(run("synth --spec " + q(path("p.scenario")) + " --out " + q(path("gen"))), 0);
    EXPECT_EQ(io::read_text(path("gen/det.txt")), det);
    EXPECT_EQ(io::read_text(path("gen/manifest.txt")), manifest);
}

TEST_F(Cli, SynthInvalidEventNamesIndex) {
    io::write_text(path("bad.scenario"),
                   "n_identities = 3\nframes = 100\nevents = crossing(40, 1, 2); exit_reenter(2, 45, 60)\n");
    EXPECT_EQ(run("synth --spec " + q(path("bad.scenario")) + " --out " + q(path("gen"))), hmsort::cli::kContract);
    EXPECT_NE(err().find("event 1"), std::string::npos) << err();
    io::write_text(path("worse.scenario"), "n_identities = 3\nevents = crossing(40, 1)\n");
    EXPECT_EQ(run("synth --spec " + q(path("worse.scenario")) + " --out " + q(path("gen"))), hmsort::cli::kParse);
    EXPECT_NE(err().find("event 0"), std::string::npos) << err();
}

TEST_F(Cli, EvalSelfIsPerfectAndEmptyIsNotAnError) {
    write_spec("p.scenario", synth::packs::perfect(1));
    ASSERT_EQ(run("synth --spec " + q(path("p.scenario")) + " --out " + q(path("gen"))), 0);
    ASSERT_EQ(run("eval --gt " + q(path("gen/gt.txt")) + " --results " + q(path("gen/gt.txt")) + " --report " +
                  q(path("report.txt"))),
              0)
        << err();
    EXPECT_NE(io::read_text(path("report.txt")).find("mota=1.000000\n"), std::string::npos);
    io::write_text(path("empty.txt"), "");
    ASSERT_EQ(run("eval --gt " + q(path("gen/gt.txt")) + " --results " + q(path("empty.txt")) + " --report " +
                  q(path("report.txt"))),
              0)
        << err();
    EXPECT_NE(io::read_text(path("report.txt")).find("mota=0.000000\n"), std::string::npos);
}

TEST_F(Cli, EvalRejectsFrameRangeMismatch) {
    io::write_text(path("gt.txt"), "1,1,0,0,10,10,1,-1,-1,-1\n2,1,0,0,10,10,1,-1,-1,-1\n");
    io::write_text(path("res.txt"), "5,1,0,0,10,10,1,-1,-1,-1\n");
    EXPECT_EQ(run("eval --gt " + q(path("gt.txt")) + " --results " + q(path("res.txt"))), hmsort::cli::kContract);
    EXPECT_NE(err().find("frame range"), std::string::npos) << err();
}

TEST_F(Cli, ExitCodesAreDistinct) {
    EXPECT_EQ(run(""), hmsort::cli::kUsage);
    EXPECT_EQ(run("track --dets x"), hmsort::cli::kUsage);
    EXPECT_EQ(run("frobnicate"), hmsort::cli::kUsage);
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("track --dets " + q(path("missing.txt")) + " --out " + q(path("r.txt"))), hmsort::cli::kIo);
    io::write_text(path("det.txt"), "1,-1,a,b,c\n");
    EXPECT_EQ(run("track --dets " + q(path("det.txt")) + " --out " + q(path("r.txt"))), hmsort::cli::kParse);
    io::write_text(path("det.txt"), "1,-1,0,0,10,10,0.9\n");
    io::write_text(path("cfg.txt"), "expansion_increment = 0.9\n");
    EXPECT_EQ(run("track --dets " + q(path("det.txt")) + " --config " + q(path("cfg.txt")) + " --out " +
                  q(path("r.txt"))),
              hmsort::cli::kContract);
    EXPECT_NE(err().find("expansion_increment"), std::string::npos);
    io::write_text(path("emb.txt"), "1,0,1,0\n1,1,1,0\n");
    EXPECT_EQ(run("track --dets " + q(path("det.txt")) + " --embeddings " + q(path("emb.txt")) + " --out " +
                  q(path("r.txt"))),
              hmsort::cli::kParse);
}

TEST_F(Cli, AblateWritesArmOutputsAndTable) {
    synth::ScenarioSpec spec;
    spec.seed = 3;
    spec.n_identities = 2;
    spec.frames = 50;
    write_spec("a.scenario", spec);
    spec.seed = 4;
    write_spec("b.scenario", spec);
    ASSERT_EQ(run("ablate --scenarios " + q(dir_) + " --out " + q(path("abl")) + " --threads 2"), 0) << err();
    for (const char* arm : {"min_buffer", "min_keep", "hm_buffer", "hm_keep"}) {
        EXPECT_TRUE(fs::exists(path("abl") / arm / "a.txt")) << arm;
        EXPECT_TRUE(fs::exists(path("abl") / arm / "b.txt")) << arm;
    }
    const std::string table = io::read_text(path("abl/ablation.txt"));
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
    const std::string kv = io::read_text(path("abl/ablation_kv.txt"));
    ASSERT_EQ(run("ablate --scenarios " + q(dir_) + " --out " + q(path("abl1")) + " --threads 1"), 0) << err();
    EXPECT_EQ(io::read_text(path("abl1/ablation_kv.txt")), kv);
    EXPECT_EQ(io::read_text(path("abl1/hm_keep/a.txt")), io::read_text(path("abl/hm_keep/a.txt")));

    fs::create_directories(path("nothing"));
    EXPECT_EQ(run("ablate --scenarios " + q(path("nothing")) + " --out " + q(path("abl2"))), hmsort::cli::kContract);
}

TEST(Commands, RunGuardedMapsErrors) {
    std::ostringstream err;
    EXPECT_EQ(cli::run_guarded([] { throw ParseError("p"); }, err), cli::kParse);
    EXPECT_EQ(cli::run_guarded([] { throw ContractError("c"); }, err), cli::kContract);
    EXPECT_EQ(cli::run_guarded([] { throw IoError("i"); }, err), cli::kIo);
    EXPECT_EQ(cli::run_guarded([] { throw std::runtime_error("x"); }, err), cli::kFailure);
    EXPECT_EQ(cli::run_guarded([] {}, err), cli::kOk);
}
