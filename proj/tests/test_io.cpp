#include "hmsort/error.hpp"
#include "hmsort/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace hmsort;

TEST(ReadDetections, FieldMapping) {
    const auto b = io::parse_detections("1,-1,10,20,30,40,0.95,-1,-1,-1\n", "det");
    ASSERT_EQ(b.frames, 1);
    ASSERT_EQ(b.detections[0].size(), 1u);
    const Detection& d = b.detections[0][0];
    EXPECT_EQ(d.frame, 1);
    EXPECT_EQ(d.bbox, BoundingBox(10, 20, 30, 40));
    EXPECT_EQ(d.score, 0.95);
    EXPECT_FALSE(b.has_embeddings);
}

TEST(ReadDetections, EmptyFileAndGaps) {
    EXPECT_EQ(io::parse_detections("", "det").frames, 0);
    const auto b = io::parse_detections("1,-1,0,0,5,5,0.9\n3,-1,0,0,5,5,0.9\n", "det", 4);
    ASSERT_EQ(b.frames, 4);
    EXPECT_EQ(b.detections[1].size(), 0u);
    EXPECT_EQ(b.detections[3].size(), 0u);
    const auto inputs = b.frame_inputs();
    ASSERT_EQ(inputs.size(), 4u);
    EXPECT_EQ(inputs[2].frame, 3);
}

TEST(ReadDetections, ClampsScoresAndSkipsDegenerateBoxes) {
    const auto b = io::parse_detections("1,-1,0,0,5,5,1.4\n1,-1,0,0,0,5,0.9\n1,-1,0,0,5,5,-0.2\n", "det");
    EXPECT_EQ(b.clamped_scores, 2u);
    EXPECT_EQ(b.skipped_boxes, 1u);
    ASSERT_EQ(b.detections[0].size(), 2u);
    EXPECT_EQ(b.detections[0][0].score, 1.0);
    EXPECT_EQ(b.detections[0][1].score, 0.0);
    EXPECT_EQ(b.file_index[0], (std::vector<int>{0, 2}));
}

TEST(ReadDetections, MalformedLineNamesLine) {
    try {
        io::parse_detections("1,-1,0,0,5,5,0.9\n1,-1,zero,0,5,5,0.9\n", "dets.txt");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("dets.txt:2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(io::parse_detections("1,-1,0,0\n", "d"), ParseError);
    EXPECT_THROW(io::parse_detections("0,-1,0,0,5,5,0.9\n", "d"), ParseError);
    EXPECT_THROW(io::parse_detections("1,-1,0,0,5,5,0.9,1,2,3,4\n", "d"), ParseError);
}

TEST(ReadEmbeddings, AttachesAndNormalizes) {
    auto b = io::parse_detections("1,-1,0,0,5,5,0.9\n1,-1,10,0,5,5,0.9\n", "det");
    b = io::attach_embeddings("1,0,0.6,0.8\n1,1,3,4\n", "emb", std::move(b));
    EXPECT_TRUE(b.has_embeddings);
    EXPECT_EQ(b.embedding_dim, 2u);
    EXPECT_DOUBLE_EQ(b.detections[0][0].embedding->values()[0], 0.6);
    EXPECT_DOUBLE_EQ(b.detections[0][1].embedding->values()[1], 0.8);
}

TEST(ReadEmbeddings, CoverageAndConsistencyErrors) {
    const auto b = io::parse_detections("1,-1,0,0,5,5,0.9\n1,-1,10,0,5,5,0.9\n", "det");
    try {
        io::attach_embeddings("1,0,1,0\n", "emb", b);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos) << e.what();
    }
    EXPECT_THROW(io::attach_embeddings("1,0,1,0\n1,0,1,0\n1,1,1,0\n", "emb", b), ParseError);
    EXPECT_THROW(io::attach_embeddings("1,0,1,0\n1,1,1,0,0\n", "emb", b), ParseError);
    EXPECT_THROW(io::attach_embeddings("1,0,0,0\n1,1,1,0\n", "emb", b), ParseError);
    EXPECT_THROW(io::attach_embeddings("1,0,1,0\n1,1,1,0\n2,0,1,0\n", "emb", b), ParseError);
}

TEST(ReadEmbeddings, IndexCountsSkippedRows) {
    auto b = io::parse_detections("1,-1,0,0,-1,5,0.9\n1,-1,10,0,5,5,0.9\n", "det");
    b = io::attach_embeddings("1,0,1,0\n1,1,0,1\n", "emb", std::move(b));
    ASSERT_EQ(b.detections[0].size(), 1u);
    EXPECT_DOUBLE_EQ(b.detections[0][0].embedding->values()[1], 1.0);
}

TEST(Results, FormatRule) {
    const std::vector<FrameOutput> out = {{1, {{2, BoundingBox(10, 20, 30, 40), 0.9}}}};
    EXPECT_EQ(io::format_results(out), "1,2,10.00,20.00,30.00,40.00,0.90,-1,-1,-1\n");
    EXPECT_EQ(io::format_results({}), "");
}

TEST(Results, SortedByFrameThenId) {
    const std::vector<FrameOutput> out = {
        {2, {{1, BoundingBox(0, 0, 1, 1), 1.0}}},
        {1, {{5, BoundingBox(0, 0, 1, 1), 1.0}, {3, BoundingBox(0, 0, 1, 1), 1.0}}},
    };
    EXPECT_EQ(io::format_results(out),
              "1,3,0.00,0.00,1.00,1.00,1.00,-1,-1,-1\n1,5,0.00,0.00,1.00,1.00,1.00,-1,-1,-1\n"
              "2,1,0.00,0.00,1.00,1.00,1.00,-1,-1,-1\n");
}

TEST(Results, RoundTripIsStable) {
    const std::vector<FrameOutput> out = {
        {1, {{1, BoundingBox(10.123, 20.456, 30.789, 40.001), 0.912}, {4, BoundingBox(1, 2, 3, 4), 0.5}}},
        {3, {{2, BoundingBox(-5.555, 7.777, 8.888, 9.999), 0.7}}},
    };
    const std::string first = io::format_results(out);
    const auto back = io::parse_tracks(first, "r");
    EXPECT_EQ(io::format_results(back), first);
    EXPECT_NEAR(back[0].entries[0].box.left(), 10.123, 0.005);
    EXPECT_NEAR(back[1].entries[0].box.width(), 8.888, 0.005);
}

TEST(Tracks, RejectsNonPositiveIds) {
    EXPECT_THROW(io::parse_tracks("1,0,0,0,5,5,1,-1,-1,-1\n", "gt"), ParseError);
    EXPECT_THROW(io::parse_tracks("1,-1,0,0,5,5,1,-1,-1,-1\n", "gt"), ParseError);
}

TEST(Config, EmptyGivesDefaults) {
    EXPECT_EQ(io::parse_config("", "cfg"), TrackingConfig{});
    EXPECT_EQ(io::parse_config("# only a comment\n\n", "cfg"), TrackingConfig{});
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = io::parse_config(
        "det_score_min = 0.3\nhigh_score_thresh = 0.7\nnew_track_thresh = 0.6\niou_gate = 0.9\n"
        "appearance_gate = 0.25\nexpansion_initial = 0.4\nexpansion_increment = 0.2\nema_alpha = 1.0\n"
        "keep_all_tracks = false\nmax_lost_frames = 12\nfusion_mode = minimum  # baseline\n",
        "cfg");
    EXPECT_EQ(cfg.det_score_min, 0.3);
    EXPECT_EQ(cfg.high_score_thresh, 0.7);
    EXPECT_EQ(cfg.new_track_thresh, 0.6);
    EXPECT_EQ(cfg.iou_gate, 0.9);
    EXPECT_EQ(cfg.appearance_gate, 0.25);
    EXPECT_EQ(cfg.expansion_initial, 0.4);
    EXPECT_EQ(cfg.expansion_increment, 0.2);
    EXPECT_EQ(cfg.ema_alpha, 1.0);
    EXPECT_FALSE(cfg.keep_all_tracks);
    EXPECT_EQ(cfg.max_lost_frames, 12);
    EXPECT_EQ(cfg.fusion_mode, FusionMode::Minimum);
    EXPECT_EQ(io::parse_config(io::format_config(cfg), "again"), cfg);
}

TEST(Config, ErrorsNameTheKey) {
    auto message = [](const char* text) -> std::string {
        try {
            io::parse_config(text, "cfg");
        } catch (const Error& e) {
            return e.what();
        }
        return "";
    };
    EXPECT_NE(message("bogus = 1\n").find("bogus"), std::string::npos);
    EXPECT_NE(message("iou_gate = high\n").find("iou_gate"), std::string::npos);
    EXPECT_NE(message("iou_gate = 1.5\n").find("iou_gate"), std::string::npos);
    EXPECT_THROW(io::parse_config("bogus = 1\n", "cfg"), ParseError);
    EXPECT_THROW(io::parse_config("iou_gate = 1.5\n", "cfg"), ContractError);
    EXPECT_THROW(io::parse_config("iou_gate = 0.5\niou_gate = 0.6\n", "cfg"), ParseError);
    EXPECT_THROW(io::parse_config("iou_gate 0.5\n", "cfg"), ParseError);
}

TEST(Files, MissingAndUnwritablePaths) {
    EXPECT_THROW(io::read_text("/nonexistent/dir/file.txt"), IoError);
    EXPECT_THROW(io::write_text("/nonexistent/dir/file.txt", "x"), IoError);
    const auto dir = std::filesystem::temp_directory_path() / "hmsort_io_test";
    std::filesystem::create_directories(dir);
    const std::vector<FrameOutput> out = {{1, {{1, BoundingBox(1, 2, 3, 4), 0.5}}}};
    io::write_results(dir / "r.txt", out);
    EXPECT_EQ(io::read_text(dir / "r.txt"), io::format_results(out));
    std::filesystem::remove_all(dir);
}

TEST(Parsers, GarbageNeverCrashes) {
    const std::vector<std::string> junk = {",,,,,,", "1,2,3,4,5,6,7,8,9,10,11", "\x01\x02\x03", "1,-1,1e999,0,5,5,0.9",
                                           "1,-1,nan,0,5,5,0.9", "99999999999,-1,0,0,5,5,0.9", "=", "a = = b"};
    for (const auto& s : junk) {
        try {
            io::parse_detections(s, "j");
            io::parse_tracks(s, "j");
        } catch (const Error&) {
        }
        try {
            io::parse_config(s, "j");
        } catch (const Error&) {
        }
    }
    SUCCEED();
}
