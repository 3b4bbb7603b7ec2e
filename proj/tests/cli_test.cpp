/*
 * Copyright (c) 2026 The smrtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Drives the `smr` executable end to end through its files and exit codes.

#include "fixtures.hpp"

#include "smrtrack/eval.hpp"
#include "smrtrack/imaging.hpp"
#include "smrtrack/synth.hpp"
#include "smrtrack/tracker.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace smrtrack;

namespace {

struct Run {
    int rc = -1;
    std::string output;  // stdout and stderr interleaved
};

Run smr(const std::string& args) {
    Run r;
    const std::string cmd = "SMR_THREADS=2 \"" SMR_CLI_PATH "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int status = pclose(pipe);
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("smrtrack_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    // Static 40x30 scene with a textured 8x8 target at (12,10).
    fs::path static_scene() {
        SynthSpec s;
        s.width = 40;
        s.height = 30;
        s.length = 6;
        s.background = 30;
        s.target = BBox{12, 10, 8, 8};
        s.target_pattern = pattern::Noise{60, 250, 4};
        const auto frames = dir / "static";
        write_synth_sequence(generate(s), frames);
        return frames;
    }
};

std::vector<std::string> manifest_outputs(const fs::path& manifest) {
    const auto j = nlohmann::json::parse(slurp(manifest));
    return j.at("outputs").get<std::vector<std::string>>();
}

}  // namespace

TEST_F(Cli, TrackStaticSceneKeepsTheBox) {
    const auto frames = static_scene();
    const auto out = dir / "res.csv";
    const auto r = smr("track --frames " + q(frames) + " --init 12 10 8 8 --out " + q(out));
    ASSERT_EQ(r.rc, 0) << r.output;
    const auto results = parse_results_csv(slurp(out));
    ASSERT_EQ(results.size(), 5u);
    EXPECT_EQ(results.front().frame_index, 2);
    for (const auto& res : results) {
        EXPECT_EQ(res.box, (BBox{12, 10, 8, 8}));
        EXPECT_DOUBLE_EQ(res.score, 64.0);
        EXPECT_TRUE(res.updated);
    }
    const auto manifest = fs::path(out.string() + ".manifest.json");
    ASSERT_TRUE(fs::exists(manifest));
    const auto j = nlohmann::json::parse(slurp(manifest));
    EXPECT_EQ(j.at("command"), "track");
    EXPECT_TRUE(j.contains("config"));
    EXPECT_TRUE(j.contains("inputs"));
    EXPECT_GE(j.at("timing").at("wall_seconds").get<double>(), 0.0);
    for (const auto& o : manifest_outputs(manifest)) EXPECT_TRUE(fs::exists(o)) << o;
}

TEST_F(Cli, TrackInitFileAndSadMetric) {
    const auto frames = static_scene();
    const auto out = dir / "sad.csv";
    const auto r = smr("track --frames " + q(frames) + " --init-file " + q(frames / "init.txt") +
                       " --metric sad --out " + q(out));
    ASSERT_EQ(r.rc, 0) << r.output;
    for (const auto& res : parse_results_csv(slurp(out))) {
        EXPECT_EQ(res.box, (BBox{12, 10, 8, 8}));
        EXPECT_DOUBLE_EQ(res.score, 0.0);
    }
}

TEST_F(Cli, TrackIsIdempotent) {
    const auto frames = static_scene();
    ASSERT_EQ(smr("track --frames " + q(frames) + " --init 12 10 8 8 --out " + q(dir / "a.csv")).rc, 0);
    ASSERT_EQ(smr("track --frames " + q(frames) + " --init 12 10 8 8 --out " + q(dir / "a.csv")).rc, 0);
    ASSERT_EQ(smr("track --frames " + q(frames) + " --init 12 10 8 8 --out " + q(dir / "b.csv")).rc, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST_F(Cli, TrackConfigFileAndFlagPrecedence) {
    const auto frames = static_scene();
    put(dir / "cfg.txt", "search_radius=3\nalpha0=10\n");
    const auto r = smr("track --frames " + q(frames) + " --init 12 10 8 8 --config " + q(dir / "cfg.txt") +
                       " --radius 4 --out " + q(dir / "r.csv"));
    ASSERT_EQ(r.rc, 0) << r.output;
    const auto j = nlohmann::json::parse(slurp(dir / "r.csv.manifest.json"));
    EXPECT_EQ(j.at("config").at("search_radius"), 4);
    EXPECT_DOUBLE_EQ(j.at("config").at("alpha0").get<double>(), 10.0);
}

TEST_F(Cli, TrackErrors) {
    auto r = smr("track --frames " + q(dir / "nope") + " --init 0 0 4 4 --out " + q(dir / "r.csv"));
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.output.find("no such input"), std::string::npos) << r.output;
    EXPECT_FALSE(fs::exists(dir / "r.csv"));

    const auto frames = static_scene();
    r = smr("track --frames " + q(frames) + " --init 12 10 0 8 --out " + q(dir / "r.csv"));
    EXPECT_NE(r.rc, 0) << r.output;
    r = smr("track --frames " + q(frames) + " --init 12 10 8 8 --radius -1 --out " + q(dir / "r.csv"));
    EXPECT_NE(r.rc, 0) << r.output;
    r = smr("track --frames " + q(frames) + " --init 12 10 8 8 --metric ncc --out " + q(dir / "r.csv"));
    EXPECT_NE(r.rc, 0) << r.output;
}

TEST_F(Cli, EvalCountsAndThreshold) {
    const auto fx = smrtest::make_three_frame_eval();
    put(dir / "truth.csv", format_ground_truth(fx.truth));
    put(dir / "res.csv", format_results_csv(fx.results));
    auto r = smr("eval --results " + q(dir / "res.csv") + " --truth " + q(dir / "truth.csv") + " --out " +
                 q(dir / "rep.csv"));
    ASSERT_EQ(r.rc, 0) << r.output;
    EXPECT_NE(r.output.find("correct: 1 / 2"), std::string::npos) << r.output;
    const auto rep = parse_report_csv(slurp(dir / "rep.csv"));
    EXPECT_EQ(rep.correctly_tracked, 1);
    EXPECT_EQ(rep.total_evaluated, 2);

    r = smr("eval --results " + q(dir / "res.csv") + " --truth " + q(dir / "truth.csv") +
            " --iou-threshold 0.3 --out " + q(dir / "rep.csv"));
    EXPECT_NE(r.output.find("correct: 2 / 2"), std::string::npos) << r.output;
    r = smr("eval --results " + q(dir / "res.csv") + " --truth " + q(dir / "truth.csv") +
            " --iou-threshold 1.01 --out " + q(dir / "rep.csv"));
    EXPECT_NE(r.output.find("correct: 0 / 2"), std::string::npos) << r.output;
}

TEST_F(Cli, EvalPerfectTrackingOnASyntheticScene) {
    const auto frames = static_scene();
    ASSERT_EQ(smr("track --frames " + q(frames) + " --init 12 10 8 8 --out " + q(dir / "r.csv")).rc, 0);
    const auto r = smr("eval --results " + q(dir / "r.csv") + " --truth " + q(frames / "truth.csv") + " --out " +
                       q(dir / "rep.csv"));
    ASSERT_EQ(r.rc, 0) << r.output;
    EXPECT_NE(r.output.find("correct: 5 / 5"), std::string::npos) << r.output;
}

TEST_F(Cli, EvalMalformedInputNamesTheLine) {
    put(dir / "truth.csv", "2,0,0,10,10\n3,0,zero,10,10\n");
    put(dir / "res.csv", format_results_csv(smrtest::make_three_frame_eval().results));
    const auto r = smr("eval --results " + q(dir / "res.csv") + " --truth " + q(dir / "truth.csv") + " --out " +
                       q(dir / "rep.csv"));
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
}

TEST_F(Cli, EvalFrameMismatchIsReported) {
    const auto fx = smrtest::make_three_frame_eval();
    put(dir / "truth.csv", format_ground_truth(fx.truth) + "9,0,0,10,10\n");
    put(dir / "res.csv", format_results_csv(fx.results));
    const auto r = smr("eval --results " + q(dir / "res.csv") + " --truth " + q(dir / "truth.csv") + " --out " +
                       q(dir / "rep.csv"));
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.output.find("no result for frames [9]"), std::string::npos) << r.output;
}

TEST_F(Cli, SynthWritesFramesTruthAndIsDeterministic) {
    put(dir / "scene.txt", smrtest::cli_scene_text());
    auto r = smr("synth --spec " + q(dir / "scene.txt") + " --out-dir " + q(dir / "a"));
    ASSERT_EQ(r.rc, 0) << r.output;
    r = smr("synth --spec " + q(dir / "scene.txt") + " --out-dir " + q(dir / "b"));
    ASSERT_EQ(r.rc, 0) << r.output;
    const auto expected = generate(parse_synth_spec(smrtest::cli_scene_text()));
    EXPECT_EQ(load_sequence(dir / "a"), expected.frames);
    EXPECT_EQ(parse_ground_truth(slurp(dir / "a" / "truth.csv")).entries, expected.truth.entries);
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().filename() == "manifest.json") continue;
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    }
    for (const auto& o : manifest_outputs(dir / "a" / "manifest.json")) EXPECT_TRUE(fs::exists(o)) << o;
}

TEST_F(Cli, SynthGenerateExamplesThroughFiles) {
    const auto synth = [&](const std::string& name, const std::string& text) {
        put(dir / (name + ".txt"), text);
        const auto r = smr("synth --spec " + q(dir / (name + ".txt")) + " --out-dir " + q(dir / name));
        EXPECT_EQ(r.rc, 0) << r.output;
        return parse_ground_truth(slurp(dir / name / "truth.csv")).entries;
    };

    const auto still = synth("still", "width=12\nheight=10\nlength=5\nbackground=10\n"
                                      "target_size=3 3\ntarget_position=4 3\ntarget_pattern=solid 250\n");
    const auto frames = load_sequence(dir / "still");
    ASSERT_EQ(frames.size(), 5u);
    for (const auto& f : frames) EXPECT_EQ(f, frames.front());
    for (const auto& e : still) EXPECT_EQ(e.box, (BBox{4, 3, 3, 3}));

    const auto moving = synth("moving", "width=40\nheight=10\nlength=10\ntarget_size=3 3\n"
                                        "target_position=0 3\ntarget_pattern=solid 250\nmotion=constant 2 0\n");
    ASSERT_EQ(moving.size(), 10u);
    for (std::size_t i = 0; i < moving.size(); ++i) EXPECT_EQ(moving[i].box->x, static_cast<int>(2 * i));

    // 12 px/frame occluder: over the target only at frame 7.
    const auto occluded = synth("occluded", "width=80\nheight=50\nlength=10\ntarget_size=10 10\n"
                                            "target_position=20 20\ntarget_pattern=solid 200\n"
                                            "event=occluder 1 10 -53 19 12 12 12 0 0\n");
    for (const auto& e : occluded) EXPECT_EQ(e.box.has_value(), e.frame_index != 7) << e.frame_index;
}

TEST_F(Cli, SynthSpecErrors) {
    put(dir / "bad.txt", "width=10\nheight=ten\n");
    auto r = smr("synth --spec " + q(dir / "bad.txt") + " --out-dir " + q(dir / "o"));
    EXPECT_NE(r.rc, 0);
    EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
    put(dir / "unreachable.txt", "width=20\nheight=20\nlength=10\ntarget_size=4 4\nmotion=constant 9 0\n");
    r = smr("synth --spec " + q(dir / "unreachable.txt") + " --out-dir " + q(dir / "o"));
    EXPECT_NE(r.rc, 0) << r.output;
}

TEST_F(Cli, DiagnoseIdenticalCandidatesGiveIdenticalOutputs) {
    const auto frames = static_scene();
    const auto f1 = q(frames / "00001.pgm");
    const auto r = smr("diagnose --frame " + f1 + " --template-frame " + f1 +
                       " --template-box 12 10 8 8 --box-a 12 10 8 8 --box-b 12 10 8 8 --out-dir " + q(dir / "d"));
    ASSERT_EQ(r.rc, 0) << r.output;
    EXPECT_EQ(slurp(dir / "d" / "diff_a.pgm"), slurp(dir / "d" / "diff_b.pgm"));
    EXPECT_EQ(slurp(dir / "d" / "hist_a.csv"), slurp(dir / "d" / "hist_b.csv"));
    // Template against itself: all-zero map, all mass in the first bin.
    const auto diff = decode_pgm(read_file(dir / "d" / "diff_a.pgm"));
    EXPECT_EQ(diff, GrayFrame(8, 8, 0));
    const auto hist = slurp(dir / "d" / "hist_a.csv");
    EXPECT_NE(hist.find("\n0,64\n"), std::string::npos) << hist;
    for (const auto& o : manifest_outputs(dir / "d" / "manifest.json")) EXPECT_TRUE(fs::exists(o)) << o;
}

TEST_F(Cli, DiagnoseOutlierSceneSeparatesTheMetrics) {
    const auto scene = smrtest::make_outlier_scene();
    save_pgm(scene.frames[0], dir / "f1.pgm");
    save_pgm(scene.frames[1], dir / "f2.pgm");
    const auto box = [](const BBox& b) {
        return std::to_string(b.x) + " " + std::to_string(b.y) + " " + std::to_string(b.w) + " " +
               std::to_string(b.h);
    };
    const auto r = smr("diagnose --frame " + q(dir / "f2.pgm") + " --template-frame " + q(dir / "f1.pgm") +
                       " --template-box " + box(scene.truth) + " --box-a " + box(scene.truth) + " --box-b " +
                       box(scene.decoy) + " --out-dir " + q(dir / "d"));
    ASSERT_EQ(r.rc, 0) << r.output;
    std::istringstream scores(slurp(dir / "d" / "scores.csv"));
    std::string line;
    std::getline(scores, line);
    EXPECT_EQ(line, "candidate,x,y,w,h,smr,sad");
    double smr_v[2]{}, sad_v[2]{};
    for (int i = 0; i < 2 && std::getline(scores, line); ++i) {
        std::istringstream row(line);
        std::string cell;
        for (int c = 0; c < 6; ++c) std::getline(row, cell, ',');
        smr_v[i] = std::stod(cell);
        std::getline(row, cell, ',');
        sad_v[i] = std::stod(cell);
    }
    EXPECT_GT(smr_v[0], smr_v[1]);  // SMR prefers the truth
    EXPECT_LT(sad_v[1], sad_v[0]);  // SAD prefers the decoy
}

TEST_F(Cli, DiagnoseBoundsError) {
    const auto frames = static_scene();
    const auto f1 = q(frames / "00001.pgm");
    const auto r = smr("diagnose --frame " + f1 + " --template-frame " + f1 +
                       " --template-box 12 10 8 8 --box-a 36 10 8 8 --box-b 12 10 8 8 --out-dir " + q(dir / "d"));
    EXPECT_EQ(r.rc, 3) << r.output;
    EXPECT_NE(r.output.find("out of bounds"), std::string::npos) << r.output;
}

TEST_F(Cli, CompareReportsAndSequences) {
    const auto fx = smrtest::make_three_frame_eval();
    EvalReport rep = evaluate(fx.results, fx.truth, 0.5);
    put(dir / "walk.csv", format_report_csv(rep));
    auto r = smr("compare --report SMR walk " + q(dir / "walk.csv") + " --out " + q(dir / "table.csv"));
    ASSERT_EQ(r.rc, 0) << r.output;
    EXPECT_NE(r.output.find("SMR"), std::string::npos);
    EXPECT_NE(r.output.find("walk"), std::string::npos);

    const auto frames = static_scene();
    r = smr("compare --sequence still " + q(frames) + " " + q(frames / "truth.csv") + " --work-dir " +
            q(dir / "work") + " --out " + q(dir / "table2.csv"));
    ASSERT_EQ(r.rc, 0) << r.output;
    const std::string expected = "tracker  still\n"
                                 "SMR          5\n"
                                 "SAD          5\n";
    EXPECT_EQ(r.output, expected);
    EXPECT_TRUE(fs::exists(dir / "work" / "still_SMR.csv"));
    EXPECT_TRUE(fs::exists(dir / "work" / "still_SAD.eval.csv"));
    for (const auto& o : manifest_outputs(dir / "table2.csv.manifest.json")) EXPECT_TRUE(fs::exists(o)) << o;
}

TEST_F(Cli, CompareNeedsInputs) {
    const auto r = smr("compare --out " + q(dir / "t.csv"));
    EXPECT_NE(r.rc, 0);
}

TEST_F(Cli, BadThreadEnvironmentIsAConfigError) {
    const auto frames = static_scene();
    const std::string cmd = "SMR_THREADS=many \"" SMR_CLI_PATH "\" track --frames " + q(frames) +
                            " --init 12 10 8 8 --out " + q(dir / "r.csv") + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 5);
}
