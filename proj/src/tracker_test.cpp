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

#include "smrtrack/tracker.hpp"

#include "expect_error.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace smrtrack;

namespace {

// Textured frame with a single distinctive target region.
GrayFrame textured(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return smrtest::random_frame(rng, w, h);
}

GrayFrame translate(const GrayFrame& f, int dx, int dy, std::uint8_t fill = 0) {
    GrayFrame out(f.width(), f.height(), fill);
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) {
            const int sx = x - dx, sy = y - dy;
            if (sx >= 0 && sy >= 0 && sx < f.width() && sy < f.height()) out.at(x, y) = f.at(sx, sy);
        }
    return out;
}

}  // namespace

TEST(TrackerConfig, Validation) {
    EXPECT_NO_THROW(TrackerConfig{}.validate());
    TrackerConfig c;
    c.alpha0 = 0.5;
    EXPECT_SMR_ERROR(c.validate(), ErrorCode::Config, "alpha0");
    c = {};
    c.k = 0;
    EXPECT_SMR_ERROR(c.validate(), ErrorCode::Config, "k");
    c = {};
    c.search_radius = -1;
    EXPECT_SMR_ERROR(c.validate(), ErrorCode::Config, "search_radius");
    c = {};
    c.beta = 0;
    EXPECT_SMR_ERROR(c.validate(), ErrorCode::Config, "beta");
}

TEST(TrackerConfig, ParseOverridesAndReportsLines) {
    const auto c = parse_config("# tuned\nk = 0.5\nsearch_radius=7\nmetric=sad\n\nbeta=2\n");
    EXPECT_DOUBLE_EQ(c.k, 0.5);
    EXPECT_EQ(c.search_radius, 7);
    EXPECT_EQ(c.metric, Metric::SAD);
    EXPECT_DOUBLE_EQ(c.beta, 2.0);
    EXPECT_DOUBLE_EQ(c.alpha0, 63.75);
    EXPECT_EQ(parse_config(format_config(c)), c);

    EXPECT_SMR_ERROR(parse_config("k=0.25\nradius=3\n"), ErrorCode::Config, "line 2: unknown key 'radius'");
    EXPECT_SMR_ERROR(parse_config("k=abc\n"), ErrorCode::Config, "line 1");
    EXPECT_SMR_ERROR(parse_config("metric=ncc\n"), ErrorCode::Config, "line 1");
    EXPECT_SMR_ERROR(parse_config("just words\n"), ErrorCode::Config, "key=value");
}

TEST(Init, BuildsTemplateAndState) {
    const auto frame = textured(10, 10, 3);
    const auto s = init_tracker(frame, BBox{2, 2, 4, 4}, TrackerConfig{});
    EXPECT_EQ(s.tmpl.patch, extract_patch(frame, BBox{2, 2, 4, 4}));
    EXPECT_EQ(s.tmpl.source_frame_index, 1);
    EXPECT_DOUBLE_EQ(s.alpha, 63.75);
    EXPECT_EQ(s.margin, 24);
    EXPECT_EQ(s.position, (BBox{26, 26, 4, 4}));
    EXPECT_FALSE(s.update_frozen);
}

TEST(Init, Errors) {
    const auto frame = textured(10, 10, 3);
    EXPECT_SMR_ERROR(init_tracker(frame, BBox{9, 9, 4, 4}, TrackerConfig{}), ErrorCode::Bounds, "edge");
    TrackerConfig bad;
    bad.alpha0 = 0.5;
    EXPECT_SMR_ERROR(init_tracker(frame, BBox{2, 2, 4, 4}, bad), ErrorCode::Config, "alpha0");
}

TEST(Step, IdenticalFrameStaysAndFloorsAlpha) {
    const auto frame = textured(40, 30, 4);
    const TrackerConfig cfg;
    const auto s0 = init_tracker(frame, BBox{10, 8, 8, 6}, cfg);
    const auto [s1, r] = step(s0, frame, cfg);
    EXPECT_EQ(r.box, (BBox{10, 8, 8, 6}));
    EXPECT_DOUBLE_EQ(r.score, 48.0);
    EXPECT_TRUE(r.updated);
    EXPECT_DOUBLE_EQ(r.alpha_used, 63.75);
    EXPECT_DOUBLE_EQ(s1.alpha, cfg.alpha_min);
    EXPECT_EQ(s1.tmpl.patch, s0.tmpl.patch);
    EXPECT_EQ(s1.tmpl.source_frame_index, 2);
    EXPECT_EQ(r.frame_index, 2);
}

TEST(Step, RecoversTranslation) {
    const auto frame = textured(60, 40, 5);
    TrackerConfig cfg;
    cfg.search_radius = 4;
    const auto s0 = init_tracker(frame, BBox{20, 12, 10, 10}, cfg);
    const auto [s1, r] = step(s0, translate(frame, 3, 0), cfg);
    EXPECT_EQ(r.box, (BBox{23, 12, 10, 10}));
    EXPECT_DOUBLE_EQ(r.score, 100.0);
}

TEST(Step, OverhangFreezesTemplateAndAlpha) {
    // Target 8x8 at x = 30 in a 40-wide frame; next frame it sits at x = 34, 2 px past the right edge.
    GrayFrame f1(40, 20, 0), f2(40, 20, 0);
    std::mt19937_64 rng(6);
    const auto tex = smrtest::random_frame(rng, 8, 8, 100, 255);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            f1.at(30 + x, 6 + y) = tex.at(x, y);
            if (34 + x < 40) f2.at(34 + x, 6 + y) = tex.at(x, y);
        }
    const TrackerConfig cfg;
    const auto s0 = init_tracker(f1, BBox{30, 6, 8, 8}, cfg);
    const auto [s1, r] = step(s0, f2, cfg);
    EXPECT_EQ(r.box, (BBox{34, 6, 8, 8}));
    EXPECT_GT(r.box.right(), 40);
    EXPECT_FALSE(r.updated);
    EXPECT_TRUE(s1.update_frozen);
    EXPECT_DOUBLE_EQ(s1.alpha, s0.alpha);
    EXPECT_EQ(s1.tmpl.patch, s0.tmpl.patch);
    EXPECT_EQ(s1.tmpl.source_frame_index, 1);
}

TEST(Step, OutlierSceneSeparatesMetrics) {
    const auto scene = smrtest::make_outlier_scene();
    TrackerConfig cfg;
    cfg.search_radius = scene.radius;
    const auto smr = track_sequence(scene.frames, scene.truth, cfg);
    cfg.metric = Metric::SAD;
    const auto sad = track_sequence(scene.frames, scene.truth, cfg);
    ASSERT_EQ(smr.size(), 1u);
    EXPECT_EQ(smr[0].box, scene.truth);
    EXPECT_EQ(sad[0].box, scene.decoy);
}

TEST(Step, DimensionMismatch) {
    const auto frame = textured(20, 20, 8);
    const auto s0 = init_tracker(frame, BBox{5, 5, 4, 4}, TrackerConfig{});
    EXPECT_SMR_ERROR(step(s0, textured(21, 20, 8), TrackerConfig{}), ErrorCode::Dimension, "21x20");
}

TEST(TrackSequence, Boundaries) {
    const auto frame = textured(30, 30, 9);
    EXPECT_TRUE(track_sequence({frame}, BBox{5, 5, 6, 6}, TrackerConfig{}).empty());
    EXPECT_SMR_ERROR(track_sequence(std::vector<GrayFrame>{}, BBox{5, 5, 6, 6}, TrackerConfig{}),
                     ErrorCode::InvalidArgument, "no frames");

    const std::vector<GrayFrame> still(10, frame);
    const auto rs = track_sequence(still, BBox{5, 5, 6, 6}, TrackerConfig{});
    ASSERT_EQ(rs.size(), 9u);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(rs[i].frame_index, static_cast<long long>(i + 2));
        EXPECT_EQ(rs[i].box, (BBox{5, 5, 6, 6}));
        EXPECT_DOUBLE_EQ(rs[i].score, 36.0);
    }
}

TEST(TrackSequence, ErrorsCarryFrameIndex) {
    std::vector<GrayFrame> frames{textured(30, 30, 1), textured(30, 30, 2), textured(31, 30, 3)};
    EXPECT_SMR_ERROR(track_sequence(frames, BBox{5, 5, 6, 6}, TrackerConfig{}), ErrorCode::Dimension, "frame 3:");
    EXPECT_SMR_ERROR(track_sequence(frames, BBox{28, 5, 6, 6}, TrackerConfig{}), ErrorCode::Bounds, "frame 1:");
}

TEST(TrackSequence, ConstantVelocitySquareFollowsTruth) {
    SynthSpec spec;
    spec.width = 80;
    spec.height = 60;
    spec.length = 12;
    spec.background = 30;
    spec.target = BBox{6, 8, 10, 10};
    spec.target_pattern = pattern::Checker{2, 120, 230};
    spec.motion = motion::Constant{2, 1};
    const auto seq = generate(spec);
    TrackerConfig cfg;
    cfg.search_radius = 5;
    const auto rs = track_sequence(seq.frames, seq.init_box, cfg);
    ASSERT_EQ(rs.size(), 11u);
    for (const auto& r : rs) EXPECT_EQ(r.box, spec.target_box(r.frame_index));
}

TEST(ResultsCsv, FormatAndParse) {
    const std::vector<TrackResult> rs{{2, BBox{-3, 4, 5, 6}, 12.5, true, 63.75}, {3, BBox{1, 2, 5, 6}, 0.0, false, 1.0}};
    const auto text = format_results_csv(rs);
    EXPECT_EQ(text,
              "frame_index,x,y,w,h,score,updated,alpha\n"
              "2,-3,4,5,6,12.500000,1,63.750000\n"
              "3,1,2,5,6,0.000000,0,1.000000\n");
    EXPECT_EQ(parse_results_csv(text), rs);
}

TEST(ResultsCsv, MalformedLinesNameTheLine) {
    const std::string head = "frame_index,x,y,w,h,score,updated,alpha\n";
    EXPECT_SMR_ERROR(parse_results_csv(head + "2,1,1,1,1,1.0,1\n"), ErrorCode::Parse, "line 2: expected 8 fields");
    EXPECT_SMR_ERROR(parse_results_csv(head + "2,1,1,1,1,1.0,1,1\n3,a,1,1,1,1,1,1\n"), ErrorCode::Parse, "line 3");
    EXPECT_SMR_ERROR(parse_results_csv(head + "2,1,1,1,1,1.0,2,1\n"), ErrorCode::Parse, "updated");
    EXPECT_SMR_ERROR(parse_results_csv(head + "3,1,1,1,1,1,1,1\n2,1,1,1,1,1,1,1\n"), ErrorCode::Parse, "increase");
}
