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

#include "fixtures.hpp"

#include "oracle.hpp"

#include <random>

namespace smrtest {

using namespace smrtrack;

OutlierScene make_outlier_scene() {
    OutlierScene s;
    s.truth = BBox{24, 24, 16, 16};
    s.decoy = BBox{44, 26, 16, 16};
    s.radius = 20;

    std::mt19937_64 rng(0x5EEDu);
    const GrayFrame tmpl = random_frame(rng, 16, 16, 60, 190);

    GrayFrame first(96, 64, 0);
    GrayFrame second(96, 64, 0);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const int v = tmpl.at(x, y);
            first.at(s.truth.x + x, s.truth.y + y) = static_cast<std::uint8_t>(v);
            // Top-left quadrant pushed at least 65 levels away: beyond the initial threshold.
            const bool corrupt = x < 8 && y < 8;
            second.at(s.truth.x + x, s.truth.y + y) = static_cast<std::uint8_t>(corrupt ? (v < 128 ? 255 : 0) : v);
            second.at(s.decoy.x + x, s.decoy.y + y) = static_cast<std::uint8_t>(v + 30);
        }
    }
    s.frames = {std::move(first), std::move(second)};
    return s;
}

SynthSpec exit_spec() {
    SynthSpec spec;
    spec.width = 160;
    spec.height = 80;
    spec.length = 21;  // the box reaches x == width on the last frame
    spec.background = 40;
    spec.seed = 11;
    spec.target = BBox{100, 30, 20, 20};
    spec.target_pattern = pattern::Noise{100, 255, 11};
    spec.motion = motion::Constant{3, 0};
    return spec;
}

SynthSpec slow_occlusion_spec() {
    SynthSpec spec;
    spec.width = 200;
    spec.height = 120;
    spec.length = 160;
    spec.background = 90;
    spec.seed = 5;
    spec.target = BBox{80, 44, 32, 32};
    spec.target_pattern = pattern::Noise{120, 255, 5};
    spec.motion = motion::Constant{0, 0};
    // Enters the target at frame 3 and clears it at frame 83, at 1 px/frame.
    spec.perturbations.push_back(Perturbation{1, 160, effect::Occluder{BBox{30, 36, 48, 48}, 1, 0, 20}});
    return spec;
}

SynthSpec translation_spec() {
    SynthSpec spec;
    spec.width = 320;
    spec.height = 240;
    spec.length = 100;
    spec.background = 100;
    spec.seed = 3;
    spec.target = BBox{20, 40, 32, 32};
    spec.target_pattern = pattern::Noise{0, 255, 3};
    spec.motion = motion::Constant{2, 1};
    spec.perturbations.push_back(Perturbation{1, 100, effect::ContrastBackground{pattern::Checker{8, 70, 130}}});
    spec.perturbations.push_back(Perturbation{1, 100, effect::Noise{99, 2}});
    return spec;
}

ThreeFrameEval make_three_frame_eval() {
    ThreeFrameEval f;
    const BBox box{0, 0, 10, 10};
    f.truth.entries = {TruthEntry{2, box}, TruthEntry{3, box}, TruthEntry{4, std::nullopt}};
    f.results = {TrackResult{2, box, 100.0, true, 1.0}, TrackResult{3, BBox{5, 0, 10, 10}, 50.0, true, 1.0},
                 TrackResult{4, box, 100.0, true, 1.0}};
    return f;
}

std::string cli_scene_text() {
    return "# small textured target with a passing occluder\n"
           "width=96\n"
           "height=72\n"
           "length=24\n"
           "background=80\n"
           "seed=21\n"
           "target_size=16 16\n"
           "target_position=10 20\n"
           "target_pattern=noise 0 255\n"
           "motion=constant 2 1\n"
           "event=noise 1 24 7 2\n"
           "event=occluder 8 10 30 20 24 24 0 0 220\n";
}

}  // namespace smrtest
