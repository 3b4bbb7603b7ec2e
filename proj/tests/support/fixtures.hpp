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

// Constructed scenes shared by the unit, integration and acceptance tests.

#pragma once

#include "smrtrack/eval.hpp"
#include "smrtrack/imaging.hpp"
#include "smrtrack/synth.hpp"
#include "smrtrack/tracker.hpp"

#include <string>
#include <vector>

namespace smrtest {

// Two frames. Frame 1 holds a textured 16x16 template at `truth`. In frame 2
// the template stays at `truth` but a quarter of it is overwritten with
// values far outside any threshold, and a uniformly brightened copy of the
// template (every pixel +30) sits at `decoy`. SAD prefers the decoy, SMR the
// partially corrupted true location.
struct OutlierScene {
    std::vector<smrtrack::GrayFrame> frames;
    smrtrack::BBox truth;
    smrtrack::BBox decoy;
    int radius = 0;
};
OutlierScene make_outlier_scene();

// Textured target drifting right at 3 px/frame until it has left the frame.
smrtrack::SynthSpec exit_spec();

// Static textured target crossed by a slow, larger uniform occluder that keeps
// moving after it has passed.
smrtrack::SynthSpec slow_occlusion_spec();

// 320x240, 100 frames, 32x32 textured target at constant (+2, +1) px/frame
// over a checkered background with light sensor noise.
smrtrack::SynthSpec translation_spec();

// Truth entries 2..4 (exact match, 1/3 overlap, absent) and matching results.
struct ThreeFrameEval {
    smrtrack::GroundTruth truth;
    std::vector<smrtrack::TrackResult> results;
};
ThreeFrameEval make_three_frame_eval();

// Text of a synth spec for the CLI: small noisy scene with a short occlusion.
std::string cli_scene_text();

}  // namespace smrtest
