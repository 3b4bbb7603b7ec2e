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

#pragma once

#include "smrtrack/eval.hpp"
#include "smrtrack/imaging.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace smrtrack {

/// SplitMix64. Part of the fixture format: the same seed must give the same
/// frames in any implementation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [lo, hi] by modulo reduction.
    int uniform(int lo, int hi) noexcept {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

namespace pattern {
struct Solid {
    int value = 255;
};
struct Checker {
    int cell = 4;
    int a = 0;
    int b = 255;
};
struct Stripes {  // vertical stripes
    int period = 4;
    int a = 0;
    int b = 255;
};
struct Noise {  // static texture drawn from `seed`
    int lo = 0;
    int hi = 255;
    std::uint64_t seed = 0;
};
}  // namespace pattern

using Pattern = std::variant<pattern::Solid, pattern::Checker, pattern::Stripes, pattern::Noise>;

namespace motion {
struct Constant {
    int dx = 0;
    int dy = 0;
};
struct Segment {
    long long from_frame = 2;
    int dx = 0;
    int dy = 0;
};
struct Piecewise {  // displacement per frame switches at each segment's from_frame
    std::vector<Segment> segments;
};
struct Scripted {  // displacement applied at frames 2..length, one entry each
    std::vector<std::pair<int, int>> steps;
};
}  // namespace motion

using Motion = std::variant<motion::Constant, motion::Piecewise, motion::Scripted>;

namespace effect {
struct Noise {
    std::uint64_t seed = 0;
    int amplitude = 0;
};
struct Occluder {  // box at frame t is (x, y) + (t - first) * (vx, vy)
    BBox box;
    int vx = 0;
    int vy = 0;
    int intensity = 0;
};
struct AppearanceChange {  // region relative to the target's top-left
    BBox region;
    int intensity = 0;
};
struct ContrastBackground {
    Pattern pattern;
};
}  // namespace effect

using Effect = std::variant<effect::Noise, effect::Occluder, effect::AppearanceChange, effect::ContrastBackground>;

struct Perturbation {
    long long first_frame = 1;  // inclusive, 1-based
    long long last_frame = 1;
    Effect effect;
};

struct SynthSpec {
    int width = 64;
    int height = 64;
    long long length = 1;
    int background = 0;
    std::uint64_t seed = 0;
    BBox target{0, 0, 8, 8};  // position at frame 1 and size
    Pattern target_pattern = pattern::Solid{255};
    Motion motion = motion::Constant{};
    std::vector<Perturbation> perturbations;

    /// Throws Config describing the first violated constraint.
    void validate() const;

    /// Scripted target box at 1-based frame t.
    BBox target_box(long long frame) const;
};

struct SynthSequence {
    std::vector<GrayFrame> frames;
    GroundTruth truth;
    BBox init_box;  // scripted box at frame 1, present even if occluded
};

/// Target coverage by occluders at or above this fraction marks truth absent.
inline constexpr double kAbsentCoverage = 0.9;

/// Renders background, target, then perturbations in list order.
SynthSequence generate(const SynthSpec& spec);

/// Flat text format: key=value lines plus one "event=..." line per perturbation.
SynthSpec parse_synth_spec(const std::string& text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Writes 00001.pgm.. plus truth.csv and init.txt ("x y w h" of frame 1).
void write_synth_sequence(const SynthSequence& seq, const std::filesystem::path& dir);

}  // namespace smrtrack
