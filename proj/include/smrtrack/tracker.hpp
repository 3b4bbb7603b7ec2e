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

#include "smrtrack/imaging.hpp"
#include "smrtrack/matching.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace smrtrack {

struct TrackerConfig {
    double k = 0.25;
    int search_radius = 20;
    double alpha0 = 63.75;  // 0.25 * 255
    double alpha_min = 1.0;
    double beta = 1.0;
    Metric metric = Metric::SMR;

    /// Throws Config on k <= 0, radius < 0, alpha0 < alpha_min, alpha_min < 0 or beta <= 0.
    void validate() const;

    friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

/// Applies "key=value" lines (keys are the field names; '#' starts a comment)
/// on top of `base`. Unknown keys and bad values throw Config with the line number.
TrackerConfig parse_config(const std::string& text, TrackerConfig base = {});
TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base = {});
std::string format_config(const TrackerConfig& config);

struct TrackerState {
    Template tmpl;
    double alpha = 0.0;
    BBox position;  // padded coordinates
    bool update_frozen = false;
    long long frame_index = 1;
    int margin = 0;
    int frame_width = 0;
    int frame_height = 0;
};

struct TrackResult {
    long long frame_index = 0;
    BBox box;  // original frame coordinates, may overhang
    double score = 0.0;
    bool updated = false;
    double alpha_used = 0.0;

    friend bool operator==(const TrackResult&, const TrackResult&) = default;
};

/// Zero-border width used for every frame: search_radius + max(w, h).
int padding_margin(const TrackerConfig& config, const BBox& box) noexcept;

TrackerState init_tracker(const GrayFrame& first_frame, const BBox& init_box, const TrackerConfig& config);

/// One detection on `frame`: padded search, move, then either refresh the
/// template and alpha or, if the new box overhangs the frame, freeze both.
std::pair<TrackerState, TrackResult> step(const TrackerState& state, const GrayFrame& frame,
                                          const TrackerConfig& config);

/// init on frames[0], step on the rest. Result frame indices are 1-based
/// positions in `frames`, so the first result is frame 2.
std::vector<TrackResult> track_sequence(const std::vector<GrayFrame>& frames, const BBox& init_box,
                                        const TrackerConfig& config);

/// Same, for frames held elsewhere: frame_at(i) for i in [0, count).
std::vector<TrackResult> track_sequence(std::size_t count,
                                        const std::function<const GrayFrame&(std::size_t)>& frame_at,
                                        const BBox& init_box, const TrackerConfig& config);

// Results CSV: header "frame_index,x,y,w,h,score,updated,alpha", fixed 6 decimals.
std::string format_results_csv(const std::vector<TrackResult>& results);
std::vector<TrackResult> parse_results_csv(const std::string& text);

}  // namespace smrtrack
