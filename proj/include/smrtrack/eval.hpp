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
#include "smrtrack/tracker.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace smrtrack {

struct TruthEntry {
    long long frame_index = 0;
    std::optional<BBox> box;  // empty: target occluded or out of view

    friend bool operator==(const TruthEntry&, const TruthEntry&) = default;
};

/// Per-frame annotation with strictly increasing frame indices.
struct GroundTruth {
    std::vector<TruthEntry> entries;

    const TruthEntry* find(long long frame_index) const;
    /// First present box, used as the tracker's initial box.
    std::optional<BBox> first_box() const;
};

// "frame_index,x,y,w,h" or "frame_index,NaN".
GroundTruth parse_ground_truth(const std::string& text);
std::string format_ground_truth(const GroundTruth& truth);

double iou(const BBox& a, const BBox& b) noexcept;

struct FrameIou {
    long long frame_index = 0;
    std::optional<double> iou;
};

struct EvalReport {
    long long correctly_tracked = 0;
    long long total_evaluated = 0;
    double iou_threshold = 0.5;
    std::vector<FrameIou> per_frame;

    std::string criterion() const;
};

/// A frame is correct when its truth box exists and IoU >= iou_threshold.
/// The first truth frame may lack a result (it initialized the tracker); every
/// other frame must appear on both sides, otherwise InvalidArgument is thrown
/// listing the missing frames.
EvalReport evaluate(const std::vector<TrackResult>& results, const GroundTruth& truth, double iou_threshold = 0.5);

// Header "frame_index,iou", one row per frame (NaN when absent), then
// "summary,<correct>,<evaluated>,<criterion>".
std::string format_report_csv(const EvalReport& report);
EvalReport parse_report_csv(const std::string& text);

/// Correctly-tracked counts, rows = trackers, columns = sequences, both in
/// first-seen order. Missing cells print as "n/a".
class ComparisonTable {
public:
    void add(const std::string& tracker, const std::string& sequence, const EvalReport& report);
    void set(const std::string& tracker, const std::string& sequence, long long correctly_tracked);

    const std::vector<std::string>& trackers() const noexcept { return trackers_; }
    const std::vector<std::string>& sequences() const noexcept { return sequences_; }
    std::optional<long long> cell(const std::string& tracker, const std::string& sequence) const;

    std::string to_csv() const;
    std::string to_text() const;

private:
    std::vector<std::string> trackers_;
    std::vector<std::string> sequences_;
    std::map<std::pair<std::string, std::string>, long long> cells_;
};

struct NamedReport {
    std::string tracker;
    std::string sequence;
    EvalReport report;
};

/// Throws InvalidArgument on an empty list.
ComparisonTable compare(const std::vector<NamedReport>& reports);

}  // namespace smrtrack
