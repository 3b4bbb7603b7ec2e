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

#include "smrtrack/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <sstream>

namespace smrtrack {

void TrackerConfig::validate() const {
    if (!(k > 0.0)) throw Error(ErrorCode::Config, "k must be > 0 (got " + text::fixed6(k) + ")");
    if (search_radius < 0) throw Error(ErrorCode::Config, "search_radius must be >= 0");
    if (!(alpha_min >= 0.0)) throw Error(ErrorCode::Config, "alpha_min must be >= 0");
    if (!(alpha0 >= alpha_min))
        throw Error(ErrorCode::Config,
                    "alpha0 (" + text::fixed6(alpha0) + ") must be >= alpha_min (" + text::fixed6(alpha_min) + ")");
    if (!(beta > 0.0)) throw Error(ErrorCode::Config, "beta must be > 0");
}

TrackerConfig parse_config(const std::string& content, TrackerConfig config) {
    const auto all = text::lines(content);
    for (std::size_t n = 0; n < all.size(); ++n) {
        std::string_view line = all[n];
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::Config, "config: line " + std::to_string(n + 1) + ": expected key=value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string_view value = text::trim(line.substr(eq + 1));
        const auto line_no = n + 1;
        if (key == "k") {
            config.k = text::parse_number<double>(value, ErrorCode::Config, "config", line_no, "k");
        } else if (key == "search_radius") {
            config.search_radius = text::parse_number<int>(value, ErrorCode::Config, "config", line_no, "search_radius");
        } else if (key == "alpha0") {
            config.alpha0 = text::parse_number<double>(value, ErrorCode::Config, "config", line_no, "alpha0");
        } else if (key == "alpha_min") {
            config.alpha_min = text::parse_number<double>(value, ErrorCode::Config, "config", line_no, "alpha_min");
        } else if (key == "beta") {
            config.beta = text::parse_number<double>(value, ErrorCode::Config, "config", line_no, "beta");
        } else if (key == "metric") {
            try {
                config.metric = parse_metric(std::string(value));
            } catch (const Error& e) {
                throw Error(ErrorCode::Config, "config: line " + std::to_string(line_no) + ": " + e.what());
            }
        } else {
            throw Error(ErrorCode::Config, "config: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return config;
}

TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base) {
    const auto bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()), base);
}

std::string format_config(const TrackerConfig& c) {
    std::ostringstream out;
    out << "k=" << text::fixed6(c.k) << "\n"
        << "search_radius=" << c.search_radius << "\n"
        << "alpha0=" << text::fixed6(c.alpha0) << "\n"
        << "alpha_min=" << text::fixed6(c.alpha_min) << "\n"
        << "beta=" << text::fixed6(c.beta) << "\n"
        << "metric=" << to_string(c.metric) << "\n";
    return out.str();
}

int padding_margin(const TrackerConfig& config, const BBox& box) noexcept {
    return config.search_radius + std::max(box.w, box.h);
}

TrackerState init_tracker(const GrayFrame& first_frame, const BBox& init_box, const TrackerConfig& config) {
    config.validate();
    TrackerState state;
    state.tmpl = Template{extract_patch(first_frame, init_box), 1};
    state.alpha = config.alpha0;
    state.margin = padding_margin(config, init_box);
    state.position = init_box.shifted(state.margin, state.margin);
    state.update_frozen = false;
    state.frame_index = 1;
    state.frame_width = first_frame.width();
    state.frame_height = first_frame.height();
    return state;
}

std::pair<TrackerState, TrackResult> step(const TrackerState& state, const GrayFrame& frame,
                                          const TrackerConfig& config) {
    if (frame.width() != state.frame_width || frame.height() != state.frame_height)
        throw Error(ErrorCode::Dimension, "frame is " + std::to_string(frame.width()) + "x" +
                                              std::to_string(frame.height()) + ", sequence is " +
                                              std::to_string(state.frame_width) + "x" +
                                              std::to_string(state.frame_height));
    const int m = state.margin;
    const GrayFrame padded = pad_frame(frame, m);
    const ScoreMap map =
        search(padded, state.tmpl, state.position,
               SearchParams{config.search_radius, state.alpha, config.beta, config.metric});

    TrackerState next = state;
    next.frame_index = state.frame_index + 1;
    BBox moved = state.position.shifted(map.best_offset.dx, map.best_offset.dy);
    // Keep the box within one box-size of the frame so the next window stays inside the padding.
    const int w = moved.w, h = moved.h;
    moved.x = std::clamp(moved.x, m - w, m + frame.width());
    moved.y = std::clamp(moved.y, m - h, m + frame.height());
    next.position = moved;

    const BBox original = moved.shifted(-m, -m);
    TrackResult result;
    result.frame_index = next.frame_index;
    result.box = original;
    result.score = map.best_score;
    result.alpha_used = state.alpha;

    if (frame.contains(original)) {
        Template fresh{extract_patch(frame, original), next.frame_index};
        next.alpha = dynamic_alpha(state.tmpl, fresh, config.k, config.alpha_min);
        next.tmpl = std::move(fresh);
        next.update_frozen = false;
        result.updated = true;
    } else {
        next.update_frozen = true;
        result.updated = false;
    }
    return {std::move(next), result};
}

std::vector<TrackResult> track_sequence(const std::vector<GrayFrame>& frames, const BBox& init_box,
                                        const TrackerConfig& config) {
    return track_sequence(
        frames.size(), [&](std::size_t i) -> const GrayFrame& { return frames[i]; }, init_box, config);
}

std::vector<TrackResult> track_sequence(std::size_t count,
                                        const std::function<const GrayFrame&(std::size_t)>& frame_at,
                                        const BBox& init_box, const TrackerConfig& config) {
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "sequence has no frames");
    TrackerState state;
    try {
        state = init_tracker(frame_at(0), init_box, config);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("frame 1: ") + e.what());
    }
    std::vector<TrackResult> results;
    results.reserve(count - 1);
    for (std::size_t i = 1; i < count; ++i) {
        try {
            auto [next, result] = step(state, frame_at(i), config);
            state = std::move(next);
            results.push_back(result);
        } catch (const Error& e) {
            throw Error(e.code(), "frame " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return results;
}

std::string format_results_csv(const std::vector<TrackResult>& results) {
    std::string out = "frame_index,x,y,w,h,score,updated,alpha\n";
    for (const auto& r : results) {
        out += std::to_string(r.frame_index) + "," + std::to_string(r.box.x) + "," + std::to_string(r.box.y) + "," +
               std::to_string(r.box.w) + "," + std::to_string(r.box.h) + "," + text::fixed6(r.score) + "," +
               (r.updated ? "1" : "0") + "," + text::fixed6(r.alpha_used) + "\n";
    }
    return out;
}

std::vector<TrackResult> parse_results_csv(const std::string& content) {
    std::vector<TrackResult> results;
    const auto all = text::lines(content);
    for (std::size_t n = 0; n < all.size(); ++n) {
        const auto line = text::trim(all[n]);
        const auto no = n + 1;
        if (line.empty() || line.front() == '#') continue;
        if (line.starts_with("frame_index")) continue;
        const auto f = text::split(line, ',');
        if (f.size() != 8)
            throw Error(ErrorCode::Parse, "results: line " + std::to_string(no) + ": expected 8 fields, got " +
                                              std::to_string(f.size()));
        TrackResult r;
        r.frame_index = text::parse_number<long long>(f[0], ErrorCode::Parse, "results", no, "frame_index");
        r.box.x = text::parse_number<int>(f[1], ErrorCode::Parse, "results", no, "x");
        r.box.y = text::parse_number<int>(f[2], ErrorCode::Parse, "results", no, "y");
        r.box.w = text::parse_number<int>(f[3], ErrorCode::Parse, "results", no, "w");
        r.box.h = text::parse_number<int>(f[4], ErrorCode::Parse, "results", no, "h");
        r.score = text::parse_number<double>(f[5], ErrorCode::Parse, "results", no, "score");
        const int updated = text::parse_number<int>(f[6], ErrorCode::Parse, "results", no, "updated");
        if (updated != 0 && updated != 1)
            throw Error(ErrorCode::Parse, "results: line " + std::to_string(no) + ": updated must be 0 or 1");
        r.updated = updated == 1;
        r.alpha_used = text::parse_number<double>(f[7], ErrorCode::Parse, "results", no, "alpha");
        if (r.box.w < 1 || r.box.h < 1)
            throw Error(ErrorCode::Parse, "results: line " + std::to_string(no) + ": box size must be positive");
        if (!results.empty() && r.frame_index <= results.back().frame_index)
            throw Error(ErrorCode::Parse, "results: line " + std::to_string(no) + ": frame indices must increase");
        results.push_back(r);
    }
    return results;
}

}  // namespace smrtrack
