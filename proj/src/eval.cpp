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

#include "smrtrack/eval.hpp"

#include "smrtrack/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <set>

namespace smrtrack {

const TruthEntry* GroundTruth::find(long long frame_index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), frame_index,
                               [](const TruthEntry& e, long long idx) { return e.frame_index < idx; });
    return it != entries.end() && it->frame_index == frame_index ? &*it : nullptr;
}

std::optional<BBox> GroundTruth::first_box() const {
    for (const auto& e : entries)
        if (e.box) return e.box;
    return std::nullopt;
}

GroundTruth parse_ground_truth(const std::string& content) {
    GroundTruth truth;
    const auto all = text::lines(content);
    for (std::size_t n = 0; n < all.size(); ++n) {
        const auto line = text::trim(all[n]);
        const auto no = n + 1;
        if (line.empty() || line.front() == '#' || line.starts_with("frame_index")) continue;
        const auto f = text::split(line, ',');
        TruthEntry entry;
        entry.frame_index = text::parse_number<long long>(f[0], ErrorCode::Parse, "truth", no, "frame_index");
        const bool absent = f.size() >= 2 && std::all_of(f.begin() + 1, f.end(), [](std::string_view v) {
                                return v == "NaN" || v == "nan" || v == "NAN";
                            });
        if (!absent && f.size() == 5) {
            BBox b;
            b.x = text::parse_number<int>(f[1], ErrorCode::Parse, "truth", no, "x");
            b.y = text::parse_number<int>(f[2], ErrorCode::Parse, "truth", no, "y");
            b.w = text::parse_number<int>(f[3], ErrorCode::Parse, "truth", no, "w");
            b.h = text::parse_number<int>(f[4], ErrorCode::Parse, "truth", no, "h");
            if (b.w < 1 || b.h < 1)
                throw Error(ErrorCode::Parse, "truth: line " + std::to_string(no) + ": box size must be positive");
            entry.box = b;
        } else if (!absent) {
            throw Error(ErrorCode::Parse, "truth: line " + std::to_string(no) +
                                              ": expected frame_index,x,y,w,h or frame_index,NaN");
        }
        if (!truth.entries.empty() && entry.frame_index <= truth.entries.back().frame_index)
            throw Error(ErrorCode::Parse, "truth: line " + std::to_string(no) + ": frame indices must increase");
        truth.entries.push_back(entry);
    }
    return truth;
}

std::string format_ground_truth(const GroundTruth& truth) {
    std::string out;
    for (const auto& e : truth.entries) {
        out += std::to_string(e.frame_index);
        if (e.box)
            out += "," + std::to_string(e.box->x) + "," + std::to_string(e.box->y) + "," + std::to_string(e.box->w) +
                   "," + std::to_string(e.box->h) + "\n";
        else
            out += ",NaN\n";
    }
    return out;
}

double iou(const BBox& a, const BBox& b) noexcept {
    const long long ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
    const long long iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
    const long long inter = ix * iy;
    const long long uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string EvalReport::criterion() const { return "iou>=" + text::fixed6(iou_threshold); }

EvalReport evaluate(const std::vector<TrackResult>& results, const GroundTruth& truth, double iou_threshold) {
    std::set<long long> result_frames;
    for (const auto& r : results) result_frames.insert(r.frame_index);

    std::vector<long long> missing_results;
    for (std::size_t i = 0; i < truth.entries.size(); ++i) {
        const auto idx = truth.entries[i].frame_index;
        if (i == 0 && !result_frames.count(idx)) continue;  // initialization frame
        if (!result_frames.count(idx)) missing_results.push_back(idx);
    }
    std::vector<long long> missing_truth;
    for (const auto& r : results)
        if (!truth.find(r.frame_index)) missing_truth.push_back(r.frame_index);

    if (!missing_results.empty() || !missing_truth.empty()) {
        auto join = [](const std::vector<long long>& v) {
            std::string s;
            const std::size_t shown = std::min<std::size_t>(v.size(), 20);
            for (std::size_t i = 0; i < shown; ++i) s += (i ? " " : "") + std::to_string(v[i]);
            if (v.size() > shown) s += " ... (" + std::to_string(v.size()) + " total)";
            return s;
        };
        std::string msg = "frame index mismatch:";
        if (!missing_results.empty()) msg += " no result for frames [" + join(missing_results) + "]";
        if (!missing_truth.empty()) msg += " no ground truth for frames [" + join(missing_truth) + "]";
        throw Error(ErrorCode::InvalidArgument, msg);
    }

    EvalReport report;
    report.iou_threshold = iou_threshold;
    report.per_frame.reserve(results.size());
    for (const auto& r : results) {
        const TruthEntry* t = truth.find(r.frame_index);
        FrameIou row{r.frame_index, std::nullopt};
        if (t->box) {
            row.iou = iou(r.box, *t->box);
            ++report.total_evaluated;
            if (*row.iou >= iou_threshold) ++report.correctly_tracked;
        }
        report.per_frame.push_back(row);
    }
    return report;
}

std::string format_report_csv(const EvalReport& report) {
    std::string out = "frame_index,iou\n";
    for (const auto& row : report.per_frame)
        out += std::to_string(row.frame_index) + "," + (row.iou ? text::fixed6(*row.iou) : std::string("NaN")) + "\n";
    out += "summary," + std::to_string(report.correctly_tracked) + "," + std::to_string(report.total_evaluated) + "," +
           report.criterion() + "\n";
    return out;
}

EvalReport parse_report_csv(const std::string& content) {
    EvalReport report;
    bool have_summary = false;
    const auto all = text::lines(content);
    for (std::size_t n = 0; n < all.size(); ++n) {
        const auto line = text::trim(all[n]);
        const auto no = n + 1;
        if (line.empty() || line.starts_with("frame_index")) continue;
        const auto f = text::split(line, ',');
        if (f[0] == "summary") {
            if (f.size() != 4 || !f[3].starts_with("iou>="))
                throw Error(ErrorCode::Parse, "report: line " + std::to_string(no) + ": malformed summary");
            report.correctly_tracked = text::parse_number<long long>(f[1], ErrorCode::Parse, "report", no, "correct");
            report.total_evaluated = text::parse_number<long long>(f[2], ErrorCode::Parse, "report", no, "evaluated");
            report.iou_threshold =
                text::parse_number<double>(f[3].substr(5), ErrorCode::Parse, "report", no, "threshold");
            have_summary = true;
            continue;
        }
        if (f.size() != 2)
            throw Error(ErrorCode::Parse, "report: line " + std::to_string(no) + ": expected frame_index,iou");
        FrameIou row;
        row.frame_index = text::parse_number<long long>(f[0], ErrorCode::Parse, "report", no, "frame_index");
        if (f[1] != "NaN") row.iou = text::parse_number<double>(f[1], ErrorCode::Parse, "report", no, "iou");
        report.per_frame.push_back(row);
    }
    if (!have_summary) throw Error(ErrorCode::Parse, "report: missing summary line");
    return report;
}

void ComparisonTable::set(const std::string& tracker, const std::string& sequence, long long correctly_tracked) {
    if (std::find(trackers_.begin(), trackers_.end(), tracker) == trackers_.end()) trackers_.push_back(tracker);
    if (std::find(sequences_.begin(), sequences_.end(), sequence) == sequences_.end()) sequences_.push_back(sequence);
    cells_[{tracker, sequence}] = correctly_tracked;
}

void ComparisonTable::add(const std::string& tracker, const std::string& sequence, const EvalReport& report) {
    set(tracker, sequence, report.correctly_tracked);
}

std::optional<long long> ComparisonTable::cell(const std::string& tracker, const std::string& sequence) const {
    auto it = cells_.find({tracker, sequence});
    if (it == cells_.end()) return std::nullopt;
    return it->second;
}

std::string ComparisonTable::to_csv() const {
    std::string out = "tracker";
    for (const auto& s : sequences_) out += "," + s;
    out += "\n";
    for (const auto& t : trackers_) {
        out += t;
        for (const auto& s : sequences_) {
            auto v = cell(t, s);
            out += "," + (v ? std::to_string(*v) : std::string("n/a"));
        }
        out += "\n";
    }
    return out;
}

std::string ComparisonTable::to_text() const {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"tracker"});
    for (const auto& s : sequences_) rows[0].push_back(s);
    for (const auto& t : trackers_) {
        std::vector<std::string> row{t};
        for (const auto& s : sequences_) {
            auto v = cell(t, s);
            row.push_back(v ? std::to_string(*v) : "n/a");
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> widths(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());

    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string pad(widths[c] - row[c].size(), ' ');
            // names left-aligned, counts right-aligned
            out += c == 0 ? row[c] + pad : "  " + pad + row[c];
        }
        out += "\n";
    }
    return out;
}

ComparisonTable compare(const std::vector<NamedReport>& reports) {
    if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "compare needs at least one report");
    ComparisonTable table;
    for (const auto& r : reports) table.add(r.tracker, r.sequence, r.report);
    return table;
}

}  // namespace smrtrack
