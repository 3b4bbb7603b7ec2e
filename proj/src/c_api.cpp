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

#include "smr.h"

#include "smrtrack/error.hpp"
#include "smrtrack/eval.hpp"
#include "smrtrack/imaging.hpp"
#include "smrtrack/matching.hpp"
#include "smrtrack/synth.hpp"
#include "smrtrack/tracker.hpp"
#include "smrtrack/version.hpp"

#include <cstring>
#include <new>
#include <string>

using namespace smrtrack;

struct smr_frame {
    GrayFrame frame;
};
struct smr_sequence {
    std::vector<smr_frame> frames;
};
struct smr_tracker {
    TrackerState state;
    TrackerConfig config;
};
struct smr_results {
    std::vector<TrackResult> results;
};
struct smr_truth {
    GroundTruth truth;
};
struct smr_report {
    EvalReport report;
};
struct smr_table {
    ComparisonTable table;
};
struct smr_synth {
    SynthSpec spec;
};

namespace {

thread_local std::string g_last_error;

smr_status fail(smr_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
smr_status guarded(F&& body) noexcept {
    try {
        body();
        g_last_error.clear();
        return SMR_OK;
    } catch (const Error& e) {
        return fail(static_cast<smr_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SMR_ERR_INTERNAL, "out of memory");
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(SMR_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(SMR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SMR_ERR_INTERNAL, "unknown failure");
    }
}

#define SMR_REQUIRE(cond, what)                                             \
    do {                                                                    \
        if (!(cond)) return fail(SMR_ERR_INVALID_ARGUMENT, what " is null"); \
    } while (0)

BBox to_box(smr_box b) { return {b.x, b.y, b.w, b.h}; }
smr_box from_box(const BBox& b) { return {b.x, b.y, b.w, b.h}; }

TrackerConfig to_config(const smr_config& c) {
    TrackerConfig out;
    out.k = c.k;
    out.search_radius = c.search_radius;
    out.alpha0 = c.alpha0;
    out.alpha_min = c.alpha_min;
    out.beta = c.beta;
    out.metric = c.metric == SMR_METRIC_SAD ? Metric::SAD : Metric::SMR;
    return out;
}

smr_config from_config(const TrackerConfig& c) {
    return {c.k, c.search_radius, c.alpha0, c.alpha_min, c.beta,
            c.metric == Metric::SAD ? SMR_METRIC_SAD : SMR_METRIC_SMR};
}

smr_track_result from_result(const TrackResult& r) {
    return {r.frame_index, from_box(r.box), r.score, r.updated ? 1 : 0, r.alpha_used};
}

Template as_template(const smr_frame* f) { return Template{f->frame, 0}; }

}  // namespace

extern "C" {

const char* smr_version(void) { return SMRTRACK_VERSION; }

const char* smr_last_error(void) { return g_last_error.c_str(); }

const char* smr_status_string(smr_status status) {
    switch (status) {
        case SMR_OK: return "ok";
        case SMR_ERR_INTERNAL: return "internal error";
        default: return to_string(static_cast<ErrorCode>(status));
    }
}

void smr_set_max_threads(uint32_t threads) { set_max_threads(threads); }

// --- config

void smr_config_default(smr_config* out) {
    if (out) *out = from_config(TrackerConfig{});
}

smr_status smr_config_validate(const smr_config* config) {
    SMR_REQUIRE(config, "config");
    return guarded([&] { to_config(*config).validate(); });
}

smr_status smr_config_load(const char* path, smr_config* config) {
    SMR_REQUIRE(path, "path");
    SMR_REQUIRE(config, "config");
    return guarded([&] { *config = from_config(load_config(path, to_config(*config))); });
}

smr_status smr_metric_parse(const char* name, smr_metric* out) {
    SMR_REQUIRE(name, "name");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = parse_metric(name) == Metric::SAD ? SMR_METRIC_SAD : SMR_METRIC_SMR; });
}

// --- frames

smr_status smr_frame_create(int32_t width, int32_t height, const uint8_t* pixels, smr_frame** out) {
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        GrayFrame f(width, height, 0);
        if (pixels) std::memcpy(f.pixels().data(), pixels, f.size());
        *out = new smr_frame{std::move(f)};
    });
}

smr_status smr_frame_decode(const uint8_t* bytes, size_t size, smr_frame** out) {
    SMR_REQUIRE(bytes, "bytes");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_frame{decode_image({bytes, size})}; });
}

smr_status smr_frame_load(const char* path, smr_frame** out) {
    SMR_REQUIRE(path, "path");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_frame{load_frame(path)}; });
}

smr_status smr_frame_write_pgm(const smr_frame* frame, const char* path) {
    SMR_REQUIRE(frame, "frame");
    SMR_REQUIRE(path, "path");
    return guarded([&] { save_pgm(frame->frame, path); });
}

int32_t smr_frame_width(const smr_frame* frame) { return frame ? frame->frame.width() : 0; }
int32_t smr_frame_height(const smr_frame* frame) { return frame ? frame->frame.height() : 0; }
const uint8_t* smr_frame_pixels(const smr_frame* frame) { return frame ? frame->frame.pixels().data() : nullptr; }

smr_status smr_frame_pad(const smr_frame* frame, int32_t margin, smr_frame** out) {
    SMR_REQUIRE(frame, "frame");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_frame{pad_frame(frame->frame, margin)}; });
}

smr_status smr_frame_crop(const smr_frame* frame, smr_box box, smr_frame** out) {
    SMR_REQUIRE(frame, "frame");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_frame{extract_patch(frame->frame, to_box(box))}; });
}

void smr_frame_destroy(smr_frame* frame) { delete frame; }

smr_status smr_sequence_load(const char* dir, smr_sequence** out) {
    SMR_REQUIRE(dir, "dir");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        auto frames = load_sequence(dir);
        auto* seq = new smr_sequence;
        seq->frames.reserve(frames.size());
        for (auto& f : frames) seq->frames.push_back(smr_frame{std::move(f)});
        *out = seq;
    });
}

size_t smr_sequence_size(const smr_sequence* seq) { return seq ? seq->frames.size() : 0; }

const smr_frame* smr_sequence_frame(const smr_sequence* seq, size_t index) {
    if (!seq || index >= seq->frames.size()) return nullptr;
    return &seq->frames[index];
}

void smr_sequence_destroy(smr_sequence* seq) { delete seq; }

// --- matching

smr_status smr_score_smr(const smr_frame* patch, const smr_frame* tmpl, double alpha, double beta, double* out) {
    SMR_REQUIRE(patch, "patch");
    SMR_REQUIRE(tmpl, "tmpl");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = smr_score(patch->frame, as_template(tmpl), alpha, beta); });
}

smr_status smr_score_sad(const smr_frame* patch, const smr_frame* tmpl, int64_t* out) {
    SMR_REQUIRE(patch, "patch");
    SMR_REQUIRE(tmpl, "tmpl");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = sad_score(patch->frame, as_template(tmpl)); });
}

smr_status smr_dynamic_alpha(const smr_frame* old_tmpl, const smr_frame* new_tmpl, double k, double alpha_min,
                             double* out) {
    SMR_REQUIRE(old_tmpl, "old_tmpl");
    SMR_REQUIRE(new_tmpl, "new_tmpl");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = dynamic_alpha(as_template(old_tmpl), as_template(new_tmpl), k, alpha_min); });
}

smr_status smr_search(const smr_frame* frame, const smr_frame* tmpl, smr_box prev, int32_t radius, double alpha,
                      double beta, smr_metric metric, int32_t* best_dx, int32_t* best_dy, double* best_score,
                      double* scores, size_t scores_capacity) {
    SMR_REQUIRE(frame, "frame");
    SMR_REQUIRE(tmpl, "tmpl");
    return guarded([&] {
        const auto map = search(frame->frame, as_template(tmpl), to_box(prev),
                                SearchParams{radius, alpha, beta, metric == SMR_METRIC_SAD ? Metric::SAD : Metric::SMR});
        if (scores) {
            if (scores_capacity < map.scores.size())
                throw Error(ErrorCode::InvalidArgument, "scores buffer needs " + std::to_string(map.scores.size()) +
                                                            " entries");
            std::copy(map.scores.begin(), map.scores.end(), scores);
        }
        if (best_dx) *best_dx = map.best_offset.dx;
        if (best_dy) *best_dy = map.best_offset.dy;
        if (best_score) *best_score = map.best_score;
    });
}

smr_status smr_diff_map(const smr_frame* patch, const smr_frame* tmpl, smr_frame** out) {
    SMR_REQUIRE(patch, "patch");
    SMR_REQUIRE(tmpl, "tmpl");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_frame{diff_map(patch->frame, as_template(tmpl))}; });
}

smr_status smr_histogram_write_csv(const smr_frame* map, int32_t bin_width, const char* path) {
    SMR_REQUIRE(map, "map");
    SMR_REQUIRE(path, "path");
    return guarded([&] {
        std::string csv = "bin_lower,count\n";
        for (const auto& bin : diff_histogram(map->frame, bin_width))
            csv += std::to_string(bin.lower) + "," + std::to_string(bin.count) + "\n";
        write_file_atomic(path, csv);
    });
}

// --- tracking

smr_status smr_tracker_create(const smr_frame* first_frame, smr_box init_box, const smr_config* config,
                              smr_tracker** out) {
    SMR_REQUIRE(first_frame, "first_frame");
    SMR_REQUIRE(config, "config");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        const TrackerConfig cfg = to_config(*config);
        *out = new smr_tracker{init_tracker(first_frame->frame, to_box(init_box), cfg), cfg};
    });
}

smr_status smr_tracker_step(smr_tracker* tracker, const smr_frame* frame, smr_track_result* out) {
    SMR_REQUIRE(tracker, "tracker");
    SMR_REQUIRE(frame, "frame");
    return guarded([&] {
        auto [next, result] = step(tracker->state, frame->frame, tracker->config);
        tracker->state = std::move(next);
        if (out) *out = from_result(result);
    });
}

double smr_tracker_alpha(const smr_tracker* tracker) { return tracker ? tracker->state.alpha : 0.0; }

void smr_tracker_destroy(smr_tracker* tracker) { delete tracker; }

smr_status smr_track_sequence(const smr_sequence* seq, smr_box init_box, const smr_config* config,
                              smr_results** out) {
    SMR_REQUIRE(seq, "seq");
    SMR_REQUIRE(config, "config");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        auto frame_at = [&](std::size_t i) -> const GrayFrame& { return seq->frames[i].frame; };
        *out = new smr_results{track_sequence(seq->frames.size(), frame_at, to_box(init_box), to_config(*config))};
    });
}

size_t smr_results_size(const smr_results* results) { return results ? results->results.size() : 0; }

smr_status smr_results_get(const smr_results* results, size_t index, smr_track_result* out) {
    SMR_REQUIRE(results, "results");
    SMR_REQUIRE(out, "out");
    if (index >= results->results.size()) return fail(SMR_ERR_INVALID_ARGUMENT, "result index out of range");
    *out = from_result(results->results[index]);
    return SMR_OK;
}

smr_status smr_results_write_csv(const smr_results* results, const char* path) {
    SMR_REQUIRE(results, "results");
    SMR_REQUIRE(path, "path");
    return guarded([&] { write_file_atomic(path, format_results_csv(results->results)); });
}

smr_status smr_results_read_csv(const char* path, smr_results** out) {
    SMR_REQUIRE(path, "path");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        const auto bytes = read_file(path);
        *out = new smr_results{parse_results_csv(std::string(bytes.begin(), bytes.end()))};
    });
}

void smr_results_destroy(smr_results* results) { delete results; }

// --- evaluation

double smr_iou(smr_box a, smr_box b) { return iou(to_box(a), to_box(b)); }

smr_status smr_truth_read_csv(const char* path, smr_truth** out) {
    SMR_REQUIRE(path, "path");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        const auto bytes = read_file(path);
        *out = new smr_truth{parse_ground_truth(std::string(bytes.begin(), bytes.end()))};
    });
}

smr_status smr_truth_first_box(const smr_truth* truth, smr_box* out) {
    SMR_REQUIRE(truth, "truth");
    SMR_REQUIRE(out, "out");
    const auto box = truth->truth.first_box();
    if (!box) return fail(SMR_ERR_INVALID_ARGUMENT, "ground truth has no present box");
    *out = from_box(*box);
    return SMR_OK;
}

smr_status smr_truth_box(const smr_truth* truth, int64_t frame_index, smr_box* out, int32_t* present) {
    SMR_REQUIRE(truth, "truth");
    SMR_REQUIRE(out, "out");
    SMR_REQUIRE(present, "present");
    const auto* entry = truth->truth.find(frame_index);
    if (!entry) return fail(SMR_ERR_INVALID_ARGUMENT, "ground truth has no entry for frame " + std::to_string(frame_index));
    *present = entry->box ? 1 : 0;
    *out = entry->box ? from_box(*entry->box) : smr_box{0, 0, 0, 0};
    return SMR_OK;
}

void smr_truth_destroy(smr_truth* truth) { delete truth; }

smr_status smr_evaluate(const smr_results* results, const smr_truth* truth, double iou_threshold, smr_report** out) {
    SMR_REQUIRE(results, "results");
    SMR_REQUIRE(truth, "truth");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_report{evaluate(results->results, truth->truth, iou_threshold)}; });
}

int64_t smr_report_correct(const smr_report* report) { return report ? report->report.correctly_tracked : 0; }
int64_t smr_report_evaluated(const smr_report* report) { return report ? report->report.total_evaluated : 0; }
double smr_report_threshold(const smr_report* report) { return report ? report->report.iou_threshold : 0.0; }

smr_status smr_report_write_csv(const smr_report* report, const char* path) {
    SMR_REQUIRE(report, "report");
    SMR_REQUIRE(path, "path");
    return guarded([&] { write_file_atomic(path, format_report_csv(report->report)); });
}

smr_status smr_report_read_csv(const char* path, smr_report** out) {
    SMR_REQUIRE(path, "path");
    SMR_REQUIRE(out, "out");
    return guarded([&] {
        const auto bytes = read_file(path);
        *out = new smr_report{parse_report_csv(std::string(bytes.begin(), bytes.end()))};
    });
}

void smr_report_destroy(smr_report* report) { delete report; }

smr_status smr_table_create(smr_table** out) {
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_table; });
}

smr_status smr_table_add(smr_table* table, const char* tracker, const char* sequence, const smr_report* report) {
    SMR_REQUIRE(table, "table");
    SMR_REQUIRE(tracker, "tracker");
    SMR_REQUIRE(sequence, "sequence");
    SMR_REQUIRE(report, "report");
    return guarded([&] { table->table.add(tracker, sequence, report->report); });
}

smr_status smr_table_write_csv(const smr_table* table, const char* path) {
    SMR_REQUIRE(table, "table");
    SMR_REQUIRE(path, "path");
    return guarded([&] { write_file_atomic(path, table->table.to_csv()); });
}

smr_status smr_table_text(const smr_table* table, char* buffer, size_t capacity, size_t* required) {
    SMR_REQUIRE(table, "table");
    return guarded([&] {
        const std::string text = table->table.to_text();
        if (required) *required = text.size();
        if (buffer && capacity > 0) {
            const size_t n = std::min(capacity - 1, text.size());
            std::memcpy(buffer, text.data(), n);
            buffer[n] = '\0';
        }
    });
}

void smr_table_destroy(smr_table* table) { delete table; }

// --- synth

smr_status smr_synth_load(const char* spec_path, smr_synth** out) {
    SMR_REQUIRE(spec_path, "spec_path");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_synth{load_synth_spec(spec_path)}; });
}

smr_status smr_synth_parse(const char* spec_text, smr_synth** out) {
    SMR_REQUIRE(spec_text, "spec_text");
    SMR_REQUIRE(out, "out");
    return guarded([&] { *out = new smr_synth{parse_synth_spec(spec_text)}; });
}

smr_status smr_synth_write(const smr_synth* synth, const char* dir) {
    SMR_REQUIRE(synth, "synth");
    SMR_REQUIRE(dir, "dir");
    return guarded([&] { write_synth_sequence(generate(synth->spec), dir); });
}

int64_t smr_synth_length(const smr_synth* synth) { return synth ? synth->spec.length : 0; }

void smr_synth_destroy(smr_synth* synth) { delete synth; }

}  // extern "C"
