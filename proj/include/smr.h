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

/*
 * C interface to the smrtrack library.
 *
 * Every function returns an smr_status. On failure the thread-local message
 * returned by smr_last_error() describes the problem. Objects are opaque
 * handles created by *_create / *_load / *_read functions and released with
 * the matching *_destroy (NULL is accepted and ignored). Handles may be moved
 * between threads but must not be used from two threads at once.
 */

#ifndef SMR_H
#define SMR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SMR_BUILDING_LIBRARY)
#    define SMR_API __declspec(dllexport)
#  else
#    define SMR_API __declspec(dllimport)
#  endif
#else
#  define SMR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smr_status {
    SMR_OK = 0,
    SMR_ERR_INVALID_ARGUMENT = 1,
    SMR_ERR_DECODE = 2,
    SMR_ERR_BOUNDS = 3,
    SMR_ERR_DIMENSION = 4,
    SMR_ERR_CONFIG = 5,
    SMR_ERR_IO = 6,
    SMR_ERR_PARSE = 7,
    SMR_ERR_INTERNAL = 99
} smr_status;

typedef enum smr_metric { SMR_METRIC_SMR = 0, SMR_METRIC_SAD = 1 } smr_metric;

typedef struct smr_box {
    int32_t x, y, w, h;
} smr_box;

typedef struct smr_config {
    double k;
    int32_t search_radius;
    double alpha0;
    double alpha_min;
    double beta;
    smr_metric metric;
} smr_config;

typedef struct smr_track_result {
    int64_t frame_index;
    smr_box box;
    double score;
    int32_t updated;
    double alpha_used;
} smr_track_result;

typedef struct smr_frame smr_frame;
typedef struct smr_sequence smr_sequence;
typedef struct smr_tracker smr_tracker;
typedef struct smr_results smr_results;
typedef struct smr_truth smr_truth;
typedef struct smr_report smr_report;
typedef struct smr_table smr_table;
typedef struct smr_synth smr_synth;

/* --- library ------------------------------------------------------------ */

SMR_API const char* smr_version(void);
SMR_API const char* smr_last_error(void);
SMR_API const char* smr_status_string(smr_status status);
/* Caps worker threads used by the offset search; 0 = hardware concurrency. */
SMR_API void smr_set_max_threads(uint32_t threads);

/* --- config ------------------------------------------------------------- */

SMR_API void smr_config_default(smr_config* out);
SMR_API smr_status smr_config_validate(const smr_config* config);
/* Applies key=value lines from `path` on top of *config. */
SMR_API smr_status smr_config_load(const char* path, smr_config* config);
SMR_API smr_status smr_metric_parse(const char* name, smr_metric* out);

/* --- frames ------------------------------------------------------------- */

/* `pixels` holds width*height row-major bytes; NULL gives a zero-filled frame. */
SMR_API smr_status smr_frame_create(int32_t width, int32_t height, const uint8_t* pixels, smr_frame** out);
SMR_API smr_status smr_frame_decode(const uint8_t* bytes, size_t size, smr_frame** out);
SMR_API smr_status smr_frame_load(const char* path, smr_frame** out);
SMR_API smr_status smr_frame_write_pgm(const smr_frame* frame, const char* path);
SMR_API int32_t smr_frame_width(const smr_frame* frame);
SMR_API int32_t smr_frame_height(const smr_frame* frame);
SMR_API const uint8_t* smr_frame_pixels(const smr_frame* frame);
SMR_API smr_status smr_frame_pad(const smr_frame* frame, int32_t margin, smr_frame** out);
SMR_API smr_status smr_frame_crop(const smr_frame* frame, smr_box box, smr_frame** out);
SMR_API void smr_frame_destroy(smr_frame* frame);

SMR_API smr_status smr_sequence_load(const char* dir, smr_sequence** out);
SMR_API size_t smr_sequence_size(const smr_sequence* seq);
/* Borrowed pointer, valid while `seq` lives. */
SMR_API const smr_frame* smr_sequence_frame(const smr_sequence* seq, size_t index);
SMR_API void smr_sequence_destroy(smr_sequence* seq);

/* --- matching ----------------------------------------------------------- */

SMR_API smr_status smr_score_smr(const smr_frame* patch, const smr_frame* tmpl, double alpha, double beta,
                                 double* out);
SMR_API smr_status smr_score_sad(const smr_frame* patch, const smr_frame* tmpl, int64_t* out);
SMR_API smr_status smr_dynamic_alpha(const smr_frame* old_tmpl, const smr_frame* new_tmpl, double k,
                                     double alpha_min, double* out);
/* Best offset around `prev`. `scores` may be NULL; otherwise it receives
 * (2*radius+1)^2 values, row-major over (dy, dx). */
SMR_API smr_status smr_search(const smr_frame* frame, const smr_frame* tmpl, smr_box prev, int32_t radius,
                              double alpha, double beta, smr_metric metric, int32_t* best_dx, int32_t* best_dy,
                              double* best_score, double* scores, size_t scores_capacity);
SMR_API smr_status smr_diff_map(const smr_frame* patch, const smr_frame* tmpl, smr_frame** out);
/* Writes "bin_lower,count" lines. */
SMR_API smr_status smr_histogram_write_csv(const smr_frame* map, int32_t bin_width, const char* path);

/* --- tracking ----------------------------------------------------------- */

SMR_API smr_status smr_tracker_create(const smr_frame* first_frame, smr_box init_box, const smr_config* config,
                                      smr_tracker** out);
SMR_API smr_status smr_tracker_step(smr_tracker* tracker, const smr_frame* frame, smr_track_result* out);
SMR_API double smr_tracker_alpha(const smr_tracker* tracker);
SMR_API void smr_tracker_destroy(smr_tracker* tracker);

SMR_API smr_status smr_track_sequence(const smr_sequence* seq, smr_box init_box, const smr_config* config,
                                      smr_results** out);
SMR_API size_t smr_results_size(const smr_results* results);
SMR_API smr_status smr_results_get(const smr_results* results, size_t index, smr_track_result* out);
SMR_API smr_status smr_results_write_csv(const smr_results* results, const char* path);
SMR_API smr_status smr_results_read_csv(const char* path, smr_results** out);
SMR_API void smr_results_destroy(smr_results* results);

/* --- evaluation --------------------------------------------------------- */

SMR_API double smr_iou(smr_box a, smr_box b);
SMR_API smr_status smr_truth_read_csv(const char* path, smr_truth** out);
/* First present box; SMR_ERR_INVALID_ARGUMENT when every entry is absent. */
SMR_API smr_status smr_truth_first_box(const smr_truth* truth, smr_box* out);
/* Box annotated for `frame_index`. *present is 0 when the entry is NaN;
 * SMR_ERR_INVALID_ARGUMENT when the frame has no entry at all. */
SMR_API smr_status smr_truth_box(const smr_truth* truth, int64_t frame_index, smr_box* out, int32_t* present);
SMR_API void smr_truth_destroy(smr_truth* truth);

SMR_API smr_status smr_evaluate(const smr_results* results, const smr_truth* truth, double iou_threshold,
                                smr_report** out);
SMR_API int64_t smr_report_correct(const smr_report* report);
SMR_API int64_t smr_report_evaluated(const smr_report* report);
SMR_API double smr_report_threshold(const smr_report* report);
SMR_API smr_status smr_report_write_csv(const smr_report* report, const char* path);
SMR_API smr_status smr_report_read_csv(const char* path, smr_report** out);
SMR_API void smr_report_destroy(smr_report* report);

SMR_API smr_status smr_table_create(smr_table** out);
SMR_API smr_status smr_table_add(smr_table* table, const char* tracker, const char* sequence,
                                 const smr_report* report);
SMR_API smr_status smr_table_write_csv(const smr_table* table, const char* path);
/* Aligned text. Copies at most `capacity` bytes including the terminator and
 * stores the full length (without terminator) in *required. */
SMR_API smr_status smr_table_text(const smr_table* table, char* buffer, size_t capacity, size_t* required);
SMR_API void smr_table_destroy(smr_table* table);

/* --- synthetic sequences ------------------------------------------------ */

SMR_API smr_status smr_synth_load(const char* spec_path, smr_synth** out);
SMR_API smr_status smr_synth_parse(const char* spec_text, smr_synth** out);
/* Writes numbered PGM frames, truth.csv and init.txt into `dir`. */
SMR_API smr_status smr_synth_write(const smr_synth* synth, const char* dir);
SMR_API int64_t smr_synth_length(const smr_synth* synth);
SMR_API void smr_synth_destroy(smr_synth* synth);

#ifdef __cplusplus
}
#endif

#endif /* SMR_H */
