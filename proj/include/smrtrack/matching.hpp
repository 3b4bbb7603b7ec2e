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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace smrtrack {

/// Appearance model: a patch snapshot and the frame it was cut from.
struct Template {
    GrayFrame patch;
    long long source_frame_index = 0;

    int width() const noexcept { return patch.width(); }
    int height() const noexcept { return patch.height(); }
    std::size_t pixel_count() const noexcept { return patch.size(); }
};

enum class Metric { SMR, SAD };

const char* to_string(Metric metric) noexcept;
Metric parse_metric(const std::string& text);

struct Offset {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

/// Similarity (SMR) or distance (SAD) for every offset in [-radius, radius]^2.
/// `scores` is row-major: index (dy + radius) * side + (dx + radius).
struct ScoreMap {
    BBox center;
    int radius = 0;
    Metric metric = Metric::SMR;
    std::vector<double> scores;
    Offset best_offset;
    double best_score = 0.0;

    int side() const noexcept { return 2 * radius + 1; }
    double at(int dx, int dy) const { return scores[static_cast<std::size_t>((dy + radius) * side() + (dx + radius))]; }
};

/// Per-difference weights exp(-beta * d) for d <= alpha, zero above it.
/// Entry d of the table is the contribution of a pixel pair with |F - G| == d.
class SmrKernel {
public:
    SmrKernel(double alpha, double beta = 1.0);

    double operator[](int difference) const noexcept { return weights_[static_cast<std::size_t>(difference)]; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

private:
    std::array<double, 256> weights_{};
    double alpha_;
    double beta_;
};

/// Sum over pixels of exp(-beta |F - G|) where |F - G| <= alpha, accumulated row-major.
double smr_score(const GrayFrame& patch, const Template& tmpl, double alpha, double beta = 1.0);

/// Sum over pixels of |F - G|.
std::int64_t sad_score(const GrayFrame& patch, const Template& tmpl);

struct SearchParams {
    int radius = 0;
    double alpha = 63.75;
    double beta = 1.0;
    Metric metric = Metric::SMR;
};

/// Scores the template against every candidate box prev_pos + (dx, dy).
/// Every candidate must lie inside `frame`; callers pad beforehand.
/// Winner: best score, then smallest dx^2 + dy^2, then first in row-major order.
/// Offsets are scored in parallel when set_max_threads() allows; the result is
/// bit-identical to the sequential run.
ScoreMap search(const GrayFrame& frame, const Template& tmpl, const BBox& prev_pos, const SearchParams& params);

/// k * max |old - new| over pixels, floored at alpha_min.
double dynamic_alpha(const Template& old_template, const Template& new_template, double k, double alpha_min = 1.0);

/// Per-pixel |F - G| as an image.
GrayFrame diff_map(const GrayFrame& patch, const Template& tmpl);

struct HistogramBin {
    int lower = 0;
    std::int64_t count = 0;
    friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Bins [b, b + bin_width) starting at 0 and covering 0..255.
std::vector<HistogramBin> diff_histogram(const GrayFrame& map, int bin_width);

/// Upper bound on worker threads used by search(). 0 means hardware concurrency.
void set_max_threads(unsigned threads) noexcept;
unsigned max_threads() noexcept;

}  // namespace smrtrack
