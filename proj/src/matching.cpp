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

#include "smrtrack/matching.hpp"

#include "smrtrack/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace smrtrack {

namespace {

std::atomic<unsigned> g_max_threads{1};

void require_same_size(const GrayFrame& patch, const Template& tmpl, const char* what) {
    if (patch.width() != tmpl.width() || patch.height() != tmpl.height())
        throw Error(ErrorCode::Dimension, std::string(what) + ": patch is " + std::to_string(patch.width()) + "x" +
                                              std::to_string(patch.height()) + ", template is " +
                                              std::to_string(tmpl.width()) + "x" + std::to_string(tmpl.height()));
}

inline int absdiff(std::uint8_t a, std::uint8_t b) noexcept { return a > b ? a - b : b - a; }

// Score of the template against the window whose top-left is (x0, y0).
double smr_window(const GrayFrame& frame, const GrayFrame& tmpl, int x0, int y0, const SmrKernel& kernel) {
    double sum = 0.0;
    const int w = tmpl.width();
    for (int y = 0; y < tmpl.height(); ++y) {
        const std::uint8_t* f = frame.row(y0 + y).data() + x0;
        const std::uint8_t* g = tmpl.row(y).data();
        for (int x = 0; x < w; ++x) sum += kernel[absdiff(f[x], g[x])];
    }
    return sum;
}

std::int64_t sad_window(const GrayFrame& frame, const GrayFrame& tmpl, int x0, int y0) {
    std::int64_t sum = 0;
    const int w = tmpl.width();
    for (int y = 0; y < tmpl.height(); ++y) {
        const std::uint8_t* f = frame.row(y0 + y).data() + x0;
        const std::uint8_t* g = tmpl.row(y).data();
        int row_sum = 0;
        for (int x = 0; x < w; ++x) row_sum += absdiff(f[x], g[x]);
        sum += row_sum;
    }
    return sum;
}

unsigned resolve_threads(std::size_t work_rows) {
    unsigned n = g_max_threads.load(std::memory_order_relaxed);
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, work_rows));
}

}  // namespace

const char* to_string(Metric metric) noexcept { return metric == Metric::SAD ? "sad" : "smr"; }

Metric parse_metric(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "smr") return Metric::SMR;
    if (lower == "sad") return Metric::SAD;
    throw Error(ErrorCode::Config, "unknown metric '" + text + "' (expected smr or sad)");
}

void set_max_threads(unsigned threads) noexcept { g_max_threads.store(threads, std::memory_order_relaxed); }

unsigned max_threads() noexcept { return g_max_threads.load(std::memory_order_relaxed); }

SmrKernel::SmrKernel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be > 0");
    for (int d = 0; d < 256; ++d)
        weights_[static_cast<std::size_t>(d)] = d <= alpha ? std::exp(-beta * d) : 0.0;
}

double smr_score(const GrayFrame& patch, const Template& tmpl, double alpha, double beta) {
    require_same_size(patch, tmpl, "smr_score");
    return smr_window(patch, tmpl.patch, 0, 0, SmrKernel(alpha, beta));
}

std::int64_t sad_score(const GrayFrame& patch, const Template& tmpl) {
    require_same_size(patch, tmpl, "sad_score");
    return sad_window(patch, tmpl.patch, 0, 0);
}

ScoreMap search(const GrayFrame& frame, const Template& tmpl, const BBox& prev_pos, const SearchParams& params) {
    if (params.radius < 0) throw Error(ErrorCode::InvalidArgument, "search radius must be >= 0");
    if (prev_pos.w != tmpl.width() || prev_pos.h != tmpl.height())
        throw Error(ErrorCode::Dimension, "search box size differs from template size");
    const int r = params.radius;
    const BBox reach{prev_pos.x - r, prev_pos.y - r, prev_pos.w + 2 * r, prev_pos.h + 2 * r};
    if (!frame.contains(reach))
        throw Error(ErrorCode::Bounds, "search window [" + std::to_string(reach.x) + "," +
                                           std::to_string(reach.y) + "]-[" + std::to_string(reach.right()) + "," +
                                           std::to_string(reach.bottom()) + ") exceeds frame " +
                                           std::to_string(frame.width()) + "x" + std::to_string(frame.height()));

    ScoreMap map;
    map.center = prev_pos;
    map.radius = r;
    map.metric = params.metric;
    const int side = map.side();
    map.scores.assign(static_cast<std::size_t>(side) * side, 0.0);

    const bool smr = params.metric == Metric::SMR;
    const SmrKernel kernel(params.alpha, params.beta);

    // Each offset's score is independent, so splitting rows across threads
    // does not change any value.
    auto score_rows = [&](int row_begin, int row_end) {
        for (int row = row_begin; row < row_end; ++row) {
            const int dy = row - r;
            for (int col = 0; col < side; ++col) {
                const int dx = col - r;
                const int x0 = prev_pos.x + dx;
                const int y0 = prev_pos.y + dy;
                map.scores[static_cast<std::size_t>(row * side + col)] =
                    smr ? smr_window(frame, tmpl.patch, x0, y0, kernel)
                        : static_cast<double>(sad_window(frame, tmpl.patch, x0, y0));
            }
        }
    };

    const unsigned threads = resolve_threads(static_cast<std::size_t>(side));
    if (threads <= 1) {
        score_rows(0, side);
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        const int chunk = (side + static_cast<int>(threads) - 1) / static_cast<int>(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const int begin = static_cast<int>(t) * chunk;
            const int end = std::min(side, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(score_rows, begin, end);
        }
    }

    std::size_t best = 0;
    int best_dist = 2 * r * r + 1;
    for (std::size_t i = 0; i < map.scores.size(); ++i) {
        const int dx = static_cast<int>(i % side) - r;
        const int dy = static_cast<int>(i / side) - r;
        const int dist = dx * dx + dy * dy;
        const double s = map.scores[i];
        const double b = map.scores[best];
        const bool better = smr ? s > b : s < b;
        if (i == 0 || better || (s == b && dist < best_dist)) {
            best = i;
            best_dist = dist;
        }
    }
    map.best_offset = {static_cast<int>(best % side) - r, static_cast<int>(best / side) - r};
    map.best_score = map.scores[best];
    return map;
}

double dynamic_alpha(const Template& old_template, const Template& new_template, double k, double alpha_min) {
    require_same_size(new_template.patch, old_template, "dynamic_alpha");
    if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be > 0");
    auto a = old_template.patch.pixels();
    auto b = new_template.patch.pixels();
    int max_diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) max_diff = std::max(max_diff, absdiff(a[i], b[i]));
    return std::max(k * max_diff, alpha_min);
}

GrayFrame diff_map(const GrayFrame& patch, const Template& tmpl) {
    require_same_size(patch, tmpl, "diff_map");
    std::vector<std::uint8_t> out(patch.size());
    auto f = patch.pixels();
    auto g = tmpl.patch.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(absdiff(f[i], g[i]));
    return GrayFrame(patch.width(), patch.height(), std::move(out));
}

std::vector<HistogramBin> diff_histogram(const GrayFrame& map, int bin_width) {
    if (bin_width < 1) throw Error(ErrorCode::InvalidArgument, "bin width must be >= 1");
    const int bins = (255 + bin_width) / bin_width;
    std::vector<HistogramBin> hist(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) hist[static_cast<std::size_t>(i)].lower = i * bin_width;
    for (std::uint8_t v : map.pixels()) ++hist[v / bin_width].count;
    return hist;
}

}  // namespace smrtrack
