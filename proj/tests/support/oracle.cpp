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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace smrtest {

double oracle_smr(const GrayFrame& patch, const GrayFrame& tmpl, double alpha, double beta) {
    if (patch.width() != tmpl.width() || patch.height() != tmpl.height())
        throw std::invalid_argument("oracle_smr: size mismatch");
    double sum = 0.0;
    for (int y = 0; y < tmpl.height(); ++y) {
        for (int x = 0; x < tmpl.width(); ++x) {
            const int d = std::abs(int(patch.at(x, y)) - int(tmpl.at(x, y)));
            if (d <= alpha) sum += std::exp(-beta * d);
        }
    }
    return sum;
}

long long oracle_sad(const GrayFrame& patch, const GrayFrame& tmpl) {
    long long sum = 0;
    for (int y = 0; y < tmpl.height(); ++y)
        for (int x = 0; x < tmpl.width(); ++x) sum += std::abs(int(patch.at(x, y)) - int(tmpl.at(x, y)));
    return sum;
}

OracleSearch oracle_search(const GrayFrame& frame, const GrayFrame& tmpl, const BBox& prev, int radius, double alpha,
                           double beta, smrtrack::Metric metric) {
    OracleSearch out;
    const int side = 2 * radius + 1;
    out.scores.resize(static_cast<std::size_t>(side) * side);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            GrayFrame crop(tmpl.width(), tmpl.height());
            for (int y = 0; y < tmpl.height(); ++y)
                for (int x = 0; x < tmpl.width(); ++x) crop.at(x, y) = frame.at(prev.x + dx + x, prev.y + dy + y);
            const double s = metric == smrtrack::Metric::SMR ? oracle_smr(crop, tmpl, alpha, beta)
                                                              : static_cast<double>(oracle_sad(crop, tmpl));
            out.scores[static_cast<std::size_t>((dy + radius) * side + (dx + radius))] = s;
        }
    }

    // Pass 1: the best value. Pass 2: smallest displacement among it. Pass 3: first in row-major order.
    double best = out.scores[0];
    for (double s : out.scores)
        if (metric == smrtrack::Metric::SMR ? s > best : s < best) best = s;
    int best_d2 = -1;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (out.scores[static_cast<std::size_t>((dy + radius) * side + (dx + radius))] == best) {
                const int d2 = dx * dx + dy * dy;
                if (best_d2 < 0 || d2 < best_d2) best_d2 = d2;
            }
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (out.scores[static_cast<std::size_t>((dy + radius) * side + (dx + radius))] == best &&
                dx * dx + dy * dy == best_d2) {
                out.best_dx = dx;
                out.best_dy = dy;
                out.best_score = best;
                return out;
            }
        }
    }
    return out;
}

double oracle_iou(const BBox& a, const BBox& b) {
    const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
    long long inter = 0, uni = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
            const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

GrayFrame random_frame(std::mt19937_64& rng, int w, int h, int lo, int hi) {
    GrayFrame f(w, h);
    for (auto& v : f.pixels()) v = static_cast<std::uint8_t>(uniform_int(rng, lo, hi));
    return f;
}

}  // namespace smrtest
