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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace smrtrack {

/// Integer rectangle, top-left anchored. x grows rightward, y downward.
/// Coordinates may be negative (or exceed the frame) when a box overhangs.
struct BBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    int right() const noexcept { return x + w; }
    int bottom() const noexcept { return y + h; }
    long long area() const noexcept { return static_cast<long long>(w) * h; }

    BBox shifted(int dx, int dy) const noexcept { return {x + dx, y + dy, w, h}; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// 8-bit grayscale image, row-major. Immutable once built except through
/// the non-const accessors used by renderers.
class GrayFrame {
public:
    GrayFrame() = default;

    /// Zero-filled frame. Throws InvalidArgument unless width, height >= 1.
    GrayFrame(int width, int height, std::uint8_t fill = 0);

    /// Takes ownership of a row-major buffer of exactly width*height bytes.
    GrayFrame(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

    std::span<const std::uint8_t> pixels() const noexcept { return data_; }
    std::span<std::uint8_t> pixels() noexcept { return data_; }
    std::span<const std::uint8_t> row(int y) const noexcept {
        return std::span<const std::uint8_t>(data_).subspan(
            static_cast<std::size_t>(y) * width_, width_);
    }

    bool contains(const BBox& box) const noexcept {
        return box.x >= 0 && box.y >= 0 && box.right() <= width_ && box.bottom() <= height_;
    }

    friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// BT.601 luma, rounded half-up: round(0.299 r + 0.587 g + 0.114 b).
std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Binary PGM ("P5", maxval <= 255). Comments in the header are accepted.
GrayFrame decode_pgm(std::span<const std::uint8_t> bytes);

/// Writes "P5\n<w> <h>\n255\n" followed by the raw payload.
std::vector<std::uint8_t> encode_pgm(const GrayFrame& frame);

/// 8-bit grayscale or RGB(A) PNG. Color goes through to_grayscale, alpha is dropped.
GrayFrame decode_png(std::span<const std::uint8_t> bytes);

/// Dispatches on the file magic (P5 or PNG signature).
GrayFrame decode_image(std::span<const std::uint8_t> bytes);

GrayFrame load_frame(const std::filesystem::path& path);
void save_pgm(const GrayFrame& frame, const std::filesystem::path& path);

/// Zero border of `margin` pixels on every side. Input pixel (x, y) lands at
/// (x + margin, y + margin).
GrayFrame pad_frame(const GrayFrame& frame, int margin);

/// Crop. Throws Bounds naming the violating edge when box leaves the frame.
GrayFrame extract_patch(const GrayFrame& frame, const BBox& box);

/// Sorted list of *.pgm / *.png files in a directory. Lexicographic order is time order.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

/// Decodes every frame in `dir`; all frames must share dimensions.
std::vector<GrayFrame> load_sequence(const std::filesystem::path& dir);

/// Writes frames as 00001.pgm, 00002.pgm, ... into dir (created if needed).
void save_sequence(const std::vector<GrayFrame>& frames, const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace smrtrack
