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

#include "smrtrack/imaging.hpp"

#include "smrtrack/error.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace smrtrack {

namespace fs = std::filesystem;

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::Decode: return "decode error";
        case ErrorCode::Bounds: return "out of bounds";
        case ErrorCode::Dimension: return "dimension mismatch";
        case ErrorCode::Config: return "config error";
        case ErrorCode::Io: return "io error";
        case ErrorCode::Parse: return "parse error";
    }
    return "unknown error";
}

GrayFrame::GrayFrame(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive, got " +
                                                    std::to_string(width) + "x" + std::to_string(height));
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayFrame::GrayFrame(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1)
        throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive, got " +
                                                    std::to_string(width) + "x" + std::to_string(height));
    if (data_.size() != static_cast<std::size_t>(width) * height)
        throw Error(ErrorCode::InvalidArgument,
                    "frame buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                        std::to_string(static_cast<std::size_t>(width) * height));
}

std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    // Integer form of 0.299/0.587/0.114 scaled by 1000 keeps round-half-up exact.
    const int scaled = 299 * r + 587 * g + 114 * b;
    const int value = (scaled + 500) / 1000;
    return static_cast<std::uint8_t>(std::clamp(value, 0, 255));
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads a decimal field.
    long read_number(const char* field) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size())
            throw Error(ErrorCode::Decode, std::string("pgm: missing ") + field);
        if (!std::isdigit(bytes_[pos_]))
            throw Error(ErrorCode::Decode, std::string("pgm: malformed ") + field);
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L)
                throw Error(ErrorCode::Decode, std::string("pgm: ") + field + " out of range");
            ++pos_;
        }
        return value;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }
    std::uint8_t peek() const noexcept { return bytes_[pos_]; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayFrame decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw Error(ErrorCode::Decode, "pgm: bad magic, expected P5");
    HeaderReader reader(bytes);
    reader.advance(2);
    const long width = reader.read_number("width");
    const long height = reader.read_number("height");
    const long maxval = reader.read_number("maxval");
    if (width < 1) throw Error(ErrorCode::Decode, "pgm: width must be positive");
    if (height < 1) throw Error(ErrorCode::Decode, "pgm: height must be positive");
    if (maxval < 1 || maxval > 255)
        throw Error(ErrorCode::Decode, "pgm: maxval " + std::to_string(maxval) + " unsupported (must be 1..255)");
    if (reader.at_end() || !std::isspace(reader.peek()))
        throw Error(ErrorCode::Decode, "pgm: missing separator after maxval");
    reader.advance(1);

    const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t available = bytes.size() - reader.pos();
    if (available < expected)
        throw Error(ErrorCode::Decode, "pgm: truncated payload, expected " + std::to_string(expected) +
                                           " bytes, got " + std::to_string(available));
    auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos());
    std::vector<std::uint8_t> data(begin, begin + static_cast<std::ptrdiff_t>(expected));
    return GrayFrame(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> encode_pgm(const GrayFrame& frame) {
    const std::string header =
        "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), frame.pixels().begin(), frame.pixels().end());
    return out;
}

// ---------------------------------------------------------------------------
// PNG (libpng, in-memory read)

namespace {

struct PngSource {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

[[noreturn]] void png_error_fn(png_structp png, png_const_charp message) {
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    if (text) *text = message ? message : "corrupt stream";
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void png_read_fn(png_structp png, png_bytep out, png_size_t length) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (src->pos + length > src->bytes.size()) png_error(png, "truncated stream");
    std::memcpy(out, src->bytes.data() + src->pos, length);
    src->pos += length;
}

}  // namespace

GrayFrame decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw Error(ErrorCode::Decode, "png: bad signature");

    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn, png_warning_fn);
    if (!png) throw Error(ErrorCode::Decode, "png: cannot allocate decoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::Decode, "png: cannot allocate decoder");
    }

    PngSource source{bytes, 0};
    // Declared before setjmp: a longjmp must not skip any destructor.
    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    volatile std::size_t channels = 0;
    volatile bool unsupported = false;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::Decode, "png: " + (message.empty() ? std::string("corrupt stream") : message));
    }

    png_set_read_fn(png, &source, png_read_fn);
    png_read_info(png, info);
    png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (bit_depth != 8) {
        unsupported = true;
    } else {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        png_read_update_info(png, info);
        channels = png_get_channels(png, info);
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        raw.resize(rowbytes * height);
        rows.resize(height);
        for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * rowbytes;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (unsupported)
        throw Error(ErrorCode::Decode, "png: unsupported bit depth " + std::to_string(bit_depth) + " (only 8-bit)");

    const std::size_t nch = channels;
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t* px = raw.data() + i * nch;
        // 1: gray, 2: gray+alpha, 3: rgb, 4: rgba
        gray[i] = nch >= 3 ? to_grayscale(px[0], px[1], px[2]) : px[0];
    }
    return GrayFrame(static_cast<int>(width), static_cast<int>(height), std::move(gray));
}

GrayFrame decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
    throw Error(ErrorCode::Decode, "unrecognized image format (expected P5 PGM or PNG)");
}

// ---------------------------------------------------------------------------
// Geometry

GrayFrame pad_frame(const GrayFrame& frame, int margin) {
    if (margin < 0) throw Error(ErrorCode::InvalidArgument, "pad margin must be >= 0");
    if (margin == 0) return frame;
    GrayFrame out(frame.width() + 2 * margin, frame.height() + 2 * margin, 0);
    for (int y = 0; y < frame.height(); ++y) {
        auto src = frame.row(y);
        std::copy(src.begin(), src.end(), &out.at(margin, y + margin));
    }
    return out;
}

GrayFrame extract_patch(const GrayFrame& frame, const BBox& box) {
    if (box.w < 1 || box.h < 1)
        throw Error(ErrorCode::InvalidArgument, "box must have positive size");
    if (box.x < 0) throw Error(ErrorCode::Bounds, "box left edge " + std::to_string(box.x) + " < 0");
    if (box.y < 0) throw Error(ErrorCode::Bounds, "box top edge " + std::to_string(box.y) + " < 0");
    if (box.right() > frame.width())
        throw Error(ErrorCode::Bounds, "box right edge " + std::to_string(box.right()) + " > frame width " +
                                           std::to_string(frame.width()));
    if (box.bottom() > frame.height())
        throw Error(ErrorCode::Bounds, "box bottom edge " + std::to_string(box.bottom()) +
                                           " > frame height " + std::to_string(frame.height()));
    std::vector<std::uint8_t> data;
    data.reserve(static_cast<std::size_t>(box.area()));
    for (int y = box.y; y < box.bottom(); ++y) {
        auto row = frame.row(y).subspan(static_cast<std::size_t>(box.x), static_cast<std::size_t>(box.w));
        data.insert(data.end(), row.begin(), row.end());
    }
    return GrayFrame(box.w, box.h, std::move(data));
}

// ---------------------------------------------------------------------------
// Files

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "no such input: " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename into " + path.string() + ": " + ec.message());
}

void write_file_atomic(const fs::path& path, const std::string& text) {
    write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                          text.size()));
}

GrayFrame load_frame(const fs::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_image(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.filename().string() + ": " + e.what());
    }
}

void save_pgm(const GrayFrame& frame, const fs::path& path) { write_file_atomic(path, encode_pgm(frame)); }

std::vector<fs::path> list_frame_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "no such input directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

std::vector<GrayFrame> load_sequence(const fs::path& dir) {
    const auto files = list_frame_files(dir);
    if (files.empty()) throw Error(ErrorCode::Io, "no frames (*.pgm, *.png) in " + dir.string());
    std::vector<GrayFrame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        GrayFrame frame;
        try {
            frame = load_frame(files[i]);
        } catch (const Error& e) {
            throw Error(e.code(), "frame " + std::to_string(i + 1) + " (" + e.what() + ")");
        }
        if (!frames.empty() &&
            (frame.width() != frames.front().width() || frame.height() != frames.front().height()))
            throw Error(ErrorCode::Dimension,
                        "frame " + std::to_string(i + 1) + " is " + std::to_string(frame.width()) + "x" +
                            std::to_string(frame.height()) + ", sequence is " +
                            std::to_string(frames.front().width()) + "x" + std::to_string(frames.front().height()));
        frames.push_back(std::move(frame));
    }
    return frames;
}

void save_sequence(const std::vector<GrayFrame>& frames, const fs::path& dir) {
    fs::create_directories(dir);
    char name[32];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::snprintf(name, sizeof name, "%05zu.pgm", i + 1);
        save_pgm(frames[i], dir / name);
    }
}

}  // namespace smrtrack
