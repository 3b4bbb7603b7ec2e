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

#include "smrtrack/synth.hpp"

#include "smrtrack/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <optional>

namespace smrtrack {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Per-frame noise stream. Frame t of an effect seeded with s draws from
// SplitMix64(s ^ (t * golden)), one value per pixel in row-major order.
constexpr std::uint64_t kFrameMix = 0x9E3779B97F4A7C15ULL;

std::uint8_t clamp8(int v) noexcept { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

bool in_range(int v) noexcept { return v >= 0 && v <= 255; }

// Materializes a pattern over a w x h grid.
std::vector<std::uint8_t> render_pattern(const Pattern& p, int w, int h) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
    std::visit(overloaded{
                   [&](const pattern::Solid& s) { std::fill(out.begin(), out.end(), clamp8(s.value)); },
                   [&](const pattern::Checker& c) {
                       for (int y = 0; y < h; ++y)
                           for (int x = 0; x < w; ++x)
                               out[static_cast<std::size_t>(y) * w + x] =
                                   clamp8(((x / c.cell) + (y / c.cell)) % 2 == 0 ? c.a : c.b);
                   },
                   [&](const pattern::Stripes& s) {
                       for (int y = 0; y < h; ++y)
                           for (int x = 0; x < w; ++x)
                               out[static_cast<std::size_t>(y) * w + x] = clamp8((x / s.period) % 2 == 0 ? s.a : s.b);
                   },
                   [&](const pattern::Noise& n) {
                       SplitMix64 rng(n.seed);
                       for (auto& v : out) v = clamp8(rng.uniform(n.lo, n.hi));
                   },
               },
               p);
    return out;
}

void validate_pattern(const Pattern& p, const std::string& where) {
    std::visit(overloaded{
                   [&](const pattern::Solid& s) {
                       if (!in_range(s.value)) throw Error(ErrorCode::Config, where + ": solid value out of [0,255]");
                   },
                   [&](const pattern::Checker& c) {
                       if (c.cell < 1) throw Error(ErrorCode::Config, where + ": checker cell must be >= 1");
                       if (!in_range(c.a) || !in_range(c.b))
                           throw Error(ErrorCode::Config, where + ": checker intensities out of [0,255]");
                   },
                   [&](const pattern::Stripes& s) {
                       if (s.period < 1) throw Error(ErrorCode::Config, where + ": stripe period must be >= 1");
                       if (!in_range(s.a) || !in_range(s.b))
                           throw Error(ErrorCode::Config, where + ": stripe intensities out of [0,255]");
                   },
                   [&](const pattern::Noise& n) {
                       if (!in_range(n.lo) || !in_range(n.hi) || n.lo > n.hi)
                           throw Error(ErrorCode::Config, where + ": noise range must satisfy 0 <= lo <= hi <= 255");
                   },
               },
               p);
}

BBox occluder_at(const Perturbation& p, const effect::Occluder& o, long long frame) {
    const auto dt = static_cast<int>(frame - p.first_frame);
    return o.box.shifted(o.vx * dt, o.vy * dt);
}

bool active(const Perturbation& p, long long frame) noexcept {
    return frame >= p.first_frame && frame <= p.last_frame;
}

// Fraction of the target box covered by the union of active occluders.
double occlusion_coverage(const SynthSpec& spec, const BBox& target, long long frame) {
    std::vector<BBox> boxes;
    for (const auto& p : spec.perturbations)
        if (active(p, frame))
            if (const auto* o = std::get_if<effect::Occluder>(&p.effect)) boxes.push_back(occluder_at(p, *o, frame));
    if (boxes.empty()) return 0.0;
    long long covered = 0;
    for (int y = target.y; y < target.bottom(); ++y)
        for (int x = target.x; x < target.right(); ++x)
            for (const auto& b : boxes)
                if (x >= b.x && x < b.right() && y >= b.y && y < b.bottom()) {
                    ++covered;
                    break;
                }
    return static_cast<double>(covered) / static_cast<double>(target.area());
}

}  // namespace

void SynthSpec::validate() const {
    if (width < 1 || height < 1) throw Error(ErrorCode::Config, "synth: frame size must be positive");
    if (length < 1) throw Error(ErrorCode::Config, "synth: length must be >= 1");
    if (!in_range(background)) throw Error(ErrorCode::Config, "synth: background out of [0,255]");
    if (target.w < 1 || target.h < 1) throw Error(ErrorCode::Config, "synth: target size must be positive");
    validate_pattern(target_pattern, "synth: target_pattern");

    if (const auto* s = std::get_if<motion::Scripted>(&motion)) {
        if (static_cast<long long>(s->steps.size()) != length - 1)
            throw Error(ErrorCode::Config, "synth: scripted motion needs " + std::to_string(length - 1) +
                                               " steps, got " + std::to_string(s->steps.size()));
    }
    if (const auto* pw = std::get_if<motion::Piecewise>(&motion)) {
        for (std::size_t i = 0; i < pw->segments.size(); ++i) {
            if (pw->segments[i].from_frame < 2)
                throw Error(ErrorCode::Config, "synth: piecewise segments start at frame >= 2");
            if (i > 0 && pw->segments[i].from_frame <= pw->segments[i - 1].from_frame)
                throw Error(ErrorCode::Config, "synth: piecewise segment frames must increase");
        }
    }

    // Target must stay within one box-size of the frame, the region a tracker can reach.
    for (long long t = 1; t <= length; ++t) {
        const BBox b = target_box(t);
        if (b.x < -b.w || b.y < -b.h || b.x > width || b.y > height)
            throw Error(ErrorCode::Config, "synth: target leaves the reachable region at frame " + std::to_string(t));
    }

    for (std::size_t i = 0; i < perturbations.size(); ++i) {
        const auto& p = perturbations[i];
        const std::string where = "synth: event " + std::to_string(i + 1);
        if (p.first_frame < 1 || p.last_frame < p.first_frame || p.last_frame > length)
            throw Error(ErrorCode::Config, where + ": frame range must satisfy 1 <= first <= last <= length");
        std::visit(overloaded{
                       [&](const effect::Noise& n) {
                           if (n.amplitude < 0 || n.amplitude > 255)
                               throw Error(ErrorCode::Config, where + ": noise amplitude out of [0,255]");
                       },
                       [&](const effect::Occluder& o) {
                           if (o.box.w < 1 || o.box.h < 1)
                               throw Error(ErrorCode::Config, where + ": occluder size must be positive");
                           if (!in_range(o.intensity))
                               throw Error(ErrorCode::Config, where + ": occluder intensity out of [0,255]");
                       },
                       [&](const effect::AppearanceChange& a) {
                           if (a.region.w < 1 || a.region.h < 1)
                               throw Error(ErrorCode::Config, where + ": appearance region size must be positive");
                           if (!in_range(a.intensity))
                               throw Error(ErrorCode::Config, where + ": appearance intensity out of [0,255]");
                       },
                       [&](const effect::ContrastBackground& c) { validate_pattern(c.pattern, where); },
                   },
                   p.effect);
    }
}

BBox SynthSpec::target_box(long long frame) const {
    long long dx = 0, dy = 0;
    std::visit(overloaded{
                   [&](const motion::Constant& c) {
                       dx = c.dx * (frame - 1);
                       dy = c.dy * (frame - 1);
                   },
                   [&](const motion::Piecewise& pw) {
                       for (long long t = 2; t <= frame; ++t) {
                           for (auto it = pw.segments.rbegin(); it != pw.segments.rend(); ++it) {
                               if (it->from_frame <= t) {
                                   dx += it->dx;
                                   dy += it->dy;
                                   break;
                               }
                           }
                       }
                   },
                   [&](const motion::Scripted& s) {
                       for (long long t = 2; t <= frame && t - 2 < static_cast<long long>(s.steps.size()); ++t) {
                           dx += s.steps[static_cast<std::size_t>(t - 2)].first;
                           dy += s.steps[static_cast<std::size_t>(t - 2)].second;
                       }
                   },
               },
               motion);
    return target.shifted(static_cast<int>(dx), static_cast<int>(dy));
}

SynthSequence generate(const SynthSpec& spec) {
    spec.validate();
    SynthSequence out;
    out.frames.reserve(static_cast<std::size_t>(spec.length));
    out.init_box = spec.target_box(1);

    const auto texture = render_pattern(spec.target_pattern, spec.target.w, spec.target.h);

    for (long long t = 1; t <= spec.length; ++t) {
        // Background: uniform, or the last active contrast pattern.
        const effect::ContrastBackground* bg = nullptr;
        for (const auto& p : spec.perturbations)
            if (active(p, t))
                if (const auto* c = std::get_if<effect::ContrastBackground>(&p.effect)) bg = c;
        GrayFrame frame(spec.width, spec.height, clamp8(spec.background));
        if (bg) {
            const auto pixels = render_pattern(bg->pattern, spec.width, spec.height);
            std::copy(pixels.begin(), pixels.end(), frame.pixels().begin());
        }

        const BBox box = spec.target_box(t);
        for (int y = std::max(0, box.y); y < std::min(spec.height, box.bottom()); ++y)
            for (int x = std::max(0, box.x); x < std::min(spec.width, box.right()); ++x)
                frame.at(x, y) = texture[static_cast<std::size_t>(y - box.y) * box.w + (x - box.x)];

        for (const auto& p : spec.perturbations) {
            if (!active(p, t)) continue;
            std::visit(overloaded{
                           [&](const effect::Noise& n) {
                               SplitMix64 rng(n.seed ^ (static_cast<std::uint64_t>(t) * kFrameMix));
                               for (auto& v : frame.pixels()) v = clamp8(v + rng.uniform(-n.amplitude, n.amplitude));
                           },
                           [&](const effect::Occluder& o) {
                               const BBox b = occluder_at(p, o, t);
                               for (int y = std::max(0, b.y); y < std::min(spec.height, b.bottom()); ++y)
                                   for (int x = std::max(0, b.x); x < std::min(spec.width, b.right()); ++x)
                                       frame.at(x, y) = clamp8(o.intensity);
                           },
                           [&](const effect::AppearanceChange& a) {
                               const BBox r = a.region.shifted(box.x, box.y);
                               const int x0 = std::max({0, r.x, box.x});
                               const int y0 = std::max({0, r.y, box.y});
                               const int x1 = std::min({spec.width, r.right(), box.right()});
                               const int y1 = std::min({spec.height, r.bottom(), box.bottom()});
                               for (int y = y0; y < y1; ++y)
                                   for (int x = x0; x < x1; ++x) frame.at(x, y) = clamp8(a.intensity);
                           },
                           [&](const effect::ContrastBackground&) {},
                       },
                       p.effect);
        }
        out.frames.push_back(std::move(frame));

        TruthEntry entry{t, box};
        const bool out_of_view =
            box.right() <= 0 || box.bottom() <= 0 || box.x >= spec.width || box.y >= spec.height;
        if (out_of_view || occlusion_coverage(spec, box, t) >= kAbsentCoverage) entry.box.reset();
        out.truth.entries.push_back(entry);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct LineContext {
    std::size_t line;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::Config, "synth spec: line " + std::to_string(line) + ": " + msg);
    }

    template <typename T>
    T number(std::string_view s, const char* what) const {
        return text::parse_number<T>(s, ErrorCode::Config, "synth spec", line, what);
    }

    void expect(const std::vector<std::string_view>& tok, std::size_t n, const char* usage) const {
        if (tok.size() != n) fail(std::string("expected: ") + usage);
    }
};

// Noise patterns without an explicit seed take the spec seed once it is known.
Pattern parse_pattern(const std::vector<std::string_view>& tok, std::size_t start, const LineContext& ctx,
                      bool& needs_seed) {
    if (tok.size() <= start) ctx.fail("missing pattern (solid|checker|stripes|noise)");
    const std::string_view kind = tok[start];
    const std::size_t args = tok.size() - start - 1;
    auto arg = [&](std::size_t i, const char* what) { return ctx.number<int>(tok[start + 1 + i], what); };
    if (kind == "solid") {
        if (args != 1) ctx.fail("expected: solid VALUE");
        return pattern::Solid{arg(0, "value")};
    }
    if (kind == "checker") {
        if (args != 3) ctx.fail("expected: checker CELL A B");
        return pattern::Checker{arg(0, "cell"), arg(1, "a"), arg(2, "b")};
    }
    if (kind == "stripes") {
        if (args != 3) ctx.fail("expected: stripes PERIOD A B");
        return pattern::Stripes{arg(0, "period"), arg(1, "a"), arg(2, "b")};
    }
    if (kind == "noise") {
        if (args != 2 && args != 3) ctx.fail("expected: noise LO HI [SEED]");
        pattern::Noise n{arg(0, "lo"), arg(1, "hi"), 0};
        if (args == 3)
            n.seed = ctx.number<std::uint64_t>(tok[start + 3], "seed");
        else
            needs_seed = true;
        return n;
    }
    ctx.fail("unknown pattern '" + std::string(kind) + "'");
}

Motion parse_motion(const std::vector<std::string_view>& tok, const LineContext& ctx) {
    if (tok.empty()) ctx.fail("missing motion (constant|piecewise|scripted)");
    if (tok[0] == "constant") {
        ctx.expect(tok, 3, "constant DX DY");
        return motion::Constant{ctx.number<int>(tok[1], "dx"), ctx.number<int>(tok[2], "dy")};
    }
    if (tok[0] == "piecewise") {
        motion::Piecewise pw;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            const auto colon = tok[i].find(':');
            if (colon == std::string_view::npos) ctx.fail("piecewise segment must be FRAME:DX,DY");
            const auto d = text::split(tok[i].substr(colon + 1), ',');
            if (d.size() != 2) ctx.fail("piecewise segment must be FRAME:DX,DY");
            pw.segments.push_back({ctx.number<long long>(tok[i].substr(0, colon), "frame"),
                                   ctx.number<int>(d[0], "dx"), ctx.number<int>(d[1], "dy")});
        }
        return pw;
    }
    if (tok[0] == "scripted") {
        motion::Scripted s;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            const auto d = text::split(tok[i], ',');
            if (d.size() != 2) ctx.fail("scripted step must be DX,DY");
            s.steps.emplace_back(ctx.number<int>(d[0], "dx"), ctx.number<int>(d[1], "dy"));
        }
        return s;
    }
    ctx.fail("unknown motion '" + std::string(tok[0]) + "'");
}

Perturbation parse_event(const std::vector<std::string_view>& tok, const LineContext& ctx, bool& needs_seed) {
    if (tok.size() < 3) ctx.fail("expected: event=KIND FIRST LAST ...");
    Perturbation p;
    p.first_frame = ctx.number<long long>(tok[1], "first frame");
    p.last_frame = ctx.number<long long>(tok[2], "last frame");
    const std::string_view kind = tok[0];
    if (kind == "noise") {
        ctx.expect(tok, 5, "noise FIRST LAST SEED AMPLITUDE");
        p.effect = effect::Noise{ctx.number<std::uint64_t>(tok[3], "seed"), ctx.number<int>(tok[4], "amplitude")};
    } else if (kind == "occluder") {
        ctx.expect(tok, 10, "occluder FIRST LAST X Y W H VX VY INTENSITY");
        effect::Occluder o;
        o.box = {ctx.number<int>(tok[3], "x"), ctx.number<int>(tok[4], "y"), ctx.number<int>(tok[5], "w"),
                 ctx.number<int>(tok[6], "h")};
        o.vx = ctx.number<int>(tok[7], "vx");
        o.vy = ctx.number<int>(tok[8], "vy");
        o.intensity = ctx.number<int>(tok[9], "intensity");
        p.effect = o;
    } else if (kind == "appearance") {
        ctx.expect(tok, 8, "appearance FIRST LAST RX RY RW RH INTENSITY");
        effect::AppearanceChange a;
        a.region = {ctx.number<int>(tok[3], "rx"), ctx.number<int>(tok[4], "ry"), ctx.number<int>(tok[5], "rw"),
                    ctx.number<int>(tok[6], "rh")};
        a.intensity = ctx.number<int>(tok[7], "intensity");
        p.effect = a;
    } else if (kind == "background") {
        p.effect = effect::ContrastBackground{parse_pattern(tok, 3, ctx, needs_seed)};
    } else {
        ctx.fail("unknown event '" + std::string(kind) + "'");
    }
    return p;
}

void assign_seed(Pattern& p, std::uint64_t seed) {
    if (auto* n = std::get_if<pattern::Noise>(&p)) n->seed = seed;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& content) {
    SynthSpec spec;
    bool target_needs_seed = false;
    std::vector<std::size_t> events_needing_seed;
    std::optional<BBox> size, position;

    const auto all = text::lines(content);
    for (std::size_t n = 0; n < all.size(); ++n) {
        std::string_view line = all[n];
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const LineContext ctx{n + 1};
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) ctx.fail("expected key=value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string_view value = text::trim(line.substr(eq + 1));
        const auto tok = text::tokens(value);

        if (key == "width") {
            spec.width = ctx.number<int>(value, "width");
        } else if (key == "height") {
            spec.height = ctx.number<int>(value, "height");
        } else if (key == "length") {
            spec.length = ctx.number<long long>(value, "length");
        } else if (key == "background") {
            spec.background = ctx.number<int>(value, "background");
        } else if (key == "seed") {
            spec.seed = ctx.number<std::uint64_t>(value, "seed");
        } else if (key == "target_size") {
            ctx.expect(tok, 2, "target_size W H");
            size = BBox{0, 0, ctx.number<int>(tok[0], "w"), ctx.number<int>(tok[1], "h")};
        } else if (key == "target_position") {
            ctx.expect(tok, 2, "target_position X Y");
            position = BBox{ctx.number<int>(tok[0], "x"), ctx.number<int>(tok[1], "y"), 1, 1};
        } else if (key == "target_pattern") {
            target_needs_seed = false;
            spec.target_pattern = parse_pattern(tok, 0, ctx, target_needs_seed);
        } else if (key == "motion") {
            spec.motion = parse_motion(tok, ctx);
        } else if (key == "event") {
            bool needs_seed = false;
            spec.perturbations.push_back(parse_event(tok, ctx, needs_seed));
            if (needs_seed) events_needing_seed.push_back(spec.perturbations.size() - 1);
        } else {
            ctx.fail("unknown key '" + key + "'");
        }
    }

    if (size) {
        spec.target.w = size->w;
        spec.target.h = size->h;
    }
    if (position) {
        spec.target.x = position->x;
        spec.target.y = position->y;
    }
    if (target_needs_seed) assign_seed(spec.target_pattern, spec.seed);
    // Background textures use a seed distinct from the target's so the two never coincide.
    for (auto i : events_needing_seed)
        assign_seed(std::get<effect::ContrastBackground>(spec.perturbations[i].effect).pattern,
                    spec.seed ^ 0x5DEECE66DULL);
    spec.validate();
    return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_synth_spec(std::string(bytes.begin(), bytes.end()));
}

void write_synth_sequence(const SynthSequence& seq, const std::filesystem::path& dir) {
    save_sequence(seq.frames, dir);
    write_file_atomic(dir / "truth.csv", format_ground_truth(seq.truth));
    const BBox& b = seq.init_box;
    write_file_atomic(dir / "init.txt", std::to_string(b.x) + " " + std::to_string(b.y) + " " + std::to_string(b.w) +
                                            " " + std::to_string(b.h) + "\n");
}

}  // namespace smrtrack
