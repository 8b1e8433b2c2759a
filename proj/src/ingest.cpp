// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/ingest.hpp"

#include "binary_io.hpp"
#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <png.h>

namespace sonotrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kBoxTolerance = 1e-9;

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

DepthMap read_png_depth(const fs::path& path)
{
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file)
        throw Error(fmt::format("cannot open {}", path.string()));

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng initialisation failed");
    }
    DepthMap map;
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(fmt::format("{}: corrupt PNG", path.string()));
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(fmt::format("{}: depth PNG must be 8- or 16-bit grayscale", path.string()));
    }
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (std::size_t r = 0; r < height; ++r)
        rows[r] = pixels.data() + r * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    map.width = static_cast<int>(width);
    map.height = static_cast<int>(height);
    map.values.resize(static_cast<std::size_t>(width) * height);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const png_byte* p = rows[r];
            map.values[r * width + c] =
                depth == 16 ? static_cast<float>((p[2 * c] << 8) | p[2 * c + 1])
                            : static_cast<float>(p[c]);
        }
    }
    return map;
}

} // namespace

void DetectionTrack::validate() const
{
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0 && frames[i].frame_index <= frames[i - 1].frame_index)
            throw Error(fmt::format("frame indices must be strictly increasing (frame {} after {})",
                                    frames[i].frame_index, frames[i - 1].frame_index));
        for (const auto& box : frames[i].boxes) {
            if (!(box.confidence >= 0.0 && box.confidence <= 1.0))
                throw Error(fmt::format("frame {}: confidence {} outside [0, 1]",
                                        frames[i].frame_index, box.confidence));
        }
    }
}

void DepthMap::validate() const
{
    if (width < 1 || height < 1)
        throw Error(fmt::format("depth map size must be positive, got {}x{}", width, height));
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw Error(fmt::format("depth map holds {} values, expected {}x{}", values.size(), width,
                                height));
    for (const float v : values)
        if (!std::isfinite(v) || v < 0.0f)
            throw Error("depth map values must be finite and nonnegative");
}

std::size_t TrackObservations::observation_count() const
{
    return static_cast<std::size_t>(
        std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); }));
}

std::pair<double, double> bbox_center(const BoundingBox& box)
{
    if (!(box.x1 - box.x0 > kBoxTolerance) || !(box.y1 - box.y0 > kBoxTolerance))
        throw Error(fmt::format("degenerate box ({}, {}, {}, {})", box.x0, box.y0, box.x1, box.y1));
    return {(box.x0 + box.x1) / 2.0, (box.y0 + box.y1) / 2.0};
}

DepthSample sample_depth(const DepthMap& depth, double w, double h)
{
    depth.validate();
    if (!(w >= 0.0 && w <= depth.width && h >= 0.0 && h <= depth.height))
        throw Error(fmt::format("pixel ({}, {}) out of bounds for {}x{} depth map", w, h,
                                depth.width, depth.height));
    // A box touching the right or bottom edge can have its centre round up
    // to one past the last pixel.
    const int col = std::min(static_cast<int>(std::floor(w + 0.5)), depth.width - 1);
    const int row = std::min(static_cast<int>(std::floor(h + 0.5)), depth.height - 1);
    const auto [lo, hi] = std::minmax_element(depth.values.begin(), depth.values.end());
    return {depth.at(row, col), *lo, *hi};
}

std::string select_label(const std::vector<std::pair<std::string, double>>& candidates)
{
    if (candidates.empty())
        throw Error("no detections");
    const auto* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.second > best->second || (c.second == best->second && c.first < best->first))
            best = &c;
    }
    return best->first;
}

TrackObservations track_to_observations(const DetectionTrack& track, const FrameSpec& frame,
                                         const DepthProvider& depth)
{
    track.validate();
    frame.validate();

    std::vector<std::pair<std::string, double>> candidates;
    for (const auto& f : track.frames)
        for (const auto& box : f.boxes)
            candidates.emplace_back(box.label, box.confidence);

    TrackObservations out;
    out.label = select_label(candidates);
    out.frames.reserve(track.frames.size());

    for (const auto& f : track.frames) {
        const BoundingBox* best = nullptr;
        for (const auto& box : f.boxes)
            if (box.label == out.label && (!best || box.confidence > best->confidence))
                best = &box;
        if (!best) {
            out.frames.emplace_back();
            continue;
        }
        const auto [w, h] = bbox_center(*best);
        const DepthMap map = depth(f.frame_index);
        if (map.width != frame.width_px || map.height != frame.height_px)
            throw Error(fmt::format("depth frame {} is {}x{}, expected {}x{}", f.frame_index,
                                    map.width, map.height, frame.width_px, frame.height_px));
        const DepthSample d = sample_depth(map, w, h);
        out.frames.push_back(Observation{{f.frame_index, w, h, d.value}, d.min, d.max});
    }
    if (out.observation_count() == 0)
        throw Error(fmt::format("no frames contain label '{}'", out.label));
    return out;
}

DetectionTrack load_detection_track(const fs::path& path)
{
    const auto bytes = detail::read_file(path);
    DetectionTrack track;
    try {
        const json doc = json::parse(bytes.begin(), bytes.end());
        for (const auto& jf : doc.at("frames")) {
            DetectionFrame f;
            f.frame_index = jf.at("frame_index").get<int>();
            for (const auto& jb : jf.at("boxes")) {
                f.boxes.push_back({jb.at("label").get<std::string>(),
                                   jb.at("confidence").get<double>(), jb.at("x0").get<double>(),
                                   jb.at("y0").get<double>(), jb.at("x1").get<double>(),
                                   jb.at("y1").get<double>()});
            }
            track.frames.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw Error(fmt::format("{}: invalid detection track: {}", path.string(), e.what()));
    }
    track.validate();
    return track;
}

void save_detection_track(const DetectionTrack& track, const fs::path& path)
{
    json frames = json::array();
    for (const auto& f : track.frames) {
        json boxes = json::array();
        for (const auto& b : f.boxes)
            boxes.push_back({{"label", b.label},
                             {"confidence", b.confidence},
                             {"x0", b.x0},
                             {"y0", b.y0},
                             {"x1", b.x1},
                             {"y1", b.y1}});
        frames.push_back({{"frame_index", f.frame_index}, {"boxes", std::move(boxes)}});
    }
    detail::write_text_file(path, json{{"frames", std::move(frames)}}.dump(2) + "\n");
}

fs::path depth_frame_stem(const fs::path& dir, int frame_index)
{
    return dir / fmt::format("frame_{:06d}", frame_index);
}

DepthMap load_depth_frame(const fs::path& dir, int frame_index)
{
    const fs::path stem = depth_frame_stem(dir, frame_index);
    fs::path raw = stem;
    raw += ".f32";
    fs::path png = stem;
    png += ".png";

    DepthMap map;
    if (fs::exists(raw)) {
        fs::path header_path = stem;
        header_path += ".json";
        const auto header_bytes = detail::read_file(header_path);
        try {
            const json header = json::parse(header_bytes.begin(), header_bytes.end());
            map.width = header.at("width").get<int>();
            map.height = header.at("height").get<int>();
        } catch (const json::exception& e) {
            throw Error(fmt::format("{}: invalid depth header: {}", header_path.string(), e.what()));
        }
        map.values = detail::read_f32le_file(raw);
    } else if (fs::exists(png)) {
        map = read_png_depth(png);
    } else {
        throw Error(fmt::format("missing depth frame {} ({}.f32 or .png)", frame_index,
                                stem.string()));
    }
    map.validate();
    return map;
}

void save_depth_f32(const DepthMap& depth, const fs::path& dir, int frame_index)
{
    depth.validate();
    const fs::path stem = depth_frame_stem(dir, frame_index);
    fs::path raw = stem;
    raw += ".f32";
    fs::path header = stem;
    header += ".json";
    detail::write_f32le_file<float>(raw, depth.values);
    detail::write_text_file(header,
                            json{{"width", depth.width}, {"height", depth.height}}.dump() + "\n");
}

void save_depth_png16(const DepthMap& depth, const fs::path& dir, int frame_index)
{
    depth.validate();
    fs::path path = depth_frame_stem(dir, frame_index);
    path += ".png";
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file)
        throw Error(fmt::format("cannot write {}", path.string()));

    std::vector<png_byte> pixels(static_cast<std::size_t>(depth.width) * depth.height * 2);
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        const auto v = static_cast<unsigned>(
            std::clamp(std::lround(depth.values[i]), 0L, 65535L));
        pixels[2 * i] = static_cast<png_byte>(v >> 8);
        pixels[2 * i + 1] = static_cast<png_byte>(v & 0xff);
    }
    std::vector<png_bytep> rows(depth.height);
    for (int r = 0; r < depth.height; ++r)
        rows[r] = pixels.data() + static_cast<std::size_t>(r) * depth.width * 2;

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(fmt::format("failed writing {}", path.string()));
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace sonotrack
