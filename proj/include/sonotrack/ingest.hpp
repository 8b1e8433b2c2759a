// SPDX-License-Identifier: Apache-2.0
//
// Detector tracks and depth maps produced by external models.
//
// Track file (JSON):
//   {"frames": [{"frame_index": 1,
//                "boxes": [{"label": "dog", "confidence": 0.9,
//                           "x0": 10, "y0": 20, "x1": 110, "y1": 220}]}]}
//
// Depth frames live in one directory, one file per frame, named
// frame_<index zero-padded to 6 digits>.<ext>:
//   .f32 + .json  raw little-endian float32, row-major; the sidecar
//                 frame_NNNNNN.json holds {"width": W, "height": H}
//   .png          8- or 16-bit single-channel grayscale
#pragma once

#include "sonotrack/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sonotrack {

struct BoundingBox {
    std::string label;
    double confidence = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
};

struct DetectionFrame {
    int frame_index = 0;
    std::vector<BoundingBox> boxes;
};

struct DetectionTrack {
    std::vector<DetectionFrame> frames;

    void validate() const;
};

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> values; // row-major

    float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
    void validate() const;
};

struct DepthSample {
    double value = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// A per-frame observation plus the min/max of that frame's depth map.
struct Observation {
    PlanarObservation planar;
    double depth_min = 0.0;
    double depth_max = 0.0;
};

struct TrackObservations {
    std::string label;
    /// One slot per track frame; empty slots are detection gaps.
    std::vector<std::optional<Observation>> frames;

    std::size_t observation_count() const;
    std::size_t gap_count() const { return frames.size() - observation_count(); }
};

using DepthProvider = std::function<DepthMap(int frame_index)>;

std::pair<double, double> bbox_center(const BoundingBox& box);

/// Nearest-pixel (half-up) lookup plus the map's value range.
DepthSample sample_depth(const DepthMap& depth, double w, double h);

/// Highest confidence wins; ties go to the lexicographically smallest label.
std::string select_label(const std::vector<std::pair<std::string, double>>& candidates);

/// Picks the track label, then per frame the highest-confidence box carrying
/// it. Depth maps must match the frame size.
TrackObservations track_to_observations(const DetectionTrack& track, const FrameSpec& frame,
                                         const DepthProvider& depth);

DetectionTrack load_detection_track(const std::filesystem::path& path);
void save_detection_track(const DetectionTrack& track, const std::filesystem::path& path);

std::filesystem::path depth_frame_stem(const std::filesystem::path& dir, int frame_index);
DepthMap load_depth_frame(const std::filesystem::path& dir, int frame_index);
void save_depth_f32(const DepthMap& depth, const std::filesystem::path& dir, int frame_index);
void save_depth_png16(const DepthMap& depth, const std::filesystem::path& dir, int frame_index);

} // namespace sonotrack
