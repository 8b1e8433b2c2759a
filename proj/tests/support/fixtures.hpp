// SPDX-License-Identifier: Apache-2.0
//
// On-disk fixtures shared by the CLI and acceptance tests.
#pragma once

#include "sonotrack/audio.hpp"
#include "sonotrack/hrir.hpp"
#include "sonotrack/ingest.hpp"

#include "oracles.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

/// Track of `frames` frames with one box whose centre sweeps from
/// (w0, h) to (w1, h); depth maps ramp left to right with a constant
/// `depth` under the box column.
inline void write_track(const std::filesystem::path& dir, int frames, int width, int height,
                        double w0, double w1, double h, float depth = 3.0f)
{
    std::filesystem::create_directories(dir / "depth");
    sonotrack::DetectionTrack track;
    for (int k = 0; k < frames; ++k) {
        const double t = frames > 1 ? static_cast<double>(k) / (frames - 1) : 0.0;
        const double w = w0 + t * (w1 - w0);
        track.frames.push_back({k, {{"dog", 0.9, w - 4, h - 4, w + 4, h + 4}}});
        sonotrack::DepthMap map{width, height, std::vector<float>(static_cast<std::size_t>(width) * height)};
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                map.values[static_cast<std::size_t>(r) * width + c] = 1.0f + 4.0f * c / width;
        const int col = static_cast<int>(std::floor(w + 0.5));
        for (int r = 0; r < height; ++r)
            map.values[static_cast<std::size_t>(r) * width + std::min(col, width - 1)] = depth;
        sonotrack::save_depth_f32(map, dir / "depth", k);
    }
    sonotrack::save_detection_track(track, dir / "track.json");
}

inline std::filesystem::path write_noise(const std::filesystem::path& path, double seconds, int rate,
                                         std::uint64_t seed = 1)
{
    const sonotrack::MonoAudio m{oracle::noise(static_cast<std::size_t>(seconds * rate), seed, 0.3), rate};
    sonotrack::write_mono_wav(path, m, sonotrack::SampleFormat::float32);
    return path;
}

inline std::filesystem::path write_hrir(const std::filesystem::path& dir, int rate,
                                        const std::string& subject = "spherical-head")
{
    sonotrack::SphericalHeadOptions o;
    o.subject_id = subject;
    return sonotrack::save_hrir_set(
        sonotrack::synth_spherical_head(sonotrack::direction_grid(5, 10), rate, o), dir);
}

} // namespace fixture
