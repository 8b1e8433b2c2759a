// SPDX-License-Identifier: Apache-2.0
//
// Moving-source binaural rendering.
//
// The mono signal is cut into M segments. Segment m is convolved with the
// distance-adjusted HRIR of plan position m and, separately, with the HRIR of
// position m+1. The two renderings of the *same* samples are blended with a
// weight ramping 0 -> 1 across the segment, so each segment ends exactly at
// the next position. Convolution tails overlap-add into the following
// segments and the result is truncated to the input length.
#pragma once

#include "sonotrack/audio.hpp"
#include "sonotrack/geometry.hpp"
#include "sonotrack/hrir.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sonotrack {

struct RenderPlan {
    /// Direction plus radius (the source distance) for each segment.
    std::vector<SphericalDirection> positions;
    std::size_t segment_length = 0;
    std::size_t segments = 0; // M

    void validate() const;
};

struct RenderOptions {
    bool distance_gain = true;
    /// Scale the output so its absolute peak is 1.
    bool normalize = false;
    double max_distance = 6.0;
    /// Sources closer than this are pushed out to it along their direction.
    double min_distance = 0.1;
};

/// Binaural convolution of one segment: `body` spans the segment, `tail`
/// holds the trailing L-1 samples of the full linear convolution.
struct SegmentRender {
    BinauralAudio body;
    std::vector<double> tail_left;
    std::vector<double> tail_right;
};

/// M contiguous views; the last one absorbs the remainder.
std::vector<std::span<const double>> segment_audio(const MonoAudio& mono, std::size_t segments);

/// Nearest trajectory point at each segment midpoint.
RenderPlan trajectory_to_plan(const Trajectory3D& traj, std::size_t segments,
                              const RenderOptions& options = {});

SegmentRender convolve_binaural(std::span<const double> segment, const Hrir& h, int sample_rate);

/// Per-sample blend a + t (b - a), t = n / (T-1); t = 0 for single samples.
BinauralAudio crossfade(const BinauralAudio& a, const BinauralAudio& b);

BinauralAudio render_moving_source(const MonoAudio& mono, const Trajectory3D& traj,
                                   const HrirSet& set, std::size_t segments,
                                   const RenderOptions& options = {});

/// Full linear convolution.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

void peak_normalize(BinauralAudio& audio);

} // namespace sonotrack
