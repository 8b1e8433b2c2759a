// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/pipeline.hpp"

#include "sonotrack/common.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace sonotrack {

Trajectory3D map_track_fine(const TrackObservations& obs, const FrameSpec& frame,
                            const SoundFieldConfig& field)
{
    std::vector<std::optional<Vec3>> points;
    points.reserve(obs.frames.size());
    for (const auto& f : obs.frames) {
        if (!f)
            points.emplace_back();
        else
            points.emplace_back(
                map_to_sound_field(f->planar, frame, field, f->depth_min, f->depth_max));
    }
    Trajectory3D traj{fill_gaps(points), frame.fps};
    return traj.size() >= 2 ? smooth_trajectory(traj) : traj;
}

Trajectory3D map_track_coarse(const TrackObservations& obs, const FrameSpec& frame,
                              const GridScheme& grid)
{
    frame.validate();
    grid.validate();
    const std::size_t k = obs.frames.size();
    const auto seconds = static_cast<std::size_t>(
        std::max(1.0, std::ceil(static_cast<double>(k) / frame.fps - 1e-9)));

    std::vector<std::optional<Vec3>> per_second(seconds);
    for (std::size_t s = 0; s < seconds; ++s) {
        const auto first = static_cast<std::size_t>(std::ceil(static_cast<double>(s) * frame.fps - 1e-9));
        const auto last = std::min(
            k, static_cast<std::size_t>(std::ceil(static_cast<double>(s + 1) * frame.fps - 1e-9)));
        for (std::size_t i = first; i < last; ++i) {
            if (!obs.frames[i])
                continue;
            const Observation& o = *obs.frames[i];
            const GridCell cell = quantize_to_grid(o.planar.w, o.planar.h, frame, grid);
            const double fraction = normalize_depth(o.planar.depth, o.depth_min, o.depth_max, 1.0);
            const double near = grid.depth_bins_m.front();
            const double far = grid.depth_bins_m.back();
            const std::size_t bin = depth_bin_index(near + fraction * (far - near), grid);
            per_second[s] = coarse_position(cell.col, cell.row, bin, grid);
            break;
        }
    }

    // Hold the nearest estimated second; earlier neighbour wins ties.
    std::vector<Vec3> points(seconds);
    for (std::size_t s = 0; s < seconds; ++s) {
        std::optional<Vec3> pick;
        for (std::size_t d = 0; !pick && d < seconds; ++d) {
            if (s >= d && per_second[s - d])
                pick = per_second[s - d];
            else if (s + d < seconds && per_second[s + d])
                pick = per_second[s + d];
        }
        if (!pick)
            throw Error("no seconds contain a detection");
        points[s] = *pick;
    }
    return {std::move(points), 1.0};
}

} // namespace sonotrack
