// SPDX-License-Identifier: Apache-2.0
//
// Track observations -> sound-field trajectories for both schemes.
#pragma once

#include "sonotrack/geometry.hpp"
#include "sonotrack/ingest.hpp"

namespace sonotrack {

/// Per-frame mapping, gap filling and outlier smoothing. Rate = frame fps.
Trajectory3D map_track_fine(const TrackObservations& obs, const FrameSpec& frame,
                            const SoundFieldConfig& field);

/// One grid position per second: the first detection inside each second is
/// snapped to its cell and to the nearest depth bin (the normalized depth is
/// spread evenly across the bin range). Seconds without detections repeat
/// the nearest estimated second. Rate = 1.
Trajectory3D map_track_coarse(const TrackObservations& obs, const FrameSpec& frame,
                              const GridScheme& grid);

} // namespace sonotrack
