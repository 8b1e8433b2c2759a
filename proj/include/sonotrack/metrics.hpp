// SPDX-License-Identifier: Apache-2.0
//
// Spatial accuracy and interaural cue measurements.
//
// Sign conventions: ILD is left minus right in dB (positive = louder left);
// ITD is positive when the left ear leads.
#pragma once

#include "sonotrack/audio.hpp"
#include "sonotrack/geometry.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sonotrack {

enum class AngleKind { azimuth, elevation };

struct AngleSeries {
    std::vector<double> values; // degrees
    AngleKind kind = AngleKind::azimuth;

    void validate() const;
};

struct CueSeries {
    double window_s = 0.0;
    double hop_s = 0.0;
    std::vector<double> ild_db;
    std::vector<double> itd_s;
    /// Both channels below the silence floor.
    std::vector<bool> silent;
    /// Cross-correlation peak less than twice the mean |correlation|.
    std::vector<bool> low_confidence;

    std::size_t size() const { return silent.size(); }
};

struct SideConsistency {
    /// Empty when every window was skipped.
    std::optional<double> fraction;
    std::size_t considered = 0;
    std::size_t skipped = 0;
};

constexpr double kSilenceRms = 1e-6;
constexpr double kCenterDeadZoneM = 0.05;

/// Mean wrapped absolute azimuth error in degrees.
double mae_azimuth(const AngleSeries& est, const AngleSeries& gt);
/// Mean absolute elevation error in degrees.
double mae_elevation(const AngleSeries& est, const AngleSeries& gt);

/// Azimuth and elevation series of a trajectory.
std::pair<AngleSeries, AngleSeries> trajectory_angles(const Trajectory3D& traj);

/// Number of analysis windows; throws if the window does not fit.
std::size_t window_count(std::size_t samples, std::size_t window, std::size_t hop);

CueSeries estimate_ild(const BinauralAudio& audio, double window_s, double hop_s);
CueSeries estimate_itd(const BinauralAudio& audio, double window_s, double hop_s,
                       double max_lag_s = 0.001);

/// Fraction of non-overlapping windows whose louder ear matches the side of
/// the time-aligned trajectory point.
SideConsistency side_consistency(const BinauralAudio& audio, const Trajectory3D& traj,
                                 double window_s);

} // namespace sonotrack
