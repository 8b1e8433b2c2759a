// SPDX-License-Identifier: Apache-2.0
//
// Visual plane -> listener-centered sound field.
//
// Coordinates: x points forward (into the screen), y points to screen-right,
// z points up. Azimuth is counterclockwise from the front when viewed from
// above, so listener-left is 90 degrees and listener-right is 270 degrees.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sonotrack {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);

struct FrameSpec {
    int width_px = 0;
    int height_px = 0;
    double fps = 25.0;

    void validate() const;
};

struct PlanarObservation {
    int frame_index = 0;
    double w = 0.0;
    double h = 0.0;
    double depth = 0.0;
};

struct SoundFieldConfig {
    double s_y = 1.47;
    /// Depth scaling in pixels. Unset means W/2.
    std::optional<double> gamma;
    double max_distance = 6.0;

    double gamma_for(const FrameSpec& frame) const;
    void validate() const;
};

struct Trajectory3D {
    std::vector<Vec3> points;
    /// Points per second.
    double rate = 25.0;

    std::size_t size() const { return points.size(); }
    void validate() const;
};

/// Coarse spatio-temporal quantization. Column i (left to right) maps to
/// azimuths_deg[i-1]; row j (top to bottom) maps to elevations_deg[j-1].
struct GridScheme {
    int cols = 5;
    int rows = 3;
    std::vector<double> depth_bins_m{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> azimuths_deg{80.0, 40.0, 0.0, 320.0, 280.0};
    std::vector<double> elevations_deg{40.0, 0.0, -40.0};

    void validate() const;
};

struct SphericalDirection {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    double radius_m = 1.0;
};

struct GridCell {
    int col = 1; // i, 1-based
    int row = 1; // j, 1-based
    double center_w = 0.0;
    double center_h = 0.0;
};

/// Meters per pixel: 2 S_y / W.
double mapping_factor(const FrameSpec& frame, const SoundFieldConfig& config);

/// Min-max normalization of a relative depth into [0, gamma] pixels.
/// A flat depth map (d_max == d_min) yields gamma / 2 and logs a warning.
double normalize_depth(double d, double d_min, double d_max, double gamma);

Vec3 map_to_sound_field(const PlanarObservation& obs, const FrameSpec& frame,
                        const SoundFieldConfig& config, double d_min, double d_max);

/// Euclidean step lengths between consecutive points (K-1 values).
std::vector<double> motion_magnitudes(const Trajectory3D& traj);

/// Linear-interpolation percentile (0 <= p <= 1) of an unsorted sample.
double percentile_linear(std::span<const double> values, double p);

/// Fills missing points by per-coordinate linear interpolation between the
/// nearest present neighbours. Leading and trailing gaps hold the nearest
/// present value. Throws if nothing is present.
std::vector<Vec3> fill_gaps(std::span<const std::optional<Vec3>> points);

/// Single-pass outlier removal: any step strictly above the 95th percentile
/// of step lengths marks both of its endpoint frames; marked frames and their
/// immediate neighbours are discarded and re-interpolated.
Trajectory3D smooth_trajectory(const Trajectory3D& traj);

GridCell quantize_to_grid(double w, double h, const FrameSpec& frame, const GridScheme& scheme);

/// Nearest depth bin, ties to the smaller bin.
double quantize_depth(double distance_m, const GridScheme& scheme);

/// Index of quantize_depth's result in scheme.depth_bins_m.
std::size_t depth_bin_index(double distance_m, const GridScheme& scheme);

/// Sound-field position of a coarse cell at a given depth bin.
Vec3 coarse_position(int col, int row, std::size_t depth_bin, const GridScheme& scheme);

/// Every coarse position, ordered by column, row, then depth bin.
std::vector<Vec3> coarse_positions(const GridScheme& scheme);

SphericalDirection cartesian_to_spherical(const Vec3& point);
Vec3 spherical_to_cartesian(const SphericalDirection& dir);

/// Wraps any angle into [0, 360).
double wrap_degrees(double deg);

} // namespace sonotrack
