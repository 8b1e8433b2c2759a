// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/geometry.hpp"

#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sonotrack {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Step lengths this close to the threshold count as equal to it.
constexpr double kExceedRelTol = 1e-9;
constexpr double kExceedAbsTol = 1e-12;

} // namespace

double distance(const Vec3& a, const Vec3& b)
{
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

void FrameSpec::validate() const
{
    if (width_px < 1 || height_px < 1)
        throw Error(fmt::format("frame size must be positive, got {}x{}", width_px, height_px));
    if (!(fps > 0.0) || !std::isfinite(fps))
        throw Error(fmt::format("fps must be positive, got {}", fps));
}

double SoundFieldConfig::gamma_for(const FrameSpec& frame) const
{
    return gamma.value_or(frame.width_px / 2.0);
}

void SoundFieldConfig::validate() const
{
    if (!(s_y > 0.0))
        throw Error(fmt::format("s_y must be positive, got {}", s_y));
    if (gamma && !(*gamma > 0.0))
        throw Error(fmt::format("gamma must be positive, got {}", *gamma));
    if (!(max_distance > 0.0))
        throw Error(fmt::format("max_distance must be positive, got {}", max_distance));
}

void Trajectory3D::validate() const
{
    if (points.empty())
        throw Error("trajectory is empty");
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(fmt::format("trajectory rate must be positive, got {}", rate));
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw Error(fmt::format("trajectory point {} is not finite", k));
    }
}

void GridScheme::validate() const
{
    if (cols < 1 || rows < 1)
        throw Error(fmt::format("grid must have at least one cell, got {}x{}", cols, rows));
    if (depth_bins_m.empty())
        throw Error("grid needs at least one depth bin");
    for (std::size_t i = 0; i < depth_bins_m.size(); ++i) {
        if (!(depth_bins_m[i] > 0.0))
            throw Error("depth bins must be positive");
        if (i > 0 && !(depth_bins_m[i] > depth_bins_m[i - 1]))
            throw Error("depth bins must be strictly increasing");
    }
    if (azimuths_deg.size() != static_cast<std::size_t>(cols))
        throw Error("grid needs one azimuth per column");
    if (elevations_deg.size() != static_cast<std::size_t>(rows))
        throw Error("grid needs one elevation per row");
}

double mapping_factor(const FrameSpec& frame, const SoundFieldConfig& config)
{
    frame.validate();
    config.validate();
    return 2.0 * config.s_y / frame.width_px;
}

double normalize_depth(double d, double d_min, double d_max, double gamma)
{
    if (!(gamma > 0.0))
        throw Error(fmt::format("gamma must be positive, got {}", gamma));
    if (!(d_min <= d_max))
        throw Error(fmt::format("depth range is inverted: [{}, {}]", d_min, d_max));
    if (d < d_min || d > d_max)
        throw Error(fmt::format("depth {} outside frame range [{}, {}]", d, d_min, d_max));
    if (d_max == d_min) {
        logger()->warn("flat depth map (min == max == {}); using mid-range depth", d_min);
        return gamma / 2.0;
    }
    return gamma * (d - d_min) / (d_max - d_min);
}

Vec3 map_to_sound_field(const PlanarObservation& obs, const FrameSpec& frame,
                        const SoundFieldConfig& config, double d_min, double d_max)
{
    const double delta = mapping_factor(frame, config);
    if (!(obs.w >= 0.0 && obs.w < frame.width_px && obs.h >= 0.0 && obs.h < frame.height_px))
        throw Error(fmt::format("observation ({}, {}) outside {}x{} frame", obs.w, obs.h,
                                frame.width_px, frame.height_px));
    const double depth_px = normalize_depth(obs.depth, d_min, d_max, config.gamma_for(frame));
    return {delta * depth_px, delta * (obs.w - frame.width_px / 2.0),
            -delta * (obs.h - frame.height_px / 2.0)};
}

std::vector<double> motion_magnitudes(const Trajectory3D& traj)
{
    if (traj.size() < 2)
        throw Error("trajectory too short");
    std::vector<double> out(traj.size() - 1);
    for (std::size_t k = 0; k + 1 < traj.size(); ++k)
        out[k] = distance(traj.points[k + 1], traj.points[k]);
    return out;
}

double percentile_linear(std::span<const double> values, double p)
{
    if (values.empty())
        throw Error("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(fmt::format("percentile fraction {} outside [0, 1]", p));
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return std::lerp(sorted[lo], sorted[hi], pos - static_cast<double>(lo));
}

std::vector<Vec3> fill_gaps(std::span<const std::optional<Vec3>> points)
{
    std::vector<std::size_t> present;
    for (std::size_t k = 0; k < points.size(); ++k)
        if (points[k])
            present.push_back(k);
    if (present.empty())
        throw Error("trajectory unrecoverable: no frames survive");

    std::vector<Vec3> out(points.size());
    for (std::size_t k = 0; k < present.front(); ++k)
        out[k] = *points[present.front()];
    for (std::size_t k = present.back(); k < points.size(); ++k)
        out[k] = *points[present.back()];

    for (std::size_t s = 0; s + 1 < present.size(); ++s) {
        const std::size_t a = present[s];
        const std::size_t b = present[s + 1];
        const Vec3& pa = *points[a];
        const Vec3& pb = *points[b];
        out[a] = pa;
        for (std::size_t k = a + 1; k < b; ++k) {
            const double t = static_cast<double>(k - a) / static_cast<double>(b - a);
            out[k] = {std::lerp(pa.x, pb.x, t), std::lerp(pa.y, pb.y, t), std::lerp(pa.z, pb.z, t)};
        }
    }
    return out;
}

Trajectory3D smooth_trajectory(const Trajectory3D& traj)
{
    traj.validate();
    const auto steps = motion_magnitudes(traj);
    const double threshold = percentile_linear(steps, 0.95);
    const double limit = threshold + kExceedRelTol * std::abs(threshold) + kExceedAbsTol;

    const std::size_t n = traj.size();
    std::vector<bool> outlier(n, false);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k] > limit) {
            outlier[k] = true;
            outlier[k + 1] = true;
        }
    }

    std::vector<std::optional<Vec3>> kept(traj.points.begin(), traj.points.end());
    std::size_t dropped = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!outlier[k])
            continue;
        for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 1, n - 1); ++j) {
            if (kept[j]) {
                kept[j].reset();
                ++dropped;
            }
        }
    }
    if (dropped > 0)
        logger()->debug("smoothing dropped {} of {} frames (threshold {:.6g} m)", dropped, n,
                        threshold);

    return {fill_gaps(kept), traj.rate};
}

GridCell quantize_to_grid(double w, double h, const FrameSpec& frame, const GridScheme& scheme)
{
    frame.validate();
    scheme.validate();
    if (!(w >= 0.0 && w < frame.width_px && h >= 0.0 && h < frame.height_px))
        throw Error(fmt::format("point ({}, {}) outside {}x{} frame", w, h, frame.width_px,
                                frame.height_px));
    const int col = std::min(static_cast<int>(std::floor(w * scheme.cols / frame.width_px)) + 1,
                             scheme.cols);
    const int row = std::min(static_cast<int>(std::floor(h * scheme.rows / frame.height_px)) + 1,
                             scheme.rows);
    return {col, row, (col - 0.5) * frame.width_px / scheme.cols,
            (row - 0.5) * frame.height_px / scheme.rows};
}

std::size_t depth_bin_index(double distance_m, const GridScheme& scheme)
{
    scheme.validate();
    if (!(distance_m >= 0.0))
        throw Error(fmt::format("distance must be nonnegative, got {}", distance_m));
    std::size_t best = 0;
    double best_err = std::abs(distance_m - scheme.depth_bins_m[0]);
    for (std::size_t i = 1; i < scheme.depth_bins_m.size(); ++i) {
        const double err = std::abs(distance_m - scheme.depth_bins_m[i]);
        if (err < best_err) {
            best = i;
            best_err = err;
        }
    }
    return best;
}

double quantize_depth(double distance_m, const GridScheme& scheme)
{
    return scheme.depth_bins_m[depth_bin_index(distance_m, scheme)];
}

Vec3 coarse_position(int col, int row, std::size_t depth_bin, const GridScheme& scheme)
{
    scheme.validate();
    if (col < 1 || col > scheme.cols || row < 1 || row > scheme.rows ||
        depth_bin >= scheme.depth_bins_m.size())
        throw Error(fmt::format("coarse cell ({}, {}, bin {}) outside the grid", col, row,
                                depth_bin));
    return spherical_to_cartesian({scheme.azimuths_deg[col - 1], scheme.elevations_deg[row - 1],
                                   scheme.depth_bins_m[depth_bin]});
}

std::vector<Vec3> coarse_positions(const GridScheme& scheme)
{
    std::vector<Vec3> out;
    for (int c = 1; c <= scheme.cols; ++c)
        for (int r = 1; r <= scheme.rows; ++r)
            for (std::size_t b = 0; b < scheme.depth_bins_m.size(); ++b)
                out.push_back(coarse_position(c, r, b, scheme));
    return out;
}

double wrap_degrees(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    if (w >= 360.0)
        w = 0.0;
    return w;
}

SphericalDirection cartesian_to_spherical(const Vec3& point)
{
    const double r = norm(point);
    if (!(r > 0.0))
        throw Error("undefined direction: point is at the origin");
    const double az = std::atan2(-point.y, point.x) * kRadToDeg;
    const double el = std::atan2(point.z, std::hypot(point.x, point.y)) * kRadToDeg;
    return {wrap_degrees(az), el, r};
}

Vec3 spherical_to_cartesian(const SphericalDirection& dir)
{
    const double az = dir.azimuth_deg * kDegToRad;
    const double el = dir.elevation_deg * kDegToRad;
    const double horizontal = dir.radius_m * std::cos(el);
    return {horizontal * std::cos(az), -horizontal * std::sin(az), dir.radius_m * std::sin(el)};
}

} // namespace sonotrack
