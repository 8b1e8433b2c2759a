// SPDX-License-Identifier: Apache-2.0
//
// Directional head-related impulse responses.
//
// Manifest (JSON), paths relative to the manifest's directory:
//   {"subject_id": "pp87", "sample_rate": 44100, "ref_distance_m": 1.47,
//    "entries": [{"azimuth_deg": 0, "elevation_deg": 0,
//                 "left_file": "az000_el+00_L.f32",
//                 "right_file": "az000_el+00_R.f32"}]}
// Each impulse file is a headerless run of little-endian IEEE-754 float32
// samples. Azimuths follow the geometry convention (left = 90).
#pragma once

#include "sonotrack/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace sonotrack {

struct Hrir {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    std::vector<double> left;
    std::vector<double> right;
    int sample_rate = 0;

    std::size_t length() const { return left.size(); }
    void validate() const;
};

struct HrirSet {
    std::vector<Hrir> entries;
    double ref_distance_m = 1.47;
    std::string subject_id;

    int sample_rate() const { return entries.empty() ? 0 : entries.front().sample_rate; }
    std::size_t length() const { return entries.empty() ? 0 : entries.front().length(); }
    void validate() const;
};

struct ResampleOptions {
    /// Scale by ref_distance / distance (spherical spreading).
    bool distance_gain = true;
    double max_distance = 6.0;
};

struct SphericalHeadOptions {
    double head_radius_m = 0.0875;
    double speed_of_sound = 343.0;
    /// Peak level contrast between the ears at full lateral angle (0..1).
    double shadow_depth = 0.8;
    /// Impulse-response length in samples; 0 picks the shortest that fits.
    std::size_t length = 0;
    double ref_distance_m = 1.47;
    std::string subject_id = "spherical-head";
};

/// Great-circle angle between two directions, in degrees.
double angular_distance_deg(double az_a, double el_a, double az_b, double el_b);

HrirSet load_hrir_set(const std::filesystem::path& manifest);
/// Writes manifest.json plus one .f32 file per channel into dir.
std::filesystem::path save_hrir_set(const HrirSet& set, const std::filesystem::path& dir);

/// Nearest measured direction; ties go to the lowest entry index.
const Hrir& select_direction(const HrirSet& set, const SphericalDirection& target);

/// Linear time-domain stretch by distance / ref_distance. Equal distances
/// return an exact copy.
Hrir resample_for_distance(const Hrir& h, double distance_m, double ref_distance_m,
                           const ResampleOptions& options = {});

bool in_fine_region(double azimuth_deg, double elevation_deg);

/// Frontal hemisphere, elevation within [-40, 40].
HrirSet fine_subset(const HrirSet& set);

/// The grid's cols x rows directions (1 degree tolerance), column-major.
HrirSet coarse_subset(const HrirSet& set, const GridScheme& scheme = {});

/// Woodworth interaural delay in seconds; positive means the left ear leads.
double woodworth_itd(double azimuth_deg, double elevation_deg, double head_radius_m = 0.0875,
                     double speed_of_sound = 343.0);

/// Analytic rigid-sphere fixture: one delayed, scaled unit impulse per ear.
HrirSet synth_spherical_head(const std::vector<SphericalDirection>& directions, int sample_rate,
                             const SphericalHeadOptions& options = {});

/// Regular direction grid: azimuth 0..360 by az_step, elevation el_min..el_max by el_step.
std::vector<SphericalDirection> direction_grid(double az_step_deg, double el_step_deg,
                                               double el_min_deg = -40.0, double el_max_deg = 40.0);

} // namespace sonotrack
