// SPDX-License-Identifier: Apache-2.0
//
// Seeded training-set synthesis.
//
// Output layout under the build directory:
//   manifest.json               entries sorted by clip name
//   <clip>/binaural.wav         stereo, 32-bit float
//   <clip>/trajectory.json      see trajectory_io.hpp
//   <clip>/condition.f32        4 x T little-endian float32, channel-major
//                               (mono, x, y, z)
//   <clip>/condition.json       {"channels": 4, "length": T, "sample_rate": ...,
//                                "dtype": "float32le", "layout": "channel-major",
//                                "channel_names": ["mono", "x", "y", "z"]}
#pragma once

#include "sonotrack/audio.hpp"
#include "sonotrack/geometry.hpp"
#include "sonotrack/hrir.hpp"
#include "sonotrack/render.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sonotrack {

enum class Scheme { fine, coarse };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

constexpr std::size_t kFineSegments = 200;
constexpr std::size_t kCoarseSegments = 8;
constexpr double kDefaultFps = 25.0;
constexpr double kDefaultClipSeconds = 8.0;

std::size_t default_segments(Scheme scheme);

struct DatasetSpec {
    Scheme scheme = Scheme::fine;
    double clip_seconds = kDefaultClipSeconds;
    /// Direction variation rate M; 0 picks the scheme default.
    std::size_t segments = 0;
    std::uint64_t seed = 0;
    double fps = kDefaultFps;
    SoundFieldConfig field;
    GridScheme grid;
    RenderOptions render;

    std::size_t effective_segments() const;
    void validate() const;
};

struct ConditionRecord {
    /// mono, x, y, z; all of the mono length.
    std::array<std::vector<double>, 4> channels;
    int sample_rate = 0;

    std::size_t length() const { return channels[0].size(); }
};

/// Portable uniform draws on top of mt19937_64 (bit-identical everywhere).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Stable per-clip seed from the global seed and the clip file name.
std::uint64_t derive_clip_seed(std::uint64_t seed, std::string_view clip_name);

bool in_admissible_region(const Vec3& p, Scheme scheme, const SoundFieldConfig& field,
                          const GridScheme& grid, double min_radius = 0.1);

/// 2-5 random waypoints joined by straight segments (fine), or stepped once
/// per second through grid positions (coarse). duration * fps points.
Trajectory3D random_trajectory(std::uint64_t seed, double duration_s, double fps, Scheme scheme,
                               const SoundFieldConfig& field = {}, const GridScheme& grid = {},
                               double min_radius = 0.1);

/// Holds each trajectory point for ceil(T / K) samples next to the mono signal.
ConditionRecord assemble_condition(const MonoAudio& mono, const Trajectory3D& traj);

void save_condition(const ConditionRecord& record, const std::filesystem::path& dir);
ConditionRecord load_condition(const std::filesystem::path& dir);

/// Zero-pads or truncates to the requested sample count.
MonoAudio fit_length(MonoAudio mono, std::size_t samples);

struct DatasetEntry {
    std::string clip;
    std::string subject_id;
    std::uint64_t seed = 0;
    std::filesystem::path binaural;
    std::filesystem::path trajectory;
    std::filesystem::path condition;
};

struct DatasetManifest {
    std::filesystem::path path;
    std::vector<DatasetEntry> entries;
};

DatasetManifest build_dataset(const std::filesystem::path& corpus_dir,
                              const std::vector<HrirSet>& hrir_sets, const DatasetSpec& spec,
                              const std::filesystem::path& out_dir);

} // namespace sonotrack
