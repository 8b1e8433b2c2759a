// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/hrir.hpp"

#include "binary_io.hpp"
#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace sonotrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Angular distances closer than this are ties.
constexpr double kTieDeg = 1e-9;
constexpr double kCoarseToleranceDeg = 1.0;

// Signed azimuth in (-180, 180]; keeps mirrored grid angles exact negatives.
double signed_azimuth(double az)
{
    const double w = wrap_degrees(az);
    return w > 180.0 ? w - 360.0 : w;
}

double azimuth_gap(double a, double b)
{
    const double d = std::abs(wrap_degrees(a) - wrap_degrees(b));
    return std::min(d, 360.0 - d);
}

double interpolate(const std::vector<double>& x, double pos)
{
    if (pos < 0.0)
        return 0.0;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    const double a = i < x.size() ? x[i] : 0.0;
    const double b = i + 1 < x.size() ? x[i + 1] : 0.0;
    return frac == 0.0 ? a : a + frac * (b - a);
}

std::vector<double> stretch(const std::vector<double>& x, double ratio, std::size_t out_len,
                            double gain)
{
    std::vector<double> out(out_len);
    for (std::size_t n = 0; n < out_len; ++n)
        out[n] = gain * interpolate(x, static_cast<double>(n) / ratio);
    return out;
}

} // namespace

void Hrir::validate() const
{
    if (left.empty() || left.size() != right.size())
        throw Error(fmt::format("HRIR at ({}, {}): left/right length mismatch ({} vs {})",
                                azimuth_deg, elevation_deg, left.size(), right.size()));
    if (sample_rate <= 0)
        throw Error(fmt::format("HRIR at ({}, {}): sample rate must be positive", azimuth_deg,
                                elevation_deg));
}

void HrirSet::validate() const
{
    if (entries.empty())
        throw Error(fmt::format("HRIR set '{}' is empty", subject_id));
    if (!(ref_distance_m > 0.0))
        throw Error("HRIR reference distance must be positive");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Hrir& e = entries[i];
        e.validate();
        if (e.sample_rate != entries.front().sample_rate)
            throw Error(fmt::format("HRIR set '{}': mixed sample rates ({} vs {})", subject_id,
                                    e.sample_rate, entries.front().sample_rate));
        if (e.length() != entries.front().length())
            throw Error(fmt::format("HRIR set '{}': length mismatch ({} vs {})", subject_id,
                                    e.length(), entries.front().length()));
        for (std::size_t j = 0; j < i; ++j) {
            if (azimuth_gap(e.azimuth_deg, entries[j].azimuth_deg) < kTieDeg &&
                std::abs(e.elevation_deg - entries[j].elevation_deg) < kTieDeg)
                throw Error(fmt::format("duplicate direction ({}, {}) in HRIR set '{}'",
                                        e.azimuth_deg, e.elevation_deg, subject_id));
        }
    }
}

double angular_distance_deg(double az_a, double el_a, double az_b, double el_b)
{
    const auto unit = [](double az, double el) {
        const double a = signed_azimuth(az) * kDegToRad;
        const double e = el * kDegToRad;
        return Vec3{std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
    };
    const Vec3 u = unit(az_a, el_a);
    const Vec3 v = unit(az_b, el_b);
    const Vec3 cross{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
    const double dot = u.x * v.x + u.y * v.y + u.z * v.z;
    return std::atan2(norm(cross), dot) * kRadToDeg;
}

HrirSet load_hrir_set(const fs::path& manifest)
{
    const auto bytes = detail::read_file(manifest);
    const fs::path base = manifest.parent_path();
    HrirSet set;
    try {
        const json doc = json::parse(bytes.begin(), bytes.end());
        set.subject_id = doc.value("subject_id", manifest.stem().string());
        set.ref_distance_m = doc.value("ref_distance_m", 1.47);
        const int rate = doc.at("sample_rate").get<int>();
        for (const auto& je : doc.at("entries")) {
            Hrir h;
            h.azimuth_deg = je.at("azimuth_deg").get<double>();
            h.elevation_deg = je.at("elevation_deg").get<double>();
            h.sample_rate = rate;
            for (auto [key, dest] : {std::pair{"left_file", &h.left}, {"right_file", &h.right}}) {
                const fs::path file = base / je.at(key).get<std::string>();
                if (!fs::exists(file))
                    throw Error(fmt::format("{}: missing impulse file {}", manifest.string(),
                                            file.string()));
                const auto samples = detail::read_f32le_file(file);
                dest->assign(samples.begin(), samples.end());
            }
            set.entries.push_back(std::move(h));
        }
    } catch (const json::exception& e) {
        throw Error(fmt::format("{}: invalid HRIR manifest: {}", manifest.string(), e.what()));
    }
    set.validate();
    return set;
}

fs::path save_hrir_set(const HrirSet& set, const fs::path& dir)
{
    set.validate();
    fs::create_directories(dir);
    json entries = json::array();
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        const Hrir& h = set.entries[i];
        const std::string left = fmt::format("hrir_{:04d}_L.f32", i);
        const std::string right = fmt::format("hrir_{:04d}_R.f32", i);
        detail::write_f32le_file<double>(dir / left, h.left);
        detail::write_f32le_file<double>(dir / right, h.right);
        entries.push_back({{"azimuth_deg", h.azimuth_deg},
                           {"elevation_deg", h.elevation_deg},
                           {"left_file", left},
                           {"right_file", right}});
    }
    const json doc{{"subject_id", set.subject_id},
                   {"sample_rate", set.sample_rate()},
                   {"ref_distance_m", set.ref_distance_m},
                   {"entries", std::move(entries)}};
    const fs::path manifest = dir / "manifest.json";
    detail::write_text_file(manifest, doc.dump(2) + "\n");
    return manifest;
}

const Hrir& select_direction(const HrirSet& set, const SphericalDirection& target)
{
    if (set.entries.empty())
        throw Error("cannot select from an empty HRIR set");
    std::size_t best = 0;
    double best_dist = angular_distance_deg(set.entries[0].azimuth_deg,
                                            set.entries[0].elevation_deg, target.azimuth_deg,
                                            target.elevation_deg);
    for (std::size_t i = 1; i < set.entries.size(); ++i) {
        const double d = angular_distance_deg(set.entries[i].azimuth_deg,
                                              set.entries[i].elevation_deg, target.azimuth_deg,
                                              target.elevation_deg);
        if (d < best_dist - kTieDeg) {
            best = i;
            best_dist = d;
        }
    }
    return set.entries[best];
}

Hrir resample_for_distance(const Hrir& h, double distance_m, double ref_distance_m,
                           const ResampleOptions& options)
{
    h.validate();
    if (!(ref_distance_m > 0.0))
        throw Error("reference distance must be positive");
    if (!(distance_m > 0.0))
        throw Error(fmt::format("distance must be positive, got {}", distance_m));
    if (distance_m > options.max_distance)
        throw Error(fmt::format("distance {} m beyond validity range (0, {}] m", distance_m,
                                options.max_distance));

    const double ratio = distance_m / ref_distance_m;
    if (ratio == 1.0)
        return h;

    const double gain = options.distance_gain ? ref_distance_m / distance_m : 1.0;
    const auto out_len = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(h.length()) * ratio)));
    Hrir out = h;
    out.left = stretch(h.left, ratio, out_len, gain);
    out.right = stretch(h.right, ratio, out_len, gain);
    return out;
}

bool in_fine_region(double azimuth_deg, double elevation_deg)
{
    const double az = wrap_degrees(azimuth_deg);
    return (az >= 270.0 || az <= 90.0) && elevation_deg >= -40.0 && elevation_deg <= 40.0;
}

HrirSet fine_subset(const HrirSet& set)
{
    HrirSet out{{}, set.ref_distance_m, set.subject_id};
    for (const Hrir& h : set.entries)
        if (in_fine_region(h.azimuth_deg, h.elevation_deg))
            out.entries.push_back(h);
    if (out.entries.empty())
        throw Error(fmt::format("HRIR set '{}': no directions in range", set.subject_id));
    return out;
}

HrirSet coarse_subset(const HrirSet& set, const GridScheme& scheme)
{
    scheme.validate();
    HrirSet out{{}, set.ref_distance_m, set.subject_id};
    std::vector<std::string> missing;
    for (int c = 0; c < scheme.cols; ++c) {
        for (int r = 0; r < scheme.rows; ++r) {
            const double az = scheme.azimuths_deg[c];
            const double el = scheme.elevations_deg[r];
            const Hrir* best = nullptr;
            double best_dist = 0.0;
            for (const Hrir& h : set.entries) {
                if (azimuth_gap(h.azimuth_deg, az) > kCoarseToleranceDeg ||
                    std::abs(h.elevation_deg - el) > kCoarseToleranceDeg)
                    continue;
                const double d = angular_distance_deg(h.azimuth_deg, h.elevation_deg, az, el);
                if (!best || d < best_dist - kTieDeg) {
                    best = &h;
                    best_dist = d;
                }
            }
            if (best)
                out.entries.push_back(*best);
            else
                missing.push_back(fmt::format("({}, {})", az, el));
        }
    }
    if (!missing.empty())
        throw Error(fmt::format("HRIR set '{}' lacks coarse directions: {}", set.subject_id,
                                fmt::join(missing, ", ")));
    return out;
}

double woodworth_itd(double azimuth_deg, double elevation_deg, double head_radius_m,
                     double speed_of_sound)
{
    const double lateral = std::asin(std::cos(elevation_deg * kDegToRad) *
                                     std::sin(signed_azimuth(azimuth_deg) * kDegToRad));
    return head_radius_m / speed_of_sound * (lateral + std::sin(lateral));
}

HrirSet synth_spherical_head(const std::vector<SphericalDirection>& directions, int sample_rate,
                             const SphericalHeadOptions& options)
{
    if (directions.empty())
        throw Error("spherical head needs at least one direction");
    if (sample_rate <= 0)
        throw Error("sample rate must be positive");

    const double max_itd = woodworth_itd(90.0, 0.0, options.head_radius_m,
                                         options.speed_of_sound) * sample_rate;
    const auto centre = static_cast<long>(std::ceil(max_itd / 2.0)) + 4;
    const auto min_len = static_cast<std::size_t>(2 * centre + 1);
    const std::size_t len = options.length == 0 ? min_len : options.length;
    if (len < min_len)
        throw Error(fmt::format("spherical head needs at least {} taps", min_len));

    HrirSet set{{}, options.ref_distance_m, options.subject_id};
    for (const auto& dir : directions) {
        const double itd = woodworth_itd(dir.azimuth_deg, dir.elevation_deg,
                                         options.head_radius_m, options.speed_of_sound);
        const long half = std::lround(itd * sample_rate / 2.0);
        const double lateral = std::asin(std::cos(dir.elevation_deg * kDegToRad) *
                                         std::sin(signed_azimuth(dir.azimuth_deg) * kDegToRad));
        const double pan = std::asin(options.shadow_depth * std::sin(lateral)) / 2.0;

        Hrir h;
        h.azimuth_deg = dir.azimuth_deg;
        h.elevation_deg = dir.elevation_deg;
        h.sample_rate = sample_rate;
        h.left.assign(len, 0.0);
        h.right.assign(len, 0.0);
        h.left[static_cast<std::size_t>(centre - half)] = std::cos(std::numbers::pi / 4 - pan);
        h.right[static_cast<std::size_t>(centre + half)] = std::cos(std::numbers::pi / 4 + pan);
        set.entries.push_back(std::move(h));
    }
    set.validate();
    return set;
}

std::vector<SphericalDirection> direction_grid(double az_step_deg, double el_step_deg,
                                               double el_min_deg, double el_max_deg)
{
    if (!(az_step_deg > 0.0) || !(el_step_deg > 0.0) || el_min_deg > el_max_deg)
        throw Error("invalid direction grid");
    std::vector<SphericalDirection> out;
    const auto n_az = static_cast<int>(std::ceil(360.0 / az_step_deg - 1e-9));
    const auto n_el = static_cast<int>(std::floor((el_max_deg - el_min_deg) / el_step_deg + 1e-9));
    for (int e = 0; e <= n_el; ++e)
        for (int a = 0; a < n_az; ++a)
            out.push_back({a * az_step_deg, el_min_deg + e * el_step_deg, 1.0});
    return out;
}

} // namespace sonotrack
