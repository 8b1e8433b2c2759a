// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/metrics.hpp"

#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <fmt/format.h>

namespace sonotrack {

namespace {

// Floor for RMS inside the log so one silent ear stays finite.
constexpr double kRmsFloor = 1e-12;

void check_pair(const AngleSeries& est, const AngleSeries& gt, AngleKind kind)
{
    if (est.kind != kind || gt.kind != kind)
        throw Error("angle series kind mismatch");
    est.validate();
    gt.validate();
    if (est.values.empty() || gt.values.empty())
        throw Error("angle series are empty");
    if (est.values.size() != gt.values.size())
        throw Error(fmt::format("angle series length mismatch ({} vs {})", est.values.size(),
                                gt.values.size()));
}

double rms(std::span<const double> x)
{
    double acc = 0.0;
    for (const double v : x)
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

struct Windowing {
    std::size_t window = 0;
    std::size_t hop = 0;
    std::size_t count = 0;
};

Windowing make_windows(const BinauralAudio& audio, double window_s, double hop_s)
{
    audio.validate();
    if (!(window_s > 0.0) || !(hop_s > 0.0))
        throw Error("window and hop must be positive");
    Windowing w;
    w.window = static_cast<std::size_t>(std::max(1L, std::lround(window_s * audio.sample_rate)));
    w.hop = static_cast<std::size_t>(std::max(1L, std::lround(hop_s * audio.sample_rate)));
    w.count = window_count(audio.size(), w.window, w.hop);
    return w;
}

double correlate(std::span<const double> a, std::span<const double> b, long lag)
{
    const auto n = static_cast<long>(a.size());
    double acc = 0.0;
    for (long i = std::max(0L, -lag); i < std::min(n, n - lag); ++i)
        acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i + lag)];
    return acc;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

void AngleSeries::validate() const
{
    for (const double v : values) {
        const bool ok = kind == AngleKind::azimuth ? (v >= 0.0 && v < 360.0)
                                                   : (v >= -90.0 && v <= 90.0);
        if (!ok)
            throw Error(fmt::format("{} {} out of range",
                                    kind == AngleKind::azimuth ? "azimuth" : "elevation", v));
    }
}

double mae_azimuth(const AngleSeries& est, const AngleSeries& gt)
{
    check_pair(est, gt, AngleKind::azimuth);
    double sum = 0.0;
    for (std::size_t n = 0; n < est.values.size(); ++n) {
        const double d = std::abs(est.values[n] - gt.values[n]);
        sum += std::min(d, 360.0 - d);
    }
    return sum / static_cast<double>(est.values.size());
}

double mae_elevation(const AngleSeries& est, const AngleSeries& gt)
{
    check_pair(est, gt, AngleKind::elevation);
    double sum = 0.0;
    for (std::size_t n = 0; n < est.values.size(); ++n)
        sum += std::abs(est.values[n] - gt.values[n]);
    return sum / static_cast<double>(est.values.size());
}

std::pair<AngleSeries, AngleSeries> trajectory_angles(const Trajectory3D& traj)
{
    traj.validate();
    AngleSeries az{{}, AngleKind::azimuth};
    AngleSeries el{{}, AngleKind::elevation};
    for (const Vec3& p : traj.points) {
        const SphericalDirection d = cartesian_to_spherical(p);
        az.values.push_back(d.azimuth_deg);
        el.values.push_back(d.elevation_deg);
    }
    return {std::move(az), std::move(el)};
}

std::size_t window_count(std::size_t samples, std::size_t window, std::size_t hop)
{
    if (window == 0 || hop == 0)
        throw Error("window and hop must be at least one sample");
    if (window > samples)
        throw Error(fmt::format("window of {} samples longer than signal ({})", window, samples));
    return 1 + (samples - window) / hop;
}

CueSeries estimate_ild(const BinauralAudio& audio, double window_s, double hop_s)
{
    const Windowing w = make_windows(audio, window_s, hop_s);
    CueSeries out;
    out.window_s = window_s;
    out.hop_s = hop_s;
    const std::span<const double> left(audio.left);
    const std::span<const double> right(audio.right);
    for (std::size_t i = 0; i < w.count; ++i) {
        const double rl = rms(left.subspan(i * w.hop, w.window));
        const double rr = rms(right.subspan(i * w.hop, w.window));
        const bool quiet = rl < kSilenceRms && rr < kSilenceRms;
        out.silent.push_back(quiet);
        out.low_confidence.push_back(false);
        out.ild_db.push_back(quiet ? 0.0
                                   : 20.0 * (std::log10(std::max(rl, kRmsFloor)) -
                                             std::log10(std::max(rr, kRmsFloor))));
    }
    return out;
}

CueSeries estimate_itd(const BinauralAudio& audio, double window_s, double hop_s, double max_lag_s)
{
    const Windowing w = make_windows(audio, window_s, hop_s);
    const long max_lag = std::lround(max_lag_s * audio.sample_rate);
    if (max_lag < 1)
        throw Error(fmt::format("max lag {} s is shorter than one sample", max_lag_s));
    const long lag_limit = std::min(max_lag, static_cast<long>(w.window) - 1);

    CueSeries out;
    out.window_s = window_s;
    out.hop_s = hop_s;
    const std::span<const double> left(audio.left);
    const std::span<const double> right(audio.right);
    for (std::size_t i = 0; i < w.count; ++i) {
        const auto l = left.subspan(i * w.hop, w.window);
        const auto r = right.subspan(i * w.hop, w.window);
        const bool quiet = rms(l) < kSilenceRms && rms(r) < kSilenceRms;
        out.silent.push_back(quiet);
        if (quiet) {
            out.itd_s.push_back(0.0);
            out.low_confidence.push_back(true);
            continue;
        }
        long best_lag = 0;
        double best = correlate(l, r, 0);
        double magnitude = 0.0;
        for (long lag = -lag_limit; lag <= lag_limit; ++lag) {
            const double c = correlate(l, r, lag);
            magnitude += std::abs(c);
            if (c > best || (c == best && std::abs(lag) < std::abs(best_lag))) {
                best = c;
                best_lag = lag;
            }
        }
        const double mean = magnitude / static_cast<double>(2 * lag_limit + 1);
        out.low_confidence.push_back(!(best > 0.0) || best < 2.0 * mean);
        out.itd_s.push_back(static_cast<double>(best_lag) / audio.sample_rate);
    }
    return out;
}

SideConsistency side_consistency(const BinauralAudio& audio, const Trajectory3D& traj,
                                 double window_s)
{
    traj.validate();
    audio.validate();
    const double audio_s = audio.duration_s();
    const double traj_s = static_cast<double>(traj.size()) / traj.rate;
    if (std::abs(audio_s - traj_s) > 0.05 * std::max(audio_s, traj_s))
        throw Error(fmt::format("duration mismatch: audio {:.3f} s, trajectory {:.3f} s", audio_s,
                                traj_s));

    const CueSeries ild = estimate_ild(audio, window_s, window_s);
    const auto window = static_cast<double>(std::max(1L, std::lround(window_s * audio.sample_rate)));
    SideConsistency out;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < ild.size(); ++i) {
        const double centre_s = (static_cast<double>(i) + 0.5) * window / audio.sample_rate;
        const auto idx = std::min(traj.size() - 1,
                                  static_cast<std::size_t>(std::floor(centre_s * traj.rate)));
        const double y = traj.points[idx].y;
        if (ild.silent[i] || std::abs(y) < kCenterDeadZoneM) {
            ++out.skipped;
            continue;
        }
        ++out.considered;
        if (sign(-ild.ild_db[i]) == sign(y))
            ++matches;
    }
    if (out.considered > 0)
        out.fraction = static_cast<double>(matches) / static_cast<double>(out.considered);
    return out;
}

} // namespace sonotrack
