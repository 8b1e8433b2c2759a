// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/render.hpp"

#include "sonotrack/common.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace sonotrack {

namespace {

void add_into(std::vector<double>& dst, std::size_t offset, std::span<const double> src)
{
    const std::size_t n = std::min(src.size(), dst.size() > offset ? dst.size() - offset : 0);
    for (std::size_t i = 0; i < n; ++i)
        dst[offset + i] += src[i];
}

} // namespace

void RenderPlan::validate() const
{
    if (segments < 1)
        throw Error("render plan needs at least one segment");
    if (positions.size() != segments)
        throw Error(fmt::format("render plan has {} positions for {} segments", positions.size(),
                                segments));
}

std::vector<std::span<const double>> segment_audio(const MonoAudio& mono, std::size_t segments)
{
    if (segments < 1)
        throw Error("segment count must be at least 1");
    const std::size_t n = mono.samples.size();
    if (n < segments)
        throw Error(fmt::format("audio has {} samples, fewer than {} segments", n, segments));
    const std::size_t base = n / segments;
    std::vector<std::span<const double>> out;
    out.reserve(segments);
    const std::span<const double> all(mono.samples);
    for (std::size_t m = 0; m < segments; ++m) {
        const std::size_t len = m + 1 < segments ? base : n - base * (segments - 1);
        out.push_back(all.subspan(m * base, len));
    }
    return out;
}

RenderPlan trajectory_to_plan(const Trajectory3D& traj, std::size_t segments,
                              const RenderOptions& options)
{
    traj.validate();
    if (segments < 1)
        throw Error("segment count must be at least 1");
    RenderPlan plan;
    plan.segments = segments;
    plan.positions.reserve(segments);
    const std::size_t k = traj.size();
    for (std::size_t m = 0; m < segments; ++m) {
        // Segment midpoint (m + 1/2) / M, mapped onto K equal-length frames.
        const std::size_t idx = std::min(k - 1, ((2 * m + 1) * k) / (2 * segments));
        const Vec3& p = traj.points[idx];
        SphericalDirection dir{0.0, 0.0, 0.0};
        if (norm(p) > 0.0)
            dir = cartesian_to_spherical(p);
        dir.radius_m = std::max(dir.radius_m, options.min_distance);
        plan.positions.push_back(dir);
    }
    return plan;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h)
{
    if (x.empty() || h.empty())
        return {};
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0)
            continue;
        for (std::size_t k = 0; k < h.size(); ++k)
            y[i + k] += xi * h[k];
    }
    return y;
}

SegmentRender convolve_binaural(std::span<const double> segment, const Hrir& h, int sample_rate)
{
    if (segment.empty())
        throw Error("cannot convolve an empty segment");
    h.validate();
    auto split = [&](std::vector<double> full, std::vector<double>& tail) {
        tail.assign(full.begin() + static_cast<std::ptrdiff_t>(segment.size()), full.end());
        full.resize(segment.size());
        return full;
    };
    SegmentRender out;
    out.body.sample_rate = sample_rate;
    out.body.left = split(convolve(segment, h.left), out.tail_left);
    out.body.right = split(convolve(segment, h.right), out.tail_right);
    return out;
}

BinauralAudio crossfade(const BinauralAudio& a, const BinauralAudio& b)
{
    if (a.size() != b.size() || a.right.size() != b.right.size() || a.left.size() != a.right.size())
        throw Error(fmt::format("crossfade length mismatch ({} vs {})", a.size(), b.size()));
    if (a.sample_rate != b.sample_rate)
        throw Error("crossfade sample-rate mismatch");
    const std::size_t n = a.size();
    BinauralAudio out{std::vector<double>(n), std::vector<double>(n), a.sample_rate};
    for (std::size_t t = 0; t < n; ++t) {
        const double alpha = n > 1 ? static_cast<double>(t) / static_cast<double>(n - 1) : 0.0;
        out.left[t] = std::lerp(a.left[t], b.left[t], alpha);
        out.right[t] = std::lerp(a.right[t], b.right[t], alpha);
    }
    return out;
}

void peak_normalize(BinauralAudio& audio)
{
    double peak = 0.0;
    for (const double v : audio.left)
        peak = std::max(peak, std::abs(v));
    for (const double v : audio.right)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        return;
    for (double& v : audio.left)
        v /= peak;
    for (double& v : audio.right)
        v /= peak;
}

BinauralAudio render_moving_source(const MonoAudio& mono, const Trajectory3D& traj,
                                   const HrirSet& set, std::size_t segments,
                                   const RenderOptions& options)
{
    mono.validate();
    set.validate();
    if (mono.samples.empty())
        throw Error("mono audio is empty");
    if (set.sample_rate() != mono.sample_rate)
        throw Error(fmt::format("sample-rate mismatch: audio {} Hz, HRIR set '{}' {} Hz",
                                mono.sample_rate, set.subject_id, set.sample_rate()));

    const auto pieces = segment_audio(mono, segments);
    const RenderPlan plan = trajectory_to_plan(traj, segments, options);

    const ResampleOptions resample{options.distance_gain, options.max_distance};
    std::vector<const Hrir*> measured(segments);
    std::vector<Hrir> filters;
    filters.reserve(segments);
    std::size_t longest = 0;
    for (std::size_t m = 0; m < segments; ++m) {
        measured[m] = &select_direction(set, plan.positions[m]);
        const bool same = m > 0 && measured[m] == measured[m - 1] &&
                          plan.positions[m].radius_m == plan.positions[m - 1].radius_m;
        filters.push_back(same ? filters.back()
                               : resample_for_distance(*measured[m], plan.positions[m].radius_m,
                                                       set.ref_distance_m, resample));
        longest = std::max(longest, filters.back().length());
    }

    const std::size_t n = mono.samples.size();
    std::vector<double> left(n + longest - 1, 0.0);
    std::vector<double> right(n + longest - 1, 0.0);
    std::size_t offset = 0;
    for (std::size_t m = 0; m < segments; ++m) {
        const auto seg = pieces[m];
        SegmentRender own = convolve_binaural(seg, filters[m], mono.sample_rate);
        BinauralAudio body;
        const std::vector<double>* tail_l = &own.tail_left;
        const std::vector<double>* tail_r = &own.tail_right;
        SegmentRender next;
        const bool moves = m + 1 < segments &&
                           (measured[m + 1] != measured[m] ||
                            plan.positions[m + 1].radius_m != plan.positions[m].radius_m);
        if (moves) {
            next = convolve_binaural(seg, filters[m + 1], mono.sample_rate);
            body = crossfade(own.body, next.body);
            // The blend ends at weight 1 (unless the segment is a single
            // sample), so the ringing belongs to the next position.
            if (seg.size() > 1) {
                tail_l = &next.tail_left;
                tail_r = &next.tail_right;
            }
        } else {
            body = std::move(own.body);
        }
        add_into(left, offset, body.left);
        add_into(right, offset, body.right);
        add_into(left, offset + seg.size(), *tail_l);
        add_into(right, offset + seg.size(), *tail_r);
        offset += seg.size();
    }
    left.resize(n);
    right.resize(n);

    BinauralAudio out{std::move(left), std::move(right), mono.sample_rate};
    if (options.normalize)
        peak_normalize(out);
    return out;
}

} // namespace sonotrack
