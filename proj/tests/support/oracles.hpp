// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests. They are written
// for clarity, not speed, and share no code with the library.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace oracle {

using Point = std::array<double, 3>;

/// Direct-form convolution evaluated per output sample.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h)
{
    if (x.empty() || h.empty())
        return {};
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < y.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k)
            if (n >= k && n - k < x.size())
                acc += h[k] * x[n - k];
        y[n] = acc;
    }
    return y;
}

/// Linear-interpolation time stretch by `ratio` with output length
/// round(L * ratio); samples past the end read as zero.
inline std::vector<double> stretch(const std::vector<double>& x, double ratio, double gain)
{
    const auto len = static_cast<std::size_t>(std::llround(static_cast<double>(x.size()) * ratio));
    std::vector<double> y(len, 0.0);
    for (std::size_t n = 0; n < len; ++n) {
        const double pos = static_cast<double>(n) / ratio;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        const double a = i < x.size() ? x[i] : 0.0;
        const double b = i + 1 < x.size() ? x[i + 1] : 0.0;
        y[n] = gain * (a + frac * (b - a));
    }
    return y;
}

/// Sorted-sample percentile with linear interpolation between ranks.
inline double percentile(std::vector<double> v, double p)
{
    std::sort(v.begin(), v.end());
    const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Drop-and-interpolate reference: a step longer than the 95th percentile
/// flags both of its frames, flagged frames lose one neighbour on each side,
/// and every dropped frame is rebuilt from the closest kept frames.
inline std::vector<Point> smooth(const std::vector<Point>& pts)
{
    const std::size_t k = pts.size();
    std::vector<double> steps;
    for (std::size_t i = 1; i < k; ++i)
        steps.push_back(std::sqrt(std::pow(pts[i][0] - pts[i - 1][0], 2) +
                                  std::pow(pts[i][1] - pts[i - 1][1], 2) +
                                  std::pow(pts[i][2] - pts[i - 1][2], 2)));
    const double thr = percentile(steps, 95.0);
    std::vector<bool> flagged(k, false);
    for (std::size_t i = 0; i < steps.size(); ++i)
        if (steps[i] > thr + 1e-9 * std::abs(thr) + 1e-12)
            flagged[i] = flagged[i + 1] = true;
    std::vector<bool> dropped(k, false);
    for (std::size_t i = 0; i < k; ++i)
        if (flagged[i])
            for (std::size_t j = (i == 0 ? 0 : i - 1); j <= std::min(k - 1, i + 1); ++j)
                dropped[j] = true;

    if (std::find(dropped.begin(), dropped.end(), false) == dropped.end())
        return {}; // nothing survives
    std::vector<Point> out = pts;
    for (std::size_t i = 0; i < k; ++i) {
        if (!dropped[i])
            continue;
        std::optional<std::size_t> left, right;
        for (std::size_t j = i; j-- > 0;)
            if (!dropped[j]) {
                left = j;
                break;
            }
        for (std::size_t j = i + 1; j < k; ++j)
            if (!dropped[j]) {
                right = j;
                break;
            }
        for (int c = 0; c < 3; ++c) {
            if (left && right) {
                const double t = static_cast<double>(i - *left) / static_cast<double>(*right - *left);
                out[i][c] = pts[*left][c] + t * (pts[*right][c] - pts[*left][c]);
            } else {
                out[i][c] = left ? pts[*left][c] : pts[*right][c];
            }
        }
    }
    return out;
}

/// Woodworth ITD for a source in the horizontal plane, az in (-90, 90] with
/// left positive.
inline double woodworth_horizontal(double az_deg, double radius = 0.0875, double c = 343.0)
{
    const double th = az_deg * std::numbers::pi / 180.0;
    return radius / c * (th + std::sin(th));
}

/// Lag (in samples, positive = left leads) maximizing sum_n l[n] r[n + lag],
/// preferring the smallest |lag| and then the negative one on ties.
inline int xcorr_peak_lag(const std::vector<double>& l, const std::vector<double>& r, int max_lag)
{
    int best = 0;
    double best_v = -1e300;
    for (int mag = 0; mag <= max_lag; ++mag) {
        for (int lag : {-mag, mag}) {
            double v = 0.0;
            for (std::size_t n = 0; n < l.size(); ++n) {
                const long m = static_cast<long>(n) + lag;
                if (m >= 0 && m < static_cast<long>(r.size()))
                    v += l[n] * r[static_cast<std::size_t>(m)];
            }
            if (v > best_v) {
                best_v = v;
                best = lag;
            }
        }
    }
    return best;
}

inline double rms(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

/// Reproducible white noise in [-amp, amp).
inline std::vector<double> noise(std::size_t n, std::uint64_t seed, double amp = 0.5)
{
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (auto& x : out)
        x = amp * (2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0);
    return out;
}

inline std::string read_bytes(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("sonotrack-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace oracle
