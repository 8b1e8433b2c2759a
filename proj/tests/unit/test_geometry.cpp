// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/common.hpp"
#include "sonotrack/geometry.hpp"

#include "../support/approx.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <utility>

using namespace sonotrack;
using oracle::near;

namespace {

const FrameSpec kFrame{1470, 810, 25.0};

Trajectory3D make(std::vector<Vec3> pts) { return {std::move(pts), 25.0}; }

} // namespace

TEST_CASE("mapping factor")
{
    SoundFieldConfig cfg;
    CHECK(mapping_factor(kFrame, cfg) == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(mapping_factor({2, 2, 25.0}, SoundFieldConfig{1.0, {}, 6.0}) == doctest::Approx(1.0));
    CHECK(mapping_factor(kFrame, SoundFieldConfig{2.94, {}, 6.0}) ==
          doctest::Approx(0.004).epsilon(1e-12));
    CHECK_THROWS_AS(mapping_factor({0, 10, 25.0}, cfg), Error);
}

TEST_CASE("depth normalization")
{
    CHECK(normalize_depth(2.0, 2.0, 8.0, 735.0) == 0.0);
    CHECK(normalize_depth(8.0, 2.0, 8.0, 735.0) == doctest::Approx(735.0));
    CHECK(normalize_depth(5.0, 2.0, 8.0, 735.0) == doctest::Approx(367.5));
    CHECK(normalize_depth(3.0, 3.0, 3.0, 735.0) == doctest::Approx(367.5));
    CHECK_THROWS_AS(normalize_depth(9.0, 2.0, 8.0, 735.0), Error);
    CHECK_THROWS_AS(normalize_depth(5.0, 2.0, 8.0, 0.0), Error);
}

TEST_CASE("map to sound field examples")
{
    const SoundFieldConfig cfg;
    SUBCASE("frame center lies on the forward axis")
    {
        for (double d : {0.0, 2.5, 10.0}) {
            const Vec3 p = map_to_sound_field({0, 735.0, 405.0, d}, kFrame, cfg, 0.0, 10.0);
            CHECK(p.y == 0.0);
            CHECK(p.z == 0.0);
            CHECK(p.x == doctest::Approx(0.002 * 735.0 * d / 10.0));
        }
    }
    SUBCASE("right half, far plane")
    {
        const Vec3 p = map_to_sound_field({0, 1102.5, 405.0, 10.0}, kFrame, cfg, 0.0, 10.0);
        CHECK(near(p, {1.47, 0.735, 0.0}, 1e-12));
    }
    SUBCASE("top-left pixel, near plane")
    {
        // y = 0.002 * (0 - 735) and z = -0.002 * (0 - 405).
        const Vec3 p = map_to_sound_field({0, 0.0, 0.0, 0.0}, kFrame, cfg, 0.0, 10.0);
        CHECK(near(p, {0.0, -1.47, 0.81}, 1e-12));
    }
    SUBCASE("explicit gamma")
    {
        SoundFieldConfig g;
        g.gamma = 100.0;
        const Vec3 p = map_to_sound_field({0, 735.0, 405.0, 10.0}, kFrame, g, 0.0, 10.0);
        CHECK(p.x == doctest::Approx(0.2));
    }
    CHECK_THROWS_AS(map_to_sound_field({0, 1470.0, 0.0, 1.0}, kFrame, cfg, 0.0, 2.0), Error);
    CHECK_THROWS_AS(map_to_sound_field({0, -0.5, 0.0, 1.0}, kFrame, cfg, 0.0, 2.0), Error);
}

TEST_CASE("map to sound field properties")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const SoundFieldConfig cfg;
    for (int trial = 0; trial < 500; ++trial) {
        const int width = 64 + static_cast<int>(u(gen) * 2000);
        const int height = 64 + static_cast<int>(u(gen) * 2000);
        const FrameSpec frame{width, height, 25.0};
        const double w = u(gen) * width;
        const double h = u(gen) * height;
        const double d = u(gen) * 20.0;
        const Vec3 p = map_to_sound_field({0, w, h, d}, frame, cfg, 0.0, 20.0);
        CHECK(p.x >= 0.0);
        CHECK(std::abs(p.y) <= cfg.s_y * (1.0 + 1.0 / width));

        // Scaling the frame and pixel coordinates together leaves (y, z) fixed.
        const int c = 1 + static_cast<int>(u(gen) * 4);
        const Vec3 q = map_to_sound_field({0, w * c, h * c, d}, {width * c, height * c, 25.0}, cfg,
                                          0.0, 20.0);
        CHECK(near(p.y, q.y, 1e-12));
        CHECK(near(p.z, q.z, 1e-12));

        // Linearity in the offset from the frame centre.
        const Vec3 centre = map_to_sound_field({0, width / 2.0, height / 2.0, d}, frame, cfg, 0.0, 20.0);
        const double delta = mapping_factor(frame, cfg);
        CHECK(near(p.y - centre.y, delta * (w - width / 2.0), 1e-12));
        CHECK(near(p.z - centre.z, -delta * (h - height / 2.0), 1e-12));
    }
}

TEST_CASE("motion magnitudes")
{
    CHECK(motion_magnitudes(make({{0, 0, 0}, {3, 4, 0}})) == std::vector<double>{5.0});
    CHECK(motion_magnitudes(make({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})) ==
          std::vector<double>{0.0, 0.0});
    CHECK(motion_magnitudes(make({{0, 0, 0}, {1, 0, 0}, {1, 0, 2}})) ==
          std::vector<double>{1.0, 2.0});
    CHECK_THROWS_WITH_AS(motion_magnitudes(make({{0, 0, 0}})), doctest::Contains("trajectory too short"), Error);
}

TEST_CASE("linear percentile")
{
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(percentile_linear(v, 0.0) == 1.0);
    CHECK(percentile_linear(v, 1.0) == 4.0);
    CHECK(percentile_linear(v, 0.5) == doctest::Approx(2.5));
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> s(1 + t % 37);
        for (auto& x : s)
            x = u(gen);
        CHECK(near(percentile_linear(s, 0.95), oracle::percentile(s, 95.0), 1e-12));
    }
}

TEST_CASE("gap filling")
{
    std::vector<std::optional<Vec3>> pts{std::nullopt, Vec3{1, 0, 0}, std::nullopt,
                                         Vec3{3, 2, 0}, std::nullopt};
    const auto out = fill_gaps(pts);
    REQUIRE(out.size() == 5);
    CHECK(out[0] == Vec3{1, 0, 0});
    CHECK(out[2] == Vec3{2, 1, 0});
    CHECK(out[4] == Vec3{3, 2, 0});
    std::vector<std::optional<Vec3>> none(3);
    CHECK_THROWS_WITH_AS(fill_gaps(none), doctest::Contains("trajectory unrecoverable"), Error);
}

TEST_CASE("smoothing")
{
    SUBCASE("constant trajectories are fixed points")
    {
        const Trajectory3D c = make(std::vector<Vec3>(40, Vec3{1.5, -0.25, 0.75}));
        CHECK(smooth_trajectory(c).points == c.points);
    }
    SUBCASE("short spike sits at the 95th percentile and survives")
    {
        // Two of the ten steps touch the spike, so the interpolated 95th
        // percentile equals the spike height and nothing strictly exceeds it.
        std::vector<Vec3> pts(11);
        pts[6] = {10, 0, 0};
        const Trajectory3D out = smooth_trajectory(make(pts));
        CHECK(out.points == pts);
    }
    SUBCASE("spike in a longer zero track is removed")
    {
        std::vector<Vec3> pts(31);
        pts[6] = {10, 0, 0};
        const Trajectory3D out = smooth_trajectory(make(pts));
        for (const auto& p : out.points)
            CHECK(p == Vec3{});
    }
    SUBCASE("ramp with an outlier is restored")
    {
        std::vector<Vec3> ramp(60);
        for (std::size_t k = 0; k < ramp.size(); ++k)
            ramp[k] = {0.5 + 0.01 * k, -0.3 + 0.005 * k, 0.02 * k};
        auto noisy = ramp;
        noisy[25] = {4.0, 1.0, -2.0};
        const Trajectory3D out = smooth_trajectory(make(noisy));
        for (std::size_t k = 0; k < ramp.size(); ++k)
            CHECK(near(out.points[k], ramp[k], 1e-9));
    }
    SUBCASE("spike on the first frame is held from the nearest survivor")
    {
        std::vector<Vec3> pts(40, Vec3{1, 1, 1});
        pts[0] = {5, 5, 5};
        const Trajectory3D out = smooth_trajectory(make(pts));
        CHECK(out.points[0] == Vec3{1, 1, 1});
    }
    SUBCASE("idempotent on linear tracks")
    {
        std::vector<Vec3> ramp(50);
        for (std::size_t k = 0; k < ramp.size(); ++k)
            ramp[k] = {0.1 * k, 0.0, -0.05 * k};
        const Trajectory3D once = smooth_trajectory(make(ramp));
        const Trajectory3D twice = smooth_trajectory(once);
        for (std::size_t k = 0; k < ramp.size(); ++k) {
            CHECK(near(once.points[k], ramp[k], 1e-12));
            CHECK(near(twice.points[k], once.points[k], 1e-12));
        }
    }
    CHECK(smooth_trajectory(make({{0, 0, 0}, {1, 0, 0}})).size() == 2);
}

TEST_CASE("smoothing agrees with the brute-force reference")
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 3 + gen() % 120;
        std::vector<Vec3> pts(k);
        std::vector<oracle::Point> ref(k);
        Vec3 p{2.0, 0.0, 0.0};
        for (std::size_t i = 0; i < k; ++i) {
            p = {p.x + 0.05 * u(gen), p.y + 0.05 * u(gen), p.z + 0.05 * u(gen)};
            pts[i] = p;
        }
        for (int s = 0; s < 1 + trial % 3; ++s)
            pts[gen() % k] = {3 * u(gen), 3 * u(gen), 3 * u(gen)};
        for (std::size_t i = 0; i < k; ++i)
            ref[i] = {pts[i].x, pts[i].y, pts[i].z};
        const auto want = oracle::smooth(ref);
        if (want.empty()) {
            CHECK_THROWS_WITH_AS(smooth_trajectory(make(pts)), doctest::Contains("unrecoverable"), Error);
            continue;
        }
        const auto got = smooth_trajectory(make(pts));
        for (std::size_t i = 0; i < k; ++i)
            CHECK(near(got.points[i], {want[i][0], want[i][1], want[i][2]}, 1e-12));
    }
}

TEST_CASE("grid quantization")
{
    const FrameSpec frame{1500, 900, 25.0};
    const GridScheme grid;
    auto q = quantize_to_grid(200, 100, frame, grid);
    CHECK(q.col == 1);
    CHECK(q.row == 1);
    CHECK(q.center_w == 150.0);
    CHECK(q.center_h == 150.0);
    q = quantize_to_grid(750, 450, frame, grid);
    CHECK(q.col == 3);
    CHECK(q.row == 2);
    CHECK(q.center_w == 750.0);
    CHECK(q.center_h == 450.0);
    q = quantize_to_grid(1499, 899, frame, grid);
    CHECK(q.col == 5);
    CHECK(q.row == 3);
    CHECK(q.center_w == 1350.0);
    CHECK(q.center_h == 750.0);
    // Boundaries belong to the higher cell.
    CHECK(quantize_to_grid(300, 300, frame, grid).col == 2);
    CHECK(quantize_to_grid(300, 300, frame, grid).row == 2);
    CHECK_THROWS_AS(quantize_to_grid(1500, 10, frame, grid), Error);
    CHECK_THROWS_AS(quantize_to_grid(10, -1, frame, grid), Error);
}

TEST_CASE("depth quantization")
{
    const GridScheme grid;
    CHECK(quantize_depth(2.4, grid) == 2.0);
    CHECK(quantize_depth(4.5, grid) == 4.0);
    CHECK(quantize_depth(9.0, grid) == 5.0);
    CHECK(quantize_depth(0.0, grid) == 1.0);
    CHECK(depth_bin_index(1.5, grid) == 0);
    CHECK_THROWS_AS(quantize_depth(-1.0, grid), Error);
}

TEST_CASE("coarse positions")
{
    const GridScheme grid;
    const auto pts = coarse_positions(grid);
    REQUIRE(pts.size() == 75);
    std::set<std::tuple<long, long, long>> triples;
    std::set<std::pair<long, long>> directions;
    for (const auto& p : pts) {
        const auto s = cartesian_to_spherical(p);
        triples.emplace(std::lround(s.azimuth_deg * 1e6), std::lround(s.elevation_deg * 1e6),
                        std::lround(s.radius_m * 1e6));
        directions.emplace(std::lround(s.azimuth_deg * 1e6), std::lround(s.elevation_deg * 1e6));
    }
    CHECK(triples.size() == 75);
    CHECK(directions.size() == 15);

    const auto s = cartesian_to_spherical(coarse_position(1, 3, 4, grid));
    CHECK(near(s.azimuth_deg, 80.0, 1e-9));
    CHECK(near(s.elevation_deg, -40.0, 1e-9));
    CHECK(near(s.radius_m, 5.0, 1e-9));
    CHECK_THROWS_AS(coarse_position(0, 1, 0, grid), Error);
    CHECK_THROWS_AS(coarse_position(1, 1, 5, grid), Error);
}

TEST_CASE("spherical conversion")
{
    auto s = cartesian_to_spherical({1, 0, 0});
    CHECK(near(s.azimuth_deg, 0.0, 1e-12));
    CHECK(near(s.elevation_deg, 0.0, 1e-12));
    CHECK(near(s.radius_m, 1.0, 1e-12));
    s = cartesian_to_spherical({0, -1, 0});
    CHECK(near(s.azimuth_deg, 90.0, 1e-12));
    s = cartesian_to_spherical({0, 1, 0});
    CHECK(near(s.azimuth_deg, 270.0, 1e-12));
    s = cartesian_to_spherical({1, 0, 1});
    CHECK(near(s.azimuth_deg, 0.0, 1e-12));
    CHECK(near(s.elevation_deg, 45.0, 1e-12));
    CHECK(near(s.radius_m, std::sqrt(2.0), 1e-12));
    CHECK_THROWS_WITH_AS(cartesian_to_spherical({0, 0, 0}), doctest::Contains("undefined direction"), Error);

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> az(0.0, 360.0), el(-89.0, 89.0), r(1e-3, 10.0);
    for (int t = 0; t < 1000; ++t) {
        const SphericalDirection d{az(gen), el(gen), r(gen)};
        const auto back = cartesian_to_spherical(spherical_to_cartesian(d));
        const double daz = std::abs(back.azimuth_deg - d.azimuth_deg);
        CHECK(std::min(daz, 360.0 - daz) < 1e-9);
        CHECK(near(back.elevation_deg, d.elevation_deg, 1e-9));
        CHECK(near(back.radius_m, d.radius_m, 1e-9 * d.radius_m));
    }
}

TEST_CASE("degree wrapping")
{
    CHECK(wrap_degrees(-10.0) == doctest::Approx(350.0));
    CHECK(wrap_degrees(360.0) == 0.0);
    CHECK(wrap_degrees(725.0) == doctest::Approx(5.0));
    CHECK(wrap_degrees(-1e-18) < 360.0);
}
