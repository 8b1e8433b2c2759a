// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "sonotrack/audio.hpp"
#include "sonotrack/render.hpp"
#include "sonotrack/trajectory_io.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

using namespace sonotrack;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string s(const fs::path& p) { return p.string(); }

} // namespace

TEST_CASE("cli usage")
{
    auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("build-dataset") != std::string::npos);
    r = run({"render", "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("200 fine, 8 coarse") != std::string::npos);
    CHECK(r.out.find("[fine]") != std::string::npos);
    r = run({"map", "--help"});
    CHECK(r.out.find("[25]") != std::string::npos);
    CHECK(r.out.find("[1.47]") != std::string::npos);
    r = run({"build-dataset", "--help"});
    CHECK(r.out.find("[8]") != std::string::npos);

    r = run({});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.rfind("error:", 0) == 0);
    r = run({"render", "--scheme", "medium"});
    CHECK(r.code == cli::kExitUsage);
    r = run({"frobnicate"});
    CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("cli map")
{
    oracle::TempDir dir("cli-map");
    fixture::write_track(dir.path(), 200, 160, 90, 80.0, 80.0, 45.0);
    auto r = run({"map", "--track", s(dir / "track.json"), "--depth-dir", s(dir / "depth"), "--width",
                  "160", "--height", "90", "--out", s(dir / "fine.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto fine = load_trajectory(dir / "fine.json");
    CHECK(fine.size() == 200);
    for (const auto& p : fine.points) {
        CHECK(p.y == 0.0);
        CHECK(p.z == 0.0);
    }

    r = run({"map", "--track", s(dir / "track.json"), "--depth-dir", s(dir / "depth"), "--width",
             "160", "--height", "90", "--scheme", "coarse", "--out", s(dir / "coarse.json")});
    REQUIRE(r.code == 0);
    const auto coarse = load_trajectory(dir / "coarse.json");
    CHECK(coarse.size() == 8);
    CHECK(coarse.rate == 1.0);

    fs::remove(dir / "depth" / "frame_000005.f32");
    r = run({"map", "--track", s(dir / "track.json"), "--depth-dir", s(dir / "depth"), "--width",
             "160", "--height", "90", "--out", s(dir / "x.json")});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find("missing depth frame 5") != std::string::npos);
}

TEST_CASE("cli render, eval and hrir")
{
    oracle::TempDir dir("cli-render");
    const int rate = 8000;
    const auto hrir = fixture::write_hrir(dir / "hrir", rate);
    const auto mono = fixture::write_noise(dir / "mono.wav", 2.0, rate);
    const Trajectory3D right{std::vector<Vec3>(50, Vec3{0.3, 1.2, 0.0}), 25.0};
    save_trajectory(right, dir / "right.json");

    auto r = run({"render", "--mono", s(mono), "--trajectory", s(dir / "right.json"), "--hrir", s(hrir),
                  "--out", s(dir / "out.wav")});
    REQUIRE(r.code == 0);
    const auto out = read_binaural_wav(dir / "out.wav");
    CHECK(out.size() == 16000);

    r = run({"eval", "--est", s(dir / "right.json"), "--gt", s(dir / "right.json"), "--audio",
             s(dir / "out.wav"), "--report", s(dir / "report.json")});
    REQUIRE(r.code == 0);
    auto report = nlohmann::json::parse(oracle::read_bytes(dir / "report.json"));
    CHECK(report.at("mae_azimuth_deg") == 0.0);
    CHECK(report.at("mae_elevation_deg") == 0.0);
    CHECK(report.at("side_consistency") == 1.0);

    save_trajectory({{{1, std::tan(10 * std::numbers::pi / 180), 0}}, 1.0}, dir / "est.json");
    save_trajectory({{{1, -std::tan(10 * std::numbers::pi / 180), 0}}, 1.0}, dir / "gt.json");
    r = run({"eval", "--est", s(dir / "est.json"), "--gt", s(dir / "gt.json"), "--report",
             s(dir / "wrap.json")});
    REQUIRE(r.code == 0);
    report = nlohmann::json::parse(oracle::read_bytes(dir / "wrap.json"));
    CHECK(report.at("mae_azimuth_deg").get<double>() == doctest::Approx(20.0).epsilon(1e-4));
    r = run({"eval", "--est", s(dir / "est.json"), "--gt", s(dir / "right.json"), "--report",
             s(dir / "bad.json")});
    CHECK(r.code == cli::kExitRuntime);

    r = run({"hrir", "--manifest", s(hrir)});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("directions:     648") != std::string::npos);
    CHECK(r.out.find("coarse subset:  complete") != std::string::npos);

    SUBCASE("errors")
    {
        const auto fast = fixture::write_noise(dir / "fast.wav", 0.5, 16000);
        r = run({"render", "--mono", s(fast), "--trajectory", s(dir / "right.json"), "--hrir", s(hrir),
                 "--out", s(dir / "x.wav")});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("sample-rate mismatch") != std::string::npos);

        MonoAudio tiny{{0.1, 0.2, 0.3}, rate};
        write_mono_wav(dir / "tiny.wav", tiny);
        r = run({"render", "--mono", s(dir / "tiny.wav"), "--trajectory", s(dir / "right.json"),
                 "--hrir", s(hrir), "--out", s(dir / "x.wav")});
        CHECK(r.code == cli::kExitRuntime);

        std::ofstream(dir / "broken.json") << "{";
        r = run({"render", "--mono", s(mono), "--trajectory", s(dir / "right.json"), "--hrir",
                 s(dir / "broken.json"), "--out", s(dir / "x.wav")});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.rfind("error:", 0) == 0);
    }
}

TEST_CASE("cli build-dataset")
{
    oracle::TempDir dir("cli-ds");
    const int rate = 8000;
    const auto hrir = fixture::write_hrir(dir / "hrir", rate);
    fs::create_directories(dir / "corpus");
    fixture::write_noise(dir / "corpus" / "a.wav", 1.0, rate, 1);
    fixture::write_noise(dir / "corpus" / "b.wav", 1.0, rate, 2);

    auto build = [&](const std::string& out, const std::string& scheme, const std::string& seed) {
        return run({"build-dataset", "--corpus", s(dir / "corpus"), "--hrir", s(hrir), "--out",
                    s(dir / out), "--scheme", scheme, "--seed", seed, "--clip-seconds", "1"});
    };
    auto r = build("ds", "fine", "7");
    REQUIRE(r.code == 0);
    CHECK(r.out == s(dir / "ds" / "fine" / "manifest.json") + "\n");
    const auto manifest = nlohmann::json::parse(oracle::read_bytes(dir / "ds" / "fine" / "manifest.json"));
    CHECK(manifest.at("entries").size() == 2);
    CHECK(manifest.at("segments") == 200);

    REQUIRE(build("ds2", "fine", "7").code == 0);
    CHECK(oracle::read_bytes(dir / "ds" / "fine" / "a" / "binaural.wav") ==
          oracle::read_bytes(dir / "ds2" / "fine" / "a" / "binaural.wav"));

    REQUIRE(build("ds", "coarse", "7").code == 0);
    CHECK(fs::exists(dir / "ds" / "coarse" / "manifest.json"));
    CHECK(fs::exists(dir / "ds" / "fine" / "manifest.json"));
    CHECK(nlohmann::json::parse(oracle::read_bytes(dir / "ds" / "coarse" / "manifest.json")).at("segments") == 8);

    r = build("ds3", "fine", "seven");
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("--seed") != std::string::npos);
    CHECK(build("ds3", "fine", "-1").code == cli::kExitUsage);
}
