// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "sonotrack/audio.hpp"
#include "sonotrack/common.hpp"
#include "sonotrack/dataset.hpp"
#include "sonotrack/geometry.hpp"
#include "sonotrack/hrir.hpp"
#include "sonotrack/ingest.hpp"
#include "sonotrack/metrics.hpp"
#include "sonotrack/pipeline.hpp"
#include "sonotrack/render.hpp"
#include "sonotrack/trajectory_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <nlohmann/json.hpp>

namespace sonotrack::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct MapArgs {
    std::string track;
    std::string depth_dir;
    int width = 0;
    int height = 0;
    double fps = kDefaultFps;
    double s_y = 1.47;
    double gamma = 0.0;
    std::string scheme = "fine";
    std::string out;
};

struct RenderArgs {
    std::string mono;
    std::string trajectory;
    std::string hrir;
    std::string scheme = "fine";
    std::size_t segments = 0;
    std::string distance_gain = "on";
    std::string normalize = "off";
    std::string format = "float";
    std::string out;
};

struct DatasetArgs {
    std::string corpus;
    std::vector<std::string> hrir;
    std::string scheme = "fine";
    std::string seed = "0";
    double clip_seconds = kDefaultClipSeconds;
    double fps = kDefaultFps;
    double s_y = 1.47;
    std::size_t segments = 0;
    std::string distance_gain = "on";
    std::string normalize = "off";
    std::string out;
};

struct EvalArgs {
    std::string est;
    std::string gt;
    std::string audio;
    double window_s = 0.1;
    double hop_s = 0.05;
    double max_lag_s = 0.001;
    std::string report;
};

struct HrirArgs {
    std::string manifest;
};

struct SynthArgs {
    std::string out;
    int sample_rate = 44100;
    double az_step = 5.0;
    double el_step = 10.0;
    double el_min = -40.0;
    double el_max = 40.0;
    double head_radius = 0.0875;
};

const std::vector<std::string> kOnOff{"on", "off"};
const std::vector<std::string> kSchemes{"fine", "coarse"};

std::uint64_t parse_seed(const std::string& text)
{
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw UsageError(fmt::format("--seed: '{}' is not an unsigned 64-bit integer", text));
    return v;
}

std::size_t segments_for(const std::string& scheme, std::size_t requested)
{
    return requested == 0 ? default_segments(parse_scheme(scheme)) : requested;
}

json summary(const std::vector<double>& v, const std::vector<bool>& skip)
{
    std::vector<double> kept;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!skip[i])
            kept.push_back(v[i]);
    if (kept.empty())
        return {{"count", 0}};
    std::vector<double> sorted = kept;
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(kept.begin(), kept.end(), 0.0) / kept.size();
    return {{"count", kept.size()},
            {"mean", mean},
            {"median", sorted[sorted.size() / 2]},
            {"min", sorted.front()},
            {"max", sorted.back()}};
}

void ensure_parent(const fs::path& p)
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
}

void write_json(const fs::path& path, const json& doc)
{
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error(fmt::format("cannot write {}", path.string()));
    f << doc.dump(2) << "\n";
}

int cmd_map(const MapArgs& a)
{
    const FrameSpec frame{a.width, a.height, a.fps};
    SoundFieldConfig field;
    field.s_y = a.s_y;
    if (a.gamma > 0.0)
        field.gamma = a.gamma;
    const Scheme scheme = parse_scheme(a.scheme);

    const DetectionTrack track = load_detection_track(a.track);
    const fs::path depth_dir = a.depth_dir;
    const TrackObservations obs = track_to_observations(
        track, frame, [&](int idx) { return load_depth_frame(depth_dir, idx); });
    logger()->info("label '{}': {} observations, {} gaps", obs.label, obs.observation_count(),
                   obs.gap_count());

    const Trajectory3D traj = scheme == Scheme::fine ? map_track_fine(obs, frame, field)
                                                     : map_track_coarse(obs, frame, GridScheme{});
    ensure_parent(a.out);
    save_trajectory(traj, a.out);
    return kExitOk;
}

int cmd_render(const RenderArgs& a)
{
    if (a.hrir.empty())
        throw UsageError(fmt::format("--hrir is required (or set {})", kHrirEnv));
    const Scheme scheme = parse_scheme(a.scheme);
    const std::size_t segments = segments_for(a.scheme, a.segments);

    const MonoAudio mono = read_mono_wav(a.mono);
    const Trajectory3D traj = load_trajectory(a.trajectory);
    const HrirSet full = load_hrir_set(a.hrir);
    const HrirSet set = scheme == Scheme::fine ? fine_subset(full) : coarse_subset(full);

    RenderOptions opts;
    opts.distance_gain = a.distance_gain == "on";
    opts.normalize = a.normalize == "on";
    const BinauralAudio out = render_moving_source(mono, traj, set, segments, opts);
    ensure_parent(a.out);
    write_binaural_wav(a.out, out, a.format == "pcm16" ? SampleFormat::pcm16 : SampleFormat::float32);
    logger()->info("rendered {} samples with M = {}", out.size(), segments);
    return kExitOk;
}

int cmd_build_dataset(const DatasetArgs& a, std::ostream& out)
{
    DatasetSpec spec;
    spec.seed = parse_seed(a.seed);
    spec.scheme = parse_scheme(a.scheme);
    if (a.hrir.empty())
        throw UsageError(fmt::format("at least one --hrir is required (or set {})", kHrirEnv));
    spec.clip_seconds = a.clip_seconds;
    spec.fps = a.fps;
    spec.field.s_y = a.s_y;
    spec.segments = a.segments;
    spec.render.distance_gain = a.distance_gain == "on";
    spec.render.normalize = a.normalize == "on";

    std::vector<HrirSet> sets;
    for (const auto& m : a.hrir)
        sets.push_back(load_hrir_set(m));
    const fs::path out_dir = fs::path(a.out) / std::string(to_string(spec.scheme));
    const DatasetManifest manifest = build_dataset(a.corpus, sets, spec, out_dir);
    out << manifest.path.string() << "\n";
    logger()->info("{} samples written", manifest.entries.size());
    return kExitOk;
}

int cmd_eval(const EvalArgs& a)
{
    if (a.est.empty() && a.audio.empty())
        throw UsageError("eval needs --est and/or --audio");
    const Trajectory3D gt = load_trajectory_or_annotation(a.gt);

    json report;
    report["ground_truth"] = fs::path(a.gt).filename().string();
    if (!a.est.empty()) {
        const Trajectory3D est = load_trajectory_or_annotation(a.est);
        if (est.size() != gt.size())
            throw Error(fmt::format("estimate has {} points, ground truth {}", est.size(),
                                    gt.size()));
        const auto [est_az, est_el] = trajectory_angles(est);
        const auto [gt_az, gt_el] = trajectory_angles(gt);
        report["clip"] = fs::path(a.est).stem().string();
        report["points"] = est.size();
        report["mae_azimuth_deg"] = mae_azimuth(est_az, gt_az);
        report["mae_elevation_deg"] = mae_elevation(est_el, gt_el);
    }
    if (!a.audio.empty()) {
        const BinauralAudio audio = read_binaural_wav(a.audio);
        if (!report.contains("clip"))
            report["clip"] = fs::path(a.audio).stem().string();
        const CueSeries ild = estimate_ild(audio, a.window_s, a.hop_s);
        const CueSeries itd = estimate_itd(audio, a.window_s, a.hop_s, a.max_lag_s);
        std::vector<bool> itd_skip(itd.size());
        for (std::size_t i = 0; i < itd.size(); ++i)
            itd_skip[i] = itd.silent[i] || itd.low_confidence[i];
        const SideConsistency side = side_consistency(audio, gt, a.window_s);
        report["window_s"] = a.window_s;
        report["hop_s"] = a.hop_s;
        report["ild_db"] = summary(ild.ild_db, ild.silent);
        report["itd_s"] = summary(itd.itd_s, itd_skip);
        report["side_consistency"] = side.fraction ? json(*side.fraction) : json(nullptr);
        report["side_windows_considered"] = side.considered;
        report["side_windows_skipped"] = side.skipped;
    }
    write_json(a.report, report);
    return kExitOk;
}

int cmd_hrir(const HrirArgs& a, std::ostream& out)
{
    if (a.manifest.empty())
        throw UsageError(fmt::format("--manifest is required (or set {})", kHrirEnv));
    const HrirSet set = load_hrir_set(a.manifest);
    std::size_t fine = 0;
    for (const auto& e : set.entries)
        fine += in_fine_region(e.azimuth_deg, e.elevation_deg) ? 1 : 0;
    std::string coarse = "complete";
    try {
        coarse_subset(set);
    } catch (const Error& e) {
        coarse = e.what();
    }
    out << fmt::format("subject:        {}\n", set.subject_id)
        << fmt::format("sample rate:    {} Hz\n", set.sample_rate())
        << fmt::format("length:         {} samples\n", set.length())
        << fmt::format("ref distance:   {} m\n", set.ref_distance_m)
        << fmt::format("directions:     {}\n", set.entries.size())
        << fmt::format("fine subset:    {}\n", fine)
        << fmt::format("coarse subset:  {}\n", coarse);
    return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out)
{
    SphericalHeadOptions opts;
    opts.head_radius_m = a.head_radius;
    const HrirSet set = synth_spherical_head(
        direction_grid(a.az_step, a.el_step, a.el_min, a.el_max), a.sample_rate, opts);
    out << save_hrir_set(set, a.out).string() << "\n";
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Video-guided binaural spatialization toolkit", "sonotrack"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    MapArgs map_args;
    auto* map = app.add_subcommand("map", "Map a detection track and depth frames to a trajectory");
    map->add_option("--track", map_args.track, "Detection track JSON")->required()->check(CLI::ExistingFile);
    map->add_option("--depth-dir", map_args.depth_dir, "Directory of per-frame depth maps")->required();
    map->add_option("--width", map_args.width, "Frame width in pixels")->required()->default_str("")->check(CLI::PositiveNumber);
    map->add_option("--height", map_args.height, "Frame height in pixels")->required()->default_str("")->check(CLI::PositiveNumber);
    map->add_option("--fps", map_args.fps, "Video frame rate")->check(CLI::PositiveNumber);
    map->add_option("--s-y", map_args.s_y, "Maximum lateral source distance S_y in meters")->check(CLI::PositiveNumber);
    map->add_option("--gamma", map_args.gamma, "Depth scaling in pixels (0 = width / 2)")->check(CLI::NonNegativeNumber);
    map->add_option("--scheme", map_args.scheme, "fine (per frame) or coarse (5x3 grid, 1 position/s)")->check(CLI::IsMember(kSchemes));
    map->add_option("--out", map_args.out, "Output trajectory JSON")->required();

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render mono audio along a trajectory");
    render->add_option("--mono", render_args.mono, "Mono input WAV")->required()->check(CLI::ExistingFile);
    render->add_option("--trajectory", render_args.trajectory, "Trajectory JSON")->required()->check(CLI::ExistingFile);
    render->add_option("--hrir", render_args.hrir, "HRIR manifest")->envname(kHrirEnv);
    render->add_option("--scheme", render_args.scheme, "HRIR subset and default M: fine (M=200) or coarse (M=8)")->check(CLI::IsMember(kSchemes));
    render->add_option("--M", render_args.segments, "Direction variation rate M (segments per clip)")
        ->default_str("200 fine, 8 coarse")
        ->check(CLI::PositiveNumber);
    render->add_option("--distance-gain", render_args.distance_gain, "Apply ref/d spreading gain")->check(CLI::IsMember(kOnOff));
    render->add_option("--normalize", render_args.normalize, "Peak-normalize the output")->check(CLI::IsMember(kOnOff));
    render->add_option("--format", render_args.format, "Output sample format")->check(CLI::IsMember({"float", "pcm16"}));
    render->add_option("--out", render_args.out, "Output stereo WAV")->required();

    DatasetArgs ds_args;
    auto* dataset = app.add_subcommand("build-dataset", "Synthesize a seeded binaural training set");
    dataset->add_option("--corpus", ds_args.corpus, "Directory of mono WAV clips")->required();
    dataset->add_option("--hrir", ds_args.hrir, "HRIR manifest (repeat for several subjects)")->envname(kHrirEnv)->default_str("");
    dataset->add_option("--scheme", ds_args.scheme, "fine or coarse")->check(CLI::IsMember(kSchemes));
    dataset->add_option("--seed", ds_args.seed, "Global seed (unsigned 64-bit)");
    dataset->add_option("--clip-seconds", ds_args.clip_seconds, "Clip length after trim/pad")->check(CLI::PositiveNumber);
    dataset->add_option("--fps", ds_args.fps, "Trajectory frame rate")->check(CLI::PositiveNumber);
    dataset->add_option("--s-y", ds_args.s_y, "Maximum lateral source distance S_y in meters")->check(CLI::PositiveNumber);
    dataset->add_option("--M", ds_args.segments, "Direction variation rate M (segments per clip)")
        ->default_str("200 fine, 8 coarse")
        ->check(CLI::PositiveNumber);
    dataset->add_option("--distance-gain", ds_args.distance_gain, "Apply ref/d spreading gain")->check(CLI::IsMember(kOnOff));
    dataset->add_option("--normalize", ds_args.normalize, "Peak-normalize each render")->check(CLI::IsMember(kOnOff));
    dataset->add_option("--out", ds_args.out, "Output root; samples go to <out>/<scheme>/")->required();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Angular error and interaural cue report");
    eval->add_option("--est", eval_args.est, "Estimated trajectory (or grid annotation)");
    eval->add_option("--gt", eval_args.gt, "Ground-truth trajectory or grid annotation")->required()->check(CLI::ExistingFile);
    eval->add_option("--audio", eval_args.audio, "Binaural WAV to analyse");
    eval->add_option("--window-s", eval_args.window_s, "Cue window length in seconds")->check(CLI::PositiveNumber);
    eval->add_option("--hop-s", eval_args.hop_s, "Cue hop in seconds")->check(CLI::PositiveNumber);
    eval->add_option("--max-lag-s", eval_args.max_lag_s, "ITD search range in seconds")->check(CLI::PositiveNumber);
    eval->add_option("--report", eval_args.report, "Output report JSON")->required();

    HrirArgs hrir_args;
    auto* hrir = app.add_subcommand("hrir", "Summarize an HRIR manifest");
    hrir->add_option("--manifest", hrir_args.manifest, "HRIR manifest")->envname(kHrirEnv);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth-hrir", "Write a spherical-head HRIR fixture set");
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--sample-rate", synth_args.sample_rate, "Sample rate in Hz")->check(CLI::PositiveNumber);
    synth->add_option("--az-step", synth_args.az_step, "Azimuth spacing in degrees")->check(CLI::PositiveNumber);
    synth->add_option("--el-step", synth_args.el_step, "Elevation spacing in degrees")->check(CLI::PositiveNumber);
    synth->add_option("--el-min", synth_args.el_min, "Lowest elevation");
    synth->add_option("--el-max", synth_args.el_max, "Highest elevation");
    synth->add_option("--head-radius", synth_args.head_radius, "Head radius in meters")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*map)
            return cmd_map(map_args);
        if (*render)
            return cmd_render(render_args);
        if (*dataset)
            return cmd_build_dataset(ds_args, out);
        if (*eval)
            return cmd_eval(eval_args);
        if (*hrir)
            return cmd_hrir(hrir_args, out);
        if (*synth)
            return cmd_synth(synth_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"sonotrack"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace sonotrack::cli
