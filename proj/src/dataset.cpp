// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/dataset.hpp"

#include "binary_io.hpp"
#include "sonotrack/common.hpp"
#include "sonotrack/trajectory_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace sonotrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMaxTrajectoryAttempts = 10000;
constexpr double kFineMaxElevationDeg = 40.0;

Vec3 lerp(const Vec3& a, const Vec3& b, double t)
{
    return {std::lerp(a.x, b.x, t), std::lerp(a.y, b.y, t), std::lerp(a.z, b.z, t)};
}

std::size_t point_count(double duration_s, double fps)
{
    if (!(duration_s > 0.0) || !(fps > 0.0))
        throw Error("duration and fps must be positive");
    return static_cast<std::size_t>(std::max(1L, std::lround(duration_s * fps)));
}

Trajectory3D fine_trajectory(SeededRng& rng, std::size_t k, double fps,
                             const SoundFieldConfig& field, const GridScheme& grid,
                             double min_radius)
{
    const double reach = field.max_distance;
    const double z_reach = reach * std::sin(kFineMaxElevationDeg * std::numbers::pi / 180.0);
    auto draw = [&] {
        for (;;) {
            const Vec3 p{rng.uniform(0.0, reach), rng.uniform(-field.s_y, field.s_y),
                         rng.uniform(-z_reach, z_reach)};
            if (in_admissible_region(p, Scheme::fine, field, grid, min_radius))
                return p;
        }
    };
    for (int attempt = 0; attempt < kMaxTrajectoryAttempts; ++attempt) {
        const std::size_t n_way = 2 + rng.below(4);
        std::vector<Vec3> way(n_way);
        for (auto& w : way)
            w = draw();

        Trajectory3D traj{{}, fps};
        traj.points.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double u = k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
            const double pos = u * static_cast<double>(n_way - 1);
            const auto seg = std::min(static_cast<std::size_t>(pos), n_way - 2);
            traj.points.push_back(lerp(way[seg], way[seg + 1], pos - static_cast<double>(seg)));
        }
        const bool inside = std::all_of(traj.points.begin(), traj.points.end(), [&](const Vec3& p) {
            return in_admissible_region(p, Scheme::fine, field, grid, min_radius);
        });
        if (inside)
            return traj;
    }
    throw Error("could not draw an admissible trajectory");
}

Trajectory3D coarse_trajectory(SeededRng& rng, std::size_t k, double fps, const GridScheme& grid)
{
    grid.validate();
    const auto seconds = static_cast<std::size_t>(std::ceil(static_cast<double>(k) / fps - 1e-9));
    const std::size_t n_way = 2 + rng.below(4);
    struct Cell {
        double col, row, bin;
    };
    std::vector<Cell> way(n_way);
    for (auto& w : way)
        w = {static_cast<double>(1 + rng.below(static_cast<std::size_t>(grid.cols))),
             static_cast<double>(1 + rng.below(static_cast<std::size_t>(grid.rows))),
             static_cast<double>(rng.below(grid.depth_bins_m.size()))};

    std::vector<Vec3> per_second(std::max<std::size_t>(seconds, 1));
    for (std::size_t s = 0; s < per_second.size(); ++s) {
        const double u = per_second.size() > 1
                             ? static_cast<double>(s) / static_cast<double>(per_second.size() - 1)
                             : 0.0;
        const double pos = u * static_cast<double>(n_way - 1);
        const auto seg = std::min(static_cast<std::size_t>(pos), n_way - 2);
        const double t = pos - static_cast<double>(seg);
        const auto snap = [&](double a, double b) { return std::lround(std::lerp(a, b, t)); };
        per_second[s] = coarse_position(static_cast<int>(snap(way[seg].col, way[seg + 1].col)),
                                        static_cast<int>(snap(way[seg].row, way[seg + 1].row)),
                                        static_cast<std::size_t>(snap(way[seg].bin, way[seg + 1].bin)),
                                        grid);
    }
    Trajectory3D traj{{}, fps};
    traj.points.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto s = std::min(per_second.size() - 1,
                                static_cast<std::size_t>(std::floor(static_cast<double>(i) / fps)));
        traj.points.push_back(per_second[s]);
    }
    return traj;
}

bool is_wav(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".wav";
}

} // namespace

Scheme parse_scheme(std::string_view name)
{
    if (name == "fine")
        return Scheme::fine;
    if (name == "coarse")
        return Scheme::coarse;
    throw Error(fmt::format("unknown scheme '{}' (expected fine or coarse)", name));
}

std::string_view to_string(Scheme scheme) { return scheme == Scheme::fine ? "fine" : "coarse"; }

std::size_t default_segments(Scheme scheme)
{
    return scheme == Scheme::fine ? kFineSegments : kCoarseSegments;
}

std::size_t DatasetSpec::effective_segments() const
{
    return segments == 0 ? default_segments(scheme) : segments;
}

void DatasetSpec::validate() const
{
    if (!(clip_seconds > 0.0))
        throw Error("clip length must be positive");
    if (!(fps > 0.0))
        throw Error("fps must be positive");
    field.validate();
    grid.validate();
}

double SeededRng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::below(std::size_t n)
{
    if (n == 0)
        throw Error("empty range");
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

std::uint64_t derive_clip_seed(std::uint64_t seed, std::string_view clip_name)
{
    // FNV-1a over the little-endian seed bytes and the name, then a
    // splitmix64 finaliser to spread nearby inputs.
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001b3ull;
    };
    for (int i = 0; i < 8; ++i)
        mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
    for (const char c : clip_name)
        mix(static_cast<unsigned char>(c));
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

bool in_admissible_region(const Vec3& p, Scheme scheme, const SoundFieldConfig& field,
                          const GridScheme& grid, double min_radius)
{
    if (scheme == Scheme::coarse) {
        const auto all = coarse_positions(grid);
        return std::any_of(all.begin(), all.end(),
                           [&](const Vec3& q) { return distance(p, q) < 1e-9; });
    }
    const double r = norm(p);
    if (!(r >= min_radius && r <= field.max_distance) || p.x < 0.0 || std::abs(p.y) > field.s_y)
        return false;
    return std::abs(cartesian_to_spherical(p).elevation_deg) <= kFineMaxElevationDeg;
}

Trajectory3D random_trajectory(std::uint64_t seed, double duration_s, double fps, Scheme scheme,
                               const SoundFieldConfig& field, const GridScheme& grid,
                               double min_radius)
{
    field.validate();
    const std::size_t k = point_count(duration_s, fps);
    SeededRng rng(seed);
    return scheme == Scheme::fine ? fine_trajectory(rng, k, fps, field, grid, min_radius)
                                  : coarse_trajectory(rng, k, fps, grid);
}

ConditionRecord assemble_condition(const MonoAudio& mono, const Trajectory3D& traj)
{
    traj.validate();
    const std::size_t t_len = mono.samples.size();
    const std::size_t k = traj.size();
    const std::size_t hold = std::max<std::size_t>(1, (t_len + k - 1) / k);

    ConditionRecord rec;
    rec.sample_rate = mono.sample_rate;
    rec.channels[0] = mono.samples;
    for (std::size_t c = 1; c < 4; ++c)
        rec.channels[c].resize(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        const Vec3& p = traj.points[std::min(k - 1, t / hold)];
        rec.channels[1][t] = p.x;
        rec.channels[2][t] = p.y;
        rec.channels[3][t] = p.z;
    }
    return rec;
}

void save_condition(const ConditionRecord& record, const fs::path& dir)
{
    std::vector<char> buf;
    buf.reserve(4 * 4 * record.length());
    for (const auto& ch : record.channels) {
        if (ch.size() != record.length())
            throw Error("condition channels differ in length");
        for (const double v : ch)
            detail::append_f32le(buf, static_cast<float>(v));
    }
    detail::write_file(dir / "condition.f32", buf);
    const json header{{"channels", 4},
                      {"length", record.length()},
                      {"sample_rate", record.sample_rate},
                      {"dtype", "float32le"},
                      {"layout", "channel-major"},
                      {"channel_names", {"mono", "x", "y", "z"}}};
    detail::write_text_file(dir / "condition.json", header.dump(2) + "\n");
}

ConditionRecord load_condition(const fs::path& dir)
{
    const auto header_bytes = detail::read_file(dir / "condition.json");
    ConditionRecord rec;
    std::size_t length = 0;
    try {
        const json header = json::parse(header_bytes.begin(), header_bytes.end());
        if (header.at("channels").get<int>() != 4)
            throw Error("condition files must have 4 channels");
        length = header.at("length").get<std::size_t>();
        rec.sample_rate = header.at("sample_rate").get<int>();
    } catch (const json::exception& e) {
        throw Error(fmt::format("{}: invalid condition header: {}", dir.string(), e.what()));
    }
    const auto values = detail::read_f32le_file(dir / "condition.f32");
    if (values.size() != 4 * length)
        throw Error(fmt::format("{}: condition holds {} values, expected 4 x {}", dir.string(),
                                values.size(), length));
    for (std::size_t c = 0; c < 4; ++c)
        rec.channels[c].assign(values.begin() + static_cast<std::ptrdiff_t>(c * length),
                               values.begin() + static_cast<std::ptrdiff_t>((c + 1) * length));
    return rec;
}

MonoAudio fit_length(MonoAudio mono, std::size_t samples)
{
    mono.samples.resize(samples, 0.0);
    return mono;
}

DatasetManifest build_dataset(const fs::path& corpus_dir, const std::vector<HrirSet>& hrir_sets,
                              const DatasetSpec& spec, const fs::path& out_dir)
{
    spec.validate();
    if (hrir_sets.empty())
        throw Error("at least one HRIR set is required");
    if (!fs::is_directory(corpus_dir))
        throw Error(fmt::format("corpus directory {} not found", corpus_dir.string()));

    std::vector<fs::path> clips;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
        if (entry.is_regular_file() && is_wav(entry.path()))
            clips.push_back(entry.path());
    std::sort(clips.begin(), clips.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (clips.empty())
        throw Error(fmt::format("corpus {} holds no WAV clips", corpus_dir.string()));

    std::vector<HrirSet> subsets;
    subsets.reserve(hrir_sets.size());
    for (const auto& set : hrir_sets)
        subsets.push_back(spec.scheme == Scheme::fine ? fine_subset(set)
                                                      : coarse_subset(set, spec.grid));

    const std::size_t segments = spec.effective_segments();
    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.path = out_dir / "manifest.json";

    for (std::size_t i = 0; i < clips.size(); ++i) {
        const std::string name = clips[i].stem().string();
        const HrirSet& subject = subsets[i % subsets.size()];
        MonoAudio mono;
        try {
            mono = read_mono_wav(clips[i]);
            mono.validate();
        } catch (const Error& e) {
            logger()->warn("skipping {}: {}", clips[i].filename().string(), e.what());
            continue;
        }
        if (mono.sample_rate != subject.sample_rate()) {
            logger()->warn("skipping {}: {} Hz audio, HRIR set '{}' is {} Hz",
                           clips[i].filename().string(), mono.sample_rate, subject.subject_id,
                           subject.sample_rate());
            continue;
        }
        mono = fit_length(std::move(mono), static_cast<std::size_t>(
                                               std::lround(spec.clip_seconds * mono.sample_rate)));

        const std::uint64_t seed = derive_clip_seed(spec.seed, clips[i].filename().string());
        const Trajectory3D traj = random_trajectory(seed, spec.clip_seconds, spec.fps,
                                                    spec.scheme, spec.field, spec.grid,
                                                    spec.render.min_distance);
        const BinauralAudio binaural =
            render_moving_source(mono, traj, subject, segments, spec.render);

        const fs::path clip_dir = out_dir / name;
        fs::create_directories(clip_dir);
        write_binaural_wav(clip_dir / "binaural.wav", binaural, SampleFormat::float32);
        save_trajectory(traj, clip_dir / "trajectory.json");
        save_condition(assemble_condition(mono, traj), clip_dir);

        manifest.entries.push_back({name, subject.subject_id, seed, fs::path(name) / "binaural.wav",
                                    fs::path(name) / "trajectory.json",
                                    fs::path(name) / "condition.f32"});
        logger()->debug("built {} with subject {}", name, subject.subject_id);
    }
    if (manifest.entries.empty())
        throw Error("dataset build produced no samples");

    json entries = json::array();
    for (const auto& e : manifest.entries)
        entries.push_back({{"clip", e.clip},
                           {"subject_id", e.subject_id},
                           {"seed", e.seed},
                           {"binaural", e.binaural.generic_string()},
                           {"trajectory", e.trajectory.generic_string()},
                           {"condition", e.condition.generic_string()}});
    const json doc{{"scheme", to_string(spec.scheme)},
                   {"seed", spec.seed},
                   {"clip_seconds", spec.clip_seconds},
                   {"fps", spec.fps},
                   {"segments", segments},
                   {"entries", std::move(entries)}};
    detail::write_text_file(manifest.path, doc.dump(2) + "\n");
    return manifest;
}

} // namespace sonotrack
