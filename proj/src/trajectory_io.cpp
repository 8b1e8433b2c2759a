// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/trajectory_io.hpp"

#include "binary_io.hpp"
#include "sonotrack/common.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace sonotrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Avoids printing "-0.000000" for tiny negatives.
double clean(double v)
{
    return std::abs(v) < 5e-7 ? 0.0 : v;
}

json parse_file(const fs::path& path)
{
    const auto bytes = detail::read_file(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw Error(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
    }
}

Trajectory3D from_doc(const json& doc)
{
    Trajectory3D traj;
    try {
        traj.rate = doc.at("rate").get<double>();
        for (const auto& p : doc.at("points")) {
            if (p.size() != 3)
                throw Error("trajectory points must have 3 coordinates");
            traj.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(fmt::format("invalid trajectory: {}", e.what()));
    }
    traj.validate();
    return traj;
}

} // namespace

std::string trajectory_to_json(const Trajectory3D& traj)
{
    traj.validate();
    std::string out = fmt::format("{{\n  \"rate\": {:.6f},\n  \"points\": [\n", traj.rate);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vec3& p = traj.points[k];
        out += fmt::format("    [{:.6f}, {:.6f}, {:.6f}]{}\n", clean(p.x), clean(p.y), clean(p.z),
                           k + 1 < traj.size() ? "," : "");
    }
    out += "  ]\n}\n";
    return out;
}

Trajectory3D trajectory_from_json(const std::string& text)
{
    try {
        return from_doc(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(fmt::format("invalid trajectory JSON: {}", e.what()));
    }
}

void save_trajectory(const Trajectory3D& traj, const fs::path& path)
{
    detail::write_text_file(path, trajectory_to_json(traj));
}

Trajectory3D load_trajectory(const fs::path& path)
{
    try {
        return from_doc(parse_file(path));
    } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

Trajectory3D load_trajectory_or_annotation(const fs::path& path, const GridScheme& scheme)
{
    const json doc = parse_file(path);
    if (!doc.contains("cells"))
        return load_trajectory(path);

    Trajectory3D traj;
    try {
        traj.rate = doc.value("rate", 1.0);
        for (const auto& cell : doc.at("cells")) {
            if (cell.size() < 2 || cell.size() > 3)
                throw Error("annotation cells are [col, row] or [col, row, depth_m]");
            const double depth = cell.size() == 3 ? cell[2].get<double>() : scheme.depth_bins_m[0];
            traj.points.push_back(coarse_position(cell[0].get<int>(), cell[1].get<int>(),
                                                  depth_bin_index(depth, scheme), scheme));
        }
    } catch (const json::exception& e) {
        throw Error(fmt::format("{}: invalid annotation: {}", path.string(), e.what()));
    } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
    traj.validate();
    return traj;
}

} // namespace sonotrack
