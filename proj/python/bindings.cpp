// SPDX-License-Identifier: Apache-2.0
//
// Trajectories cross the boundary as (K, 3) float64 arrays, mono audio as 1-D
// arrays and binaural audio as (2, N) arrays.
#include "sonotrack/audio.hpp"
#include "sonotrack/common.hpp"
#include "sonotrack/dataset.hpp"
#include "sonotrack/geometry.hpp"
#include "sonotrack/hrir.hpp"
#include "sonotrack/metrics.hpp"
#include "sonotrack/render.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace sonotrack;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Trajectory3D to_trajectory(const Array& points, double rate)
{
    if (points.ndim() != 2 || points.shape(1) != 3)
        throw Error("trajectory must have shape (K, 3)");
    auto r = points.unchecked<2>();
    Trajectory3D t;
    t.rate = rate;
    for (py::ssize_t i = 0; i < r.shape(0); ++i)
        t.points.push_back({r(i, 0), r(i, 1), r(i, 2)});
    return t;
}

Array from_trajectory(const Trajectory3D& t)
{
    Array out({static_cast<py::ssize_t>(t.points.size()), py::ssize_t{3}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        w(i, 0) = t.points[i].x;
        w(i, 1) = t.points[i].y;
        w(i, 2) = t.points[i].z;
    }
    return out;
}

std::vector<double> to_vector(const Array& a)
{
    if (a.ndim() != 1)
        throw Error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Array from_vector(const std::vector<double>& v)
{
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

BinauralAudio to_binaural(const Array& a, int sample_rate)
{
    if (a.ndim() != 2 || a.shape(0) != 2)
        throw Error("binaural audio must have shape (2, N)");
    const auto n = static_cast<std::size_t>(a.shape(1));
    return {{a.data(), a.data() + n}, {a.data() + n, a.data() + 2 * n}, sample_rate};
}

Array from_binaural(const BinauralAudio& b)
{
    Array out({py::ssize_t{2}, static_cast<py::ssize_t>(b.size())});
    std::copy(b.left.begin(), b.left.end(), out.mutable_data());
    std::copy(b.right.begin(), b.right.end(), out.mutable_data() + b.size());
    return out;
}

AngleSeries angles(const Array& a, AngleKind kind)
{
    return {to_vector(a), kind};
}

py::dict cue_dict(const CueSeries& c)
{
    py::dict d;
    d["window_s"] = c.window_s;
    d["hop_s"] = c.hop_s;
    d["ild_db"] = from_vector(c.ild_db);
    d["itd_s"] = from_vector(c.itd_s);
    d["silent"] = c.silent;
    d["low_confidence"] = c.low_confidence;
    return d;
}

Scheme scheme_arg(const std::string& s)
{
    return parse_scheme(s);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "sonotrack core bindings";
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def(
        "mapping_factor",
        [](int width, int height, double s_y) {
            SoundFieldConfig cfg;
            cfg.s_y = s_y;
            return mapping_factor(FrameSpec{width, height, 25.0}, cfg);
        },
        py::arg("width"), py::arg("height"), py::arg("s_y") = 1.47);

    m.def(
        "map_to_sound_field",
        [](double w, double h, double depth, int width, int height, double d_min, double d_max,
           double s_y, std::optional<double> gamma) {
            SoundFieldConfig cfg;
            cfg.s_y = s_y;
            cfg.gamma = gamma;
            const Vec3 p =
                map_to_sound_field({0, w, h, depth}, FrameSpec{width, height, 25.0}, cfg, d_min, d_max);
            return py::make_tuple(p.x, p.y, p.z);
        },
        py::arg("w"), py::arg("h"), py::arg("depth"), py::arg("width"), py::arg("height"),
        py::arg("d_min"), py::arg("d_max"), py::arg("s_y") = 1.47, py::arg("gamma") = py::none());

    m.def(
        "smooth_trajectory",
        [](const Array& points, double rate) {
            return from_trajectory(smooth_trajectory(to_trajectory(points, rate)));
        },
        py::arg("points"), py::arg("rate") = 25.0);

    m.def(
        "quantize_to_grid",
        [](double w, double h, int width, int height) {
            const GridCell c = quantize_to_grid(w, h, FrameSpec{width, height, 25.0}, GridScheme{});
            return py::make_tuple(c.col, c.row);
        },
        py::arg("w"), py::arg("h"), py::arg("width"), py::arg("height"));

    m.def("coarse_positions", [] { return from_trajectory({coarse_positions(GridScheme{}), 1.0}); });

    m.def(
        "cartesian_to_spherical",
        [](double x, double y, double z) {
            const SphericalDirection d = cartesian_to_spherical({x, y, z});
            return py::make_tuple(d.azimuth_deg, d.elevation_deg, d.radius_m);
        },
        py::arg("x"), py::arg("y"), py::arg("z"));

    m.def(
        "spherical_to_cartesian",
        [](double az, double el, double r) {
            const Vec3 p = spherical_to_cartesian({az, el, r});
            return py::make_tuple(p.x, p.y, p.z);
        },
        py::arg("azimuth_deg"), py::arg("elevation_deg"), py::arg("radius_m") = 1.0);

    py::class_<HrirSet>(m, "HrirSet")
        .def_readonly("subject_id", &HrirSet::subject_id)
        .def_readonly("ref_distance_m", &HrirSet::ref_distance_m)
        .def_property_readonly("sample_rate", &HrirSet::sample_rate)
        .def_property_readonly("length", &HrirSet::length)
        .def("__len__", [](const HrirSet& s) { return s.entries.size(); })
        .def("directions", [](const HrirSet& s) {
            std::vector<std::pair<double, double>> out;
            for (const auto& e : s.entries)
                out.emplace_back(e.azimuth_deg, e.elevation_deg);
            return out;
        })
        .def("fine_subset", &fine_subset)
        .def("coarse_subset", [](const HrirSet& s) { return coarse_subset(s); })
        .def("save", &save_hrir_set, py::arg("dir"));

    m.def("load_hrir_set", &load_hrir_set, py::arg("manifest"));

    m.def(
        "synth_spherical_head",
        [](int sample_rate, double az_step, double el_step, double el_min, double el_max) {
            return synth_spherical_head(direction_grid(az_step, el_step, el_min, el_max), sample_rate);
        },
        py::arg("sample_rate") = 44100, py::arg("az_step") = 5.0, py::arg("el_step") = 10.0,
        py::arg("el_min") = -40.0, py::arg("el_max") = 40.0);

    m.def(
        "select_direction",
        [](const HrirSet& set, double az, double el) {
            const Hrir& h = select_direction(set, {az, el, 1.0});
            return py::make_tuple(h.azimuth_deg, h.elevation_deg);
        },
        py::arg("set"), py::arg("azimuth_deg"), py::arg("elevation_deg"));

    m.def(
        "resample_for_distance",
        [](const HrirSet& set, double az, double el, double distance, bool distance_gain) {
            ResampleOptions opts;
            opts.distance_gain = distance_gain;
            const Hrir h = resample_for_distance(select_direction(set, {az, el, 1.0}), distance,
                                                 set.ref_distance_m, opts);
            return py::make_tuple(from_vector(h.left), from_vector(h.right));
        },
        py::arg("set"), py::arg("azimuth_deg"), py::arg("elevation_deg"), py::arg("distance_m"),
        py::arg("distance_gain") = true);

    m.def(
        "render_moving_source",
        [](const Array& mono, int sample_rate, const Array& trajectory, double rate,
           const HrirSet& set, std::size_t segments, bool distance_gain, bool normalize) {
            RenderOptions opts;
            opts.distance_gain = distance_gain;
            opts.normalize = normalize;
            const MonoAudio audio{to_vector(mono), sample_rate};
            const Trajectory3D traj = to_trajectory(trajectory, rate);
            BinauralAudio out;
            {
                py::gil_scoped_release release;
                out = render_moving_source(audio, traj, set, segments, opts);
            }
            return from_binaural(out);
        },
        py::arg("mono"), py::arg("sample_rate"), py::arg("trajectory"), py::arg("rate"),
        py::arg("set"), py::arg("segments") = kFineSegments, py::arg("distance_gain") = true,
        py::arg("normalize") = false);

    m.def(
        "mae_azimuth",
        [](const Array& est, const Array& gt) {
            return mae_azimuth(angles(est, AngleKind::azimuth), angles(gt, AngleKind::azimuth));
        },
        py::arg("est"), py::arg("gt"));

    m.def(
        "mae_elevation",
        [](const Array& est, const Array& gt) {
            return mae_elevation(angles(est, AngleKind::elevation), angles(gt, AngleKind::elevation));
        },
        py::arg("est"), py::arg("gt"));

    m.def(
        "estimate_ild",
        [](const Array& audio, int sample_rate, double window_s, double hop_s) {
            return cue_dict(estimate_ild(to_binaural(audio, sample_rate), window_s, hop_s));
        },
        py::arg("audio"), py::arg("sample_rate"), py::arg("window_s") = 0.1, py::arg("hop_s") = 0.05);

    m.def(
        "estimate_itd",
        [](const Array& audio, int sample_rate, double window_s, double hop_s, double max_lag_s) {
            return cue_dict(
                estimate_itd(to_binaural(audio, sample_rate), window_s, hop_s, max_lag_s));
        },
        py::arg("audio"), py::arg("sample_rate"), py::arg("window_s") = 0.1,
        py::arg("hop_s") = 0.05, py::arg("max_lag_s") = 0.001);

    m.def("derive_clip_seed", &derive_clip_seed, py::arg("seed"), py::arg("clip_name"));

    m.def(
        "random_trajectory",
        [](std::uint64_t seed, double duration_s, double fps, const std::string& scheme) {
            const Trajectory3D t = random_trajectory(seed, duration_s, fps, scheme_arg(scheme));
            return py::make_tuple(from_trajectory(t), t.rate);
        },
        py::arg("seed"), py::arg("duration_s") = kDefaultClipSeconds,
        py::arg("fps") = kDefaultFps, py::arg("scheme") = "fine");

    m.def(
        "assemble_condition",
        [](const Array& mono, int sample_rate, const Array& trajectory, double rate) {
            const ConditionRecord rec =
                assemble_condition({to_vector(mono), sample_rate}, to_trajectory(trajectory, rate));
            Array out({py::ssize_t{4}, static_cast<py::ssize_t>(rec.length())});
            for (std::size_t c = 0; c < 4; ++c)
                std::copy(rec.channels[c].begin(), rec.channels[c].end(),
                          out.mutable_data() + c * rec.length());
            return out;
        },
        py::arg("mono"), py::arg("sample_rate"), py::arg("trajectory"), py::arg("rate"));
}
