#pragma once

#include <Eigen/Geometry>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenesynth/anneal.hpp"
#include "scenesynth/camera.hpp"
#include "scenesynth/dha.hpp"
#include "scenesynth/energy.hpp"
#include "scenesynth/scene.hpp"
#include "scenesynth/sensor.hpp"
#include "scenesynth/taxonomy.hpp"

namespace scenesynth {

using nlohmann::json;

// All JSON angles and lengths are radians / meters; classes are referenced
// by taxonomy name and resolved to ids at load.

inline json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    json j;
    f >> j;
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

// --- taxonomy ---------------------------------------------------------------

inline json taxonomy_to_json(const ClassTaxonomy& t) {
    return json{{"classes", t.names()}, {"background", t.name(t.background_id())}};
}

inline ClassTaxonomy taxonomy_from_json(const json& j) {
    const auto names = j.at("classes").get<std::vector<std::string>>();
    const std::string bg = j.value("background", names.empty() ? "" : names[0]);
    ClassTaxonomy tmp(names, 0);
    return ClassTaxonomy(names, tmp.id(bg));
}

// --- layout -----------------------------------------------------------------

inline json layout_to_json(const SceneLayout& layout, const ClassTaxonomy& taxonomy) {
    json objs = json::array();
    for (const auto& o : layout.objects) {
        json jo{{"id", o.id},
                {"class", taxonomy.name(o.class_id)},
                {"half_extents",
                 {o.half_extents.x(), o.half_extents.y(), o.half_extents.z()}},
                {"position", {o.pose.position.x(), o.pose.position.y()}},
                {"yaw", o.pose.yaw},
                {"base_height", o.base_height}};
        if (o.mesh) jo["mesh"] = *o.mesh;
        objs.push_back(std::move(jo));
    }
    json j{{"room",
            {{"width", layout.room.width},
             {"depth", layout.room.depth},
             {"wall_height", layout.room.wall_height},
             {"origin", {layout.room.origin.x(), layout.room.origin.y()}}}},
           {"objects", std::move(objs)}};
    if (!layout.groups.empty()) j["groups"] = layout.groups;
    return j;
}

inline SceneLayout layout_from_json(const json& j, const ClassTaxonomy& taxonomy) {
    SceneLayout layout;
    const auto& jr = j.at("room");
    Vec2 origin(0.0, 0.0);
    if (jr.contains("origin"))
        origin = Vec2(jr["origin"].at(0).get<double>(), jr["origin"].at(1).get<double>());
    layout.room = RoomShell(jr.at("width").get<double>(), jr.at("depth").get<double>(),
                            jr.value("wall_height", 2.5), origin);
    for (const auto& jo : j.value("objects", json::array())) {
        ObjectInstance o;
        o.id = jo.at("id").get<std::string>();
        o.class_id = taxonomy.id(jo.at("class").get<std::string>());
        const auto& he = jo.at("half_extents");
        o.half_extents = Vec3(he.at(0).get<double>(), he.at(1).get<double>(),
                              he.at(2).get<double>());
        const auto& p = jo.at("position");
        o.pose = Pose2D(Vec2(p.at(0).get<double>(), p.at(1).get<double>()),
                        jo.value("yaw", 0.0));
        o.base_height = jo.value("base_height", 0.0);
        if (jo.contains("mesh")) o.mesh = jo["mesh"].get<std::string>();
        layout.objects.push_back(std::move(o));
    }
    if (j.contains("groups"))
        layout.groups = j["groups"].get<std::vector<std::vector<std::string>>>();
    layout.validate();
    return layout;
}

// --- constraints ------------------------------------------------------------

inline json constraints_to_json(const ConstraintSet& c, const ClassTaxonomy& taxonomy) {
    json j;
    j["weights"] = {{"bbox", c.weights.bbox},
                    {"alpha", c.weights.alpha},
                    {"visibility", c.weights.visibility},
                    {"pair_angle", c.weights.pair_angle},
                    {"rho_cap", c.weights.rho_cap},
                    {"smooth_rho", c.weights.smooth_rho}};
    j["pairwise"] = json::array();
    for (const auto& p : c.pairwise) {
        json jp{{"classes", {taxonomy.name(p.class_a), taxonomy.name(p.class_b)}},
                {"max_distance", p.max_distance},
                {"weight", p.weight}};
        if (p.target_angle) jp["target_angle"] = *p.target_angle;
        j["pairwise"].push_back(std::move(jp));
    }
    j["wall"] = json::array();
    for (const auto& w : c.wall)
        j["wall"].push_back({{"class", taxonomy.name(w.class_id)},
                             {"distance", w.target_distance},
                             {"angle", w.target_angle},
                             {"weight_distance", w.weight_distance},
                             {"weight_angle", w.weight_angle}});
    j["visibility"] = json::array();
    for (const auto& v : c.visibility)
        j["visibility"].push_back(
            {{"classes", {taxonomy.name(v.class_a), taxonomy.name(v.class_b)}},
             {"weight", v.weight}});
    j["mask"] = {{"pairwise", c.mask.pairwise},
                 {"visibility", c.mask.visibility},
                 {"wall", c.mask.wall},
                 {"pair_angle", c.mask.pair_angle}};
    return j;
}

inline ConstraintSet constraints_from_json(const json& j, const ClassTaxonomy& taxonomy) {
    ConstraintSet c;
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        c.weights.bbox = w.value("bbox", c.weights.bbox);
        c.weights.alpha = w.value("alpha", c.weights.alpha);
        c.weights.visibility = w.value("visibility", c.weights.visibility);
        c.weights.pair_angle = w.value("pair_angle", c.weights.pair_angle);
        c.weights.rho_cap = w.value("rho_cap", c.weights.rho_cap);
        c.weights.smooth_rho = w.value("smooth_rho", c.weights.smooth_rho);
    }
    for (const auto& jp : j.value("pairwise", json::array())) {
        PairwisePrior p;
        p.class_a = taxonomy.id(jp.at("classes").at(0).get<std::string>());
        p.class_b = taxonomy.id(jp.at("classes").at(1).get<std::string>());
        p.max_distance = jp.at("max_distance").get<double>();
        if (jp.contains("target_angle")) p.target_angle = jp["target_angle"].get<double>();
        p.weight = jp.value("weight", 1.0);
        p.canonicalize();
        c.pairwise.push_back(p);
    }
    for (const auto& jw : j.value("wall", json::array())) {
        WallPrior w;
        w.class_id = taxonomy.id(jw.at("class").get<std::string>());
        w.target_distance = jw.value("distance", 0.0);
        w.target_angle = jw.value("angle", 0.0);
        w.weight_distance = jw.value("weight_distance", 1.0);
        w.weight_angle = jw.value("weight_angle", 0.5);
        c.wall.push_back(w);
    }
    for (const auto& jv : j.value("visibility", json::array())) {
        VisibilityPair v;
        v.class_a = taxonomy.id(jv.at("classes").at(0).get<std::string>());
        v.class_b = taxonomy.id(jv.at("classes").at(1).get<std::string>());
        v.weight = jv.value("weight", 1.0);
        v.canonicalize();
        c.visibility.push_back(v);
    }
    if (j.contains("mask")) {
        const auto& m = j["mask"];
        c.mask.pairwise = m.value("pairwise", true);
        c.mask.visibility = m.value("visibility", true);
        c.mask.wall = m.value("wall", true);
        c.mask.pair_angle = m.value("pair_angle", true);
    }
    c.validate();
    return c;
}

// --- camera / schedule / noise ----------------------------------------------

inline json intrinsics_to_json(const CameraIntrinsics& k) {
    return json{{"width", k.width}, {"height", k.height}, {"fx", k.fx},
                {"fy", k.fy},       {"cx", k.cx},         {"cy", k.cy},
                {"near", k.near_plane}, {"far", k.far_plane}};
}

inline CameraIntrinsics intrinsics_from_json(const json& j) {
    CameraIntrinsics k;
    const double focal_per_width = k.fx / k.width;
    k.width = j.value("width", k.width);
    k.height = j.value("height", k.height);
    // entries absent from the json follow the stated size: the default field
    // of view with square pixels, and a centered principal point
    k.fx = j.value("fx", focal_per_width * k.width);
    k.fy = j.value("fy", k.fx);
    k.cx = j.value("cx", k.width / 2.0);
    k.cy = j.value("cy", k.height / 2.0);
    k.near_plane = j.value("near", k.near_plane);
    k.far_plane = j.value("far", k.far_plane);
    k.validate();
    return k;
}

inline json schedule_to_json(const AnnealSchedule& s) {
    return json{{"initial_temperature", s.initial_temperature},
                {"cooling_factor", s.cooling_factor},
                {"steps_per_temperature", s.steps_per_temperature},
                {"min_temperature", s.min_temperature},
                {"max_iterations", s.max_iterations},
                {"translate_scale", s.translate_scale},
                {"rotate_scale", s.rotate_scale},
                {"snap_yaw_90", s.snap_yaw_90},
                {"feasibility_bound", s.feasibility_bound}};
}

inline AnnealSchedule schedule_from_json(const json& j) {
    AnnealSchedule s;
    s.initial_temperature = j.value("initial_temperature", s.initial_temperature);
    s.cooling_factor = j.value("cooling_factor", s.cooling_factor);
    s.steps_per_temperature = j.value("steps_per_temperature", s.steps_per_temperature);
    s.min_temperature = j.value("min_temperature", s.min_temperature);
    s.max_iterations = j.value("max_iterations", s.max_iterations);
    s.translate_scale = j.value("translate_scale", s.translate_scale);
    s.rotate_scale = j.value("rotate_scale", s.rotate_scale);
    s.snap_yaw_90 = j.value("snap_yaw_90", s.snap_yaw_90);
    s.feasibility_bound = j.value("feasibility_bound", s.feasibility_bound);
    s.validate();
    return s;
}

inline json noise_to_json(const NoiseParams& p) {
    return json{{"axial", {p.axial_a0, p.axial_a1, p.axial_a2}},
                {"lateral_sigma", p.lateral_sigma},
                {"grazing_angle", p.grazing_angle},
                {"baseline", p.baseline},
                {"disparity_step", p.disparity_step},
                {"shadow_dropout", p.shadow_dropout}};
}

inline NoiseParams noise_from_json(const json& j) {
    NoiseParams p;
    if (j.contains("axial")) {
        p.axial_a0 = j["axial"].at(0).get<double>();
        p.axial_a1 = j["axial"].at(1).get<double>();
        p.axial_a2 = j["axial"].at(2).get<double>();
    }
    p.lateral_sigma = j.value("lateral_sigma", p.lateral_sigma);
    p.grazing_angle = j.value("grazing_angle", p.grazing_angle);
    p.baseline = j.value("baseline", p.baseline);
    p.disparity_step = j.value("disparity_step", p.disparity_step);
    p.shadow_dropout = j.value("shadow_dropout", p.shadow_dropout);
    p.validate();
    return p;
}

// --- trajectory file ----------------------------------------------------------

/// One pose per line, camera-in-world: `tx ty tz qx qy qz qw`.
inline void write_poses(std::ostream& out, const std::vector<CameraPose>& poses) {
    out << std::setprecision(17);
    for (const auto& p : poses) {
        const Vec3 c = p.center();
        const Eigen::Quaterniond q(
            Eigen::Matrix3d(p.rotation.transpose()));
        out << c.x() << " " << c.y() << " " << c.z() << " " << q.x() << " "
            << q.y() << " " << q.z() << " " << q.w() << "\n";
    }
}

inline void write_poses(const std::string& path, const std::vector<CameraPose>& poses) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_poses(f, poses);
}

inline std::vector<CameraPose> read_poses(std::istream& in) {
    std::vector<CameraPose> poses;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double tx, ty, tz, qx, qy, qz, qw;
        if (!(ls >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
            throw std::runtime_error("trajectory: malformed pose line '" + line + "'");
        Eigen::Quaterniond q(qw, qx, qy, qz);
        q.normalize();
        CameraPose p;
        p.rotation = q.toRotationMatrix().transpose();
        p.translation = -(p.rotation * Vec3(tx, ty, tz));
        poses.push_back(p);
    }
    return poses;
}

inline std::vector<CameraPose> read_poses(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_poses(f);
}

// --- DHA container ------------------------------------------------------------

/// One JSON header line, then three float32 little-endian planes in channel
/// order depth, height, angle.
inline void write_dha(const std::string& path, const DhaFrame& dha) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    const json header{{"width", dha.width},
                      {"height", dha.height},
                      {"channels", {"depth", "height", "angle"}},
                      {"units", {"m", "m", "deg"}},
                      {"dtype", "float32"}};
    f << header.dump() << "\n";
    auto write_plane = [&](const std::vector<double>& plane) {
        std::vector<float> buf(plane.begin(), plane.end());
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    };
    write_plane(dha.depth);
    write_plane(dha.elevation);
    write_plane(dha.angle_deg);
    if (!f) throw std::runtime_error("short write: " + path);
}

inline DhaFrame read_dha(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string header_line;
    if (!std::getline(f, header_line))
        throw std::runtime_error("dha: missing header in " + path);
    const json header = json::parse(header_line);
    DhaFrame dha(header.at("width").get<int>(), header.at("height").get<int>());
    auto read_plane = [&](std::vector<double>& plane) {
        std::vector<float> buf(plane.size());
        f.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!f) throw std::runtime_error("dha: truncated planes in " + path);
        plane.assign(buf.begin(), buf.end());
    };
    read_plane(dha.depth);
    read_plane(dha.elevation);
    read_plane(dha.angle_deg);
    return dha;
}

// --- config hashing -----------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stable hex digest of a JSON document (nlohmann objects serialize with
/// sorted keys, so the dump is canonical).
inline std::string config_hash(const json& j) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
    return out.str();
}

}  // namespace scenesynth
