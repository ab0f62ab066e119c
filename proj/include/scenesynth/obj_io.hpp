#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenesynth/mesh.hpp"
#include "scenesynth/taxonomy.hpp"

namespace scenesynth {

/// Wavefront OBJ reader: keeps `v` and `f` (fan-triangulated), tracks the
/// active `g`/`o` name to assign per-triangle classes via `class_of_group`.
/// Normals, texcoords, materials are ignored. Negative face indices are
/// resolved relative to the vertices read so far.
inline TriMesh load_obj(std::istream& in,
                        const std::function<int(const std::string&)>& class_of_group,
                        const std::string& source_name = "<stream>") {
    TriMesh mesh;
    std::string line;
    std::string group = "";
    int group_class = class_of_group(group);
    int line_no = 0;

    auto fail = [&](const std::string& what) {
        throw std::runtime_error(source_name + ":" + std::to_string(line_no) +
                                 ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;

        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) fail("malformed vertex");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "g" || tag == "o") {
            std::string name;
            std::getline(ls >> std::ws, name);
            group = name;
            group_class = class_of_group(group);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string corner;
            while (ls >> corner) {
                // take the position index of "v", "v/t", "v//n", "v/t/n"
                const auto slash = corner.find('/');
                const std::string head = corner.substr(0, slash);
                int v = 0;
                try {
                    v = std::stoi(head);
                } catch (const std::exception&) {
                    fail("malformed face index '" + corner + "'");
                }
                if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
                if (v < 1 || v > static_cast<int>(mesh.vertices.size()))
                    fail("face index out of range");
                idx.push_back(v - 1);
            }
            if (idx.size() < 3) fail("face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
                mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
                mesh.triangle_class.push_back(group_class);
            }
        }
        // anything else (vn, vt, s, mtllib, usemtl, ...) is skipped
    }

    mesh.remove_degenerate();
    mesh.validate();
    return mesh;
}

/// Sidecar manifest resolving OBJ group names to taxonomy class names:
///   { "group_classes": {"bed_frame": "bed", ...}, "default_class": "background" }
/// Groups absent from the map take the default class.
struct ObjManifest {
    std::map<std::string, std::string> group_classes;
    std::string default_class;
};

inline ObjManifest parse_obj_manifest(const nlohmann::json& j) {
    ObjManifest m;
    m.default_class = j.value("default_class", std::string{});
    if (j.contains("group_classes"))
        for (const auto& [k, v] : j.at("group_classes").items())
            m.group_classes[k] = v.get<std::string>();
    return m;
}

inline TriMesh load_obj_with_manifest(const std::string& obj_path,
                                      const std::string& manifest_path,
                                      const ClassTaxonomy& taxonomy) {
    std::ifstream mf(manifest_path);
    if (!mf) throw std::runtime_error("cannot open manifest: " + manifest_path);
    nlohmann::json j;
    mf >> j;
    const ObjManifest manifest = parse_obj_manifest(j);
    const int fallback = manifest.default_class.empty()
                             ? taxonomy.background_id()
                             : taxonomy.id(manifest.default_class);

    std::ifstream f(obj_path);
    if (!f) throw std::runtime_error("cannot open mesh: " + obj_path);
    return load_obj(
        f,
        [&](const std::string& group) {
            const auto it = manifest.group_classes.find(group);
            return it == manifest.group_classes.end() ? fallback
                                                      : taxonomy.id(it->second);
        },
        obj_path);
}

}  // namespace scenesynth
