#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "scenesynth/camera.hpp"
#include "scenesynth/image.hpp"
#include "scenesynth/mesh.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

struct FramePair {
    DepthFrame depth;
    LabelFrame label;
};

namespace detail {

inline double edge_fn(double ax, double ay, double bx, double by, double px,
                      double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

/// Clips a camera-space triangle against z >= near (Sutherland-Hodgman);
/// yields 0, 3 or 4 vertices.
inline int clip_near(const Vec3 in[3], double near_z, Vec3 out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& cur = in[i];
        const Vec3& nxt = in[(i + 1) % 3];
        const double dc = cur.z() - near_z;
        const double dn = nxt.z() - near_z;
        if (dc >= 0.0) out[n++] = cur;
        if ((dc >= 0.0) != (dn >= 0.0))
            out[n++] = cur + (dc / (dc - dn)) * (nxt - cur);
    }
    return n;
}

/// Fills one camera-space triangle (all z >= near) into the buffers.
/// Double-sided; depth is camera z, perspective-correct via 1/z; pixel
/// centers at +0.5; strict z-compare so the first-drawn triangle keeps ties.
inline void fill_triangle(const Vec3& a, const Vec3& b, const Vec3& c, int cls,
                          const CameraIntrinsics& k, std::vector<double>& zbuf,
                          FramePair& out) {
    const double u0 = k.fx * a.x() / a.z() + k.cx, v0 = k.fy * a.y() / a.z() + k.cy;
    const double u1 = k.fx * b.x() / b.z() + k.cx, v1 = k.fy * b.y() / b.z() + k.cy;
    const double u2 = k.fx * c.x() / c.z() + k.cx, v2 = k.fy * c.y() / c.z() + k.cy;
    const double w0 = 1.0 / a.z(), w1 = 1.0 / b.z(), w2 = 1.0 / c.z();

    const double area = edge_fn(u0, v0, u1, v1, u2, v2);
    if (std::abs(area) < 1e-14) return;

    const double min_u = std::min({u0, u1, u2}), max_u = std::max({u0, u1, u2});
    const double min_v = std::min({v0, v1, v2}), max_v = std::max({v0, v1, v2});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_u - 0.5)));
    const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(max_u - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_v - 0.5)));
    const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(max_v - 0.5)));

    for (int py = y0; py <= y1; ++py) {
        const double sy = py + 0.5;
        for (int px = x0; px <= x1; ++px) {
            const double sx = px + 0.5;
            double e0 = edge_fn(u1, v1, u2, v2, sx, sy);
            double e1 = edge_fn(u2, v2, u0, v0, sx, sy);
            double e2 = edge_fn(u0, v0, u1, v1, sx, sy);
            if (area < 0.0) {
                e0 = -e0;
                e1 = -e1;
                e2 = -e2;
            }
            if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
            const double aa = std::abs(area);
            const double w = (e0 * w0 + e1 * w1 + e2 * w2) / aa;
            if (!(w > 0.0)) continue;
            double z = 1.0 / w;
            if (z < k.near_plane) z = k.near_plane;  // clip-boundary roundoff
            if (z > k.far_plane) continue;
            const std::size_t idx = static_cast<std::size_t>(py) * k.width + px;
            if (z < zbuf[idx]) {
                zbuf[idx] = z;
                out.depth.data[idx] = z;
                out.label.data[idx] = static_cast<std::uint8_t>(cls);
            }
        }
    }
}

}  // namespace detail

/// Z-buffer rasterization of world-space meshes: planar depth (camera z) of
/// the nearest surface and the class of the winning triangle, pixelwise
/// consistent. Deterministic: meshes and triangles are drawn in order.
inline FramePair rasterize(const std::vector<TriMesh>& meshes, const CameraPose& pose,
                           const CameraIntrinsics& k,
                           std::uint8_t background_label = 0) {
    k.validate();
    pose.validate();
    FramePair out{DepthFrame(k.width, k.height, kInvalidDepth),
                  LabelFrame(k.width, k.height, background_label)};
    std::vector<double> zbuf(out.depth.pixel_count(),
                             std::numeric_limits<double>::infinity());

    for (const auto& mesh : meshes) {
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            const int cls = mesh.triangle_class[t];
            if (cls < 0 || cls > 255)
                throw std::invalid_argument("rasterize: class id not renderable");
            const Vec3 cam[3] = {pose.to_camera(mesh.vertices[tri[0]]),
                                 pose.to_camera(mesh.vertices[tri[1]]),
                                 pose.to_camera(mesh.vertices[tri[2]])};
            Vec3 clipped[4];
            const int n = detail::clip_near(cam, k.near_plane, clipped);
            for (int i = 1; i + 1 < n; ++i)
                detail::fill_triangle(clipped[0], clipped[i], clipped[i + 1], cls, k,
                                      zbuf, out);
        }
    }
    return out;
}

inline std::vector<FramePair> render_trajectory(const std::vector<TriMesh>& meshes,
                                                const std::vector<CameraPose>& poses,
                                                const CameraIntrinsics& k,
                                                std::uint8_t background_label = 0) {
    std::vector<FramePair> out;
    out.reserve(poses.size());
    for (const auto& p : poses) out.push_back(rasterize(meshes, p, k, background_label));
    return out;
}

/// World-space meshes for a layout: room shell first, then one mesh per
/// object in layout order. Objects referencing a library mesh use it
/// (object frame, pose applied); otherwise their bounding box is used.
/// Instance meshes are labelled uniformly with the instance's class.
inline std::vector<TriMesh> assemble_scene_meshes(
    const SceneLayout& layout, int floor_class, int wall_class, int ceiling_class,
    const std::map<std::string, TriMesh>* mesh_library = nullptr) {
    std::vector<TriMesh> out;
    out.push_back(make_room_mesh(layout.room, floor_class, wall_class, ceiling_class));
    for (const auto& obj : layout.objects) {
        TriMesh m;
        if (obj.mesh && mesh_library) {
            const auto it = mesh_library->find(*obj.mesh);
            if (it == mesh_library->end())
                throw std::invalid_argument("scene meshes: no mesh named '" +
                                            *obj.mesh + "' in library");
            m = it->second;
            std::fill(m.triangle_class.begin(), m.triangle_class.end(), obj.class_id);
        } else {
            m = make_box_mesh(obj.half_extents.x(), obj.half_extents.y(),
                              obj.half_extents.z(), 0.0, obj.class_id);
        }
        out.push_back(transform_mesh(m, obj.pose, obj.base_height));
    }
    return out;
}

}  // namespace scenesynth
