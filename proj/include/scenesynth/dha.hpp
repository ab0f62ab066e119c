#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scenesynth/camera.hpp"
#include "scenesynth/image.hpp"
#include "scenesynth/rasterize.hpp"
#include "scenesynth/sensor.hpp"

namespace scenesynth {

/// Three registered channels derived from one depth frame: depth (meters),
/// height above the floor plane (meters), angle between the surface normal
/// and gravity-up (degrees in [0, 180], normals oriented toward the camera
/// so floors read ~0 from anywhere). Invalid pixels carry (0, 0, 90).
struct DhaFrame {
    int width = 0;
    int height = 0;
    std::vector<double> depth;
    std::vector<double> elevation;  // "height" channel
    std::vector<double> angle_deg;

    DhaFrame() = default;
    DhaFrame(int w, int h)
        : width(w),
          height(h),
          depth(static_cast<std::size_t>(w) * h, 0.0),
          elevation(static_cast<std::size_t>(w) * h, 0.0),
          angle_deg(static_cast<std::size_t>(w) * h, 90.0) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
};

inline Vec3 camera_to_world(const CameraPose& pose, const Vec3& cam) {
    return pose.rotation.transpose() * (cam - pose.translation);
}

/// Depth/height/angle encoding. The depth channel equals the input exactly;
/// height is world z of the back-projected point minus `floor_height`;
/// angle comes from camera-frame normals rotated into the world. Pixels
/// whose normal cannot be estimated keep the 90-degree fill in the angle
/// channel (their depth and height are still real).
inline DhaFrame encode_dha(const DepthFrame& frame, const CameraPose& pose,
                           const CameraIntrinsics& k, double floor_height) {
    k.validate();
    pose.validate();
    if (frame.width != k.width || frame.height != k.height)
        throw std::invalid_argument("dha: frame does not match intrinsics");

    const NormalFrame normals = estimate_normals(frame, k);
    const Vec3 up = pose.gravity_up.normalized();
    DhaFrame out(frame.width, frame.height);

    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            const double z = frame.at(x, y);
            if (!depth_valid(z)) continue;
            const std::size_t i = out.index(x, y);
            out.depth[i] = z;
            const Vec3 world =
                camera_to_world(pose, back_project(k, x + 0.5, y + 0.5, z));
            out.elevation[i] = world.z() - floor_height;
            if (normals.is_valid(x, y)) {
                const Vec3 n_world = pose.rotation.transpose() * normals.at(x, y);
                const double d = std::clamp(n_world.dot(up), -1.0, 1.0);
                out.angle_deg[i] = rad_to_deg(std::acos(d));
            }
        }
    return out;
}

struct DhaInvarianceReport {
    std::size_t matched = 0;
    double max_angle_diff_deg = 0.0;
    double max_height_diff = 0.0;
};

namespace detail {

/// Normals estimated on top of a surface crease blend the two faces by a
/// sub-pixel fraction and are view dependent by construction. A normal is
/// trusted for cross-view comparison only when it agrees with every valid
/// 4-neighbor, i.e. it sits in the interior of a locally planar patch.
inline bool normal_locally_consistent(const NormalFrame& n, int x, int y,
                                      double min_dot = 0.996) {
    if (!n.is_valid(x, y)) return false;
    const Vec3& c = n.at(x, y);
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int i = 0; i < 4; ++i) {
        const int nx = x + dx[i], ny = y + dy[i];
        if (nx < 0 || nx >= n.width || ny < 0 || ny >= n.height) continue;
        if (!n.is_valid(nx, ny)) continue;
        if (c.dot(n.at(nx, ny)) < min_dot) return false;
    }
    return true;
}

}  // namespace detail

/// Measures how stable the height and angle channels are across two views
/// of the same geometry: every pixel of view A with a trusted normal is
/// re-projected into view B and compared when the two back-projected world
/// points land within `match_radius` and B's normal is trusted as well.
inline DhaInvarianceReport dha_invariance_check(const std::vector<TriMesh>& meshes,
                                                const CameraPose& pose_a,
                                                const CameraPose& pose_b,
                                                const CameraIntrinsics& k,
                                                double floor_height,
                                                double match_radius = 0.01) {
    const FramePair fa = rasterize(meshes, pose_a, k);
    const FramePair fb = rasterize(meshes, pose_b, k);
    const NormalFrame na = estimate_normals(fa.depth, k);
    const NormalFrame nb = estimate_normals(fb.depth, k);
    const DhaFrame da = encode_dha(fa.depth, pose_a, k, floor_height);
    const DhaFrame db = encode_dha(fb.depth, pose_b, k, floor_height);

    DhaInvarianceReport report;
    for (int y = 0; y < k.height; ++y)
        for (int x = 0; x < k.width; ++x) {
            if (!detail::normal_locally_consistent(na, x, y)) continue;
            const double za = fa.depth.at(x, y);
            const Vec3 world =
                camera_to_world(pose_a, back_project(k, x + 0.5, y + 0.5, za));

            const Vec3 cam_b = pose_b.to_camera(world);
            if (cam_b.z() < k.near_plane) continue;
            const Vec2 uv = project(k, cam_b);
            const int bx = static_cast<int>(std::floor(uv.x()));
            const int by = static_cast<int>(std::floor(uv.y()));
            if (!fb.depth.in_bounds(bx, by)) continue;
            if (!detail::normal_locally_consistent(nb, bx, by)) continue;
            const double zb = fb.depth.at(bx, by);
            if (!depth_valid(zb)) continue;
            const Vec3 world_b =
                camera_to_world(pose_b, back_project(k, bx + 0.5, by + 0.5, zb));
            if ((world_b - world).norm() > match_radius) continue;

            ++report.matched;
            report.max_angle_diff_deg =
                std::max(report.max_angle_diff_deg,
                         std::abs(da.angle_deg[da.index(x, y)] -
                                  db.angle_deg[db.index(bx, by)]));
            report.max_height_diff =
                std::max(report.max_height_diff,
                         std::abs(da.elevation[da.index(x, y)] -
                                  db.elevation[db.index(bx, by)]));
        }

    if (report.matched == 0)
        throw std::runtime_error("dha invariance: views share no matched surface");
    return report;
}

}  // namespace scenesynth
