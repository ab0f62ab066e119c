#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenesynth/camera.hpp"
#include "scenesynth/rasterize.hpp"
#include "scenesynth/rng.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

struct ViewpointOptions {
    double min_height = 1.0;  // meters above the floor
    double max_height = 1.8;
    double min_pitch = deg_to_rad(-30.0);
    double max_pitch = deg_to_rad(10.0);
    long long trials_per_pose = 1000;  // acceptance below 1/trials aborts
};

namespace detail {

inline bool inside_any_object(const SceneLayout& layout, const Vec3& p) {
    for (const auto& o : layout.objects) {
        if (p.z() < o.base_height || p.z() > o.base_height + 2.0 * o.half_extents.z())
            continue;
        if (point_in_footprint(Vec2(p.x(), p.y()), o.pose.position,
                               o.half_extents.x(), o.half_extents.y(), o.pose.yaw))
            return true;
    }
    return false;
}

}  // namespace detail

/// Rejection-samples camera poses inside the room: position uniform over
/// free space at eye height, yaw uniform, pitch within a handheld band. A
/// pose is kept iff its rendered labels show at least `min_visible_classes`
/// distinct classes outside `structural_classes` (walls, floor, ceiling,
/// background). Deterministic in the seed.
inline std::vector<CameraPose> sample_viewpoints(
    const std::vector<TriMesh>& meshes, const SceneLayout& layout,
    const CameraIntrinsics& k, int count, int min_visible_classes,
    std::uint64_t seed, const std::set<int>& structural_classes,
    std::uint8_t background_label = 0, const ViewpointOptions& opt = {}) {
    if (count < 1) throw std::invalid_argument("viewpoints: count must be >= 1");
    if (min_visible_classes < 0)
        throw std::invalid_argument("viewpoints: min visible classes must be >= 0");

    Rng rng(mix_seed(seed, 0x71e3));
    const Rect floor = layout.room.floor_rect();
    std::vector<CameraPose> out;
    const long long budget = opt.trials_per_pose * count;

    for (long long trial = 0; trial < budget && static_cast<int>(out.size()) < count;
         ++trial) {
        const double x = rng.uniform(floor.min.x(), floor.max.x());
        const double y = rng.uniform(floor.min.y(), floor.max.y());
        const double h = rng.uniform(opt.min_height, opt.max_height);
        const double yaw = rng.uniform(-M_PI, M_PI);
        const double pitch = rng.uniform(opt.min_pitch, opt.max_pitch);

        const Vec3 position(x, y, h);
        if (h > layout.room.wall_height) continue;
        if (detail::inside_any_object(layout, position)) continue;

        const CameraPose pose = make_camera_pose(position, yaw, pitch);
        if (min_visible_classes > 0) {
            const FramePair frame = rasterize(meshes, pose, k, background_label);
            std::set<int> seen;
            for (std::size_t i = 0; i < frame.label.data.size(); ++i) {
                if (!depth_valid(frame.depth.data[i])) continue;
                const int cls = frame.label.data[i];
                if (!structural_classes.count(cls)) seen.insert(cls);
            }
            if (static_cast<int>(seen.size()) < min_visible_classes) continue;
        }
        out.push_back(pose);
    }

    if (static_cast<int>(out.size()) < count)
        throw std::runtime_error(
            "viewpoints: acceptance rate below 1/" +
            std::to_string(opt.trials_per_pose) +
            " (constraint: min_visible_classes=" + std::to_string(min_visible_classes) +
            ")");
    return out;
}

}  // namespace scenesynth
