#pragma once

#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

#include "scenesynth/geometry.hpp"

namespace scenesynth {

/// Pinhole model. Pixel (u,v) = (fx*x/z + cx, fy*y/z + cy) in a camera frame
/// with x right, y down, z forward; (0,0) is the top-left pixel's corner,
/// pixel centers at +0.5.
struct CameraIntrinsics {
    int width = 320;
    int height = 240;
    double fx = 285.0;
    double fy = 285.0;
    double cx = 160.0;
    double cy = 120.0;
    double near_plane = 0.4;  // meters
    double far_plane = 8.0;

    void validate() const {
        if (width < 1 || height < 1)
            throw std::invalid_argument("intrinsics: image size must be positive");
        if (!(fx > 0.0 && fy > 0.0))
            throw std::invalid_argument("intrinsics: focal lengths must be > 0");
        if (!(near_plane > 0.0 && near_plane < far_plane))
            throw std::invalid_argument("intrinsics: need 0 < near < far");
        if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
            throw std::invalid_argument("intrinsics: principal point outside image");
    }
};

/// Rigid world->camera transform: x_cam = R * x_world + t. Gravity is the
/// world up axis, fixed +Z for every scene here.
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation{0.0, 0.0, 0.0};
    Vec3 gravity_up{0.0, 0.0, 1.0};

    void validate() const {
        const Eigen::Matrix3d err =
            rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
        if (err.cwiseAbs().maxCoeff() > 1e-9 ||
            std::abs(rotation.determinant() - 1.0) > 1e-9)
            throw std::invalid_argument("camera pose: rotation not orthonormal");
    }

    Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
    Vec3 center() const { return -(rotation.transpose() * translation); }
};

/// Camera at `position` looking along `yaw` (about world z) with `pitch`
/// above the horizon. Rows of R are the camera's right / down / forward
/// axes expressed in world coordinates.
inline CameraPose make_camera_pose(const Vec3& position, double yaw, double pitch) {
    if (std::abs(std::cos(pitch)) < 1e-9)
        throw std::invalid_argument("camera pose: pitch too close to vertical");
    const Vec3 forward(std::cos(pitch) * std::cos(yaw),
                       std::cos(pitch) * std::sin(yaw), std::sin(pitch));
    const Vec3 up(0.0, 0.0, 1.0);
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);

    CameraPose pose;
    pose.rotation.row(0) = right;
    pose.rotation.row(1) = down;
    pose.rotation.row(2) = forward;
    pose.translation = -(pose.rotation * position);
    return pose;
}

inline Vec2 project(const CameraIntrinsics& k, const Vec3& cam) {
    return {k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy};
}

/// Camera-frame point for pixel (u,v) at planar depth z.
inline Vec3 back_project(const CameraIntrinsics& k, double u, double v, double z) {
    return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

/// Unit-z ray direction through a pixel center (planar-depth convention:
/// the hit parameter t equals camera z).
inline Vec3 pixel_ray(const CameraIntrinsics& k, int px, int py) {
    return {(px + 0.5 - k.cx) / k.fx, (py + 0.5 - k.cy) / k.fy, 1.0};
}

}  // namespace scenesynth
