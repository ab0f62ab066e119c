#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scenesynth/geometry.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

/// Indexed triangle mesh with a class label per triangle.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> triangle_class;

    void validate() const {
        const int n = static_cast<int>(vertices.size());
        if (triangles.size() != triangle_class.size())
            throw std::invalid_argument("mesh: class count != triangle count");
        for (const auto& t : triangles)
            for (int k = 0; k < 3; ++k)
                if (t[k] < 0 || t[k] >= n)
                    throw std::invalid_argument("mesh: triangle index out of range");
    }

    /// Drops triangles with repeated indices or (numerically) zero area.
    void remove_degenerate(double area_eps = 1e-12) {
        std::vector<std::array<int, 3>> tris;
        std::vector<int> cls;
        for (std::size_t i = 0; i < triangles.size(); ++i) {
            const auto& t = triangles[i];
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
            const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
            const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
            if (0.5 * e1.cross(e2).norm() <= area_eps) continue;
            tris.push_back(t);
            cls.push_back(triangle_class[i]);
        }
        triangles = std::move(tris);
        triangle_class = std::move(cls);
    }
};

namespace detail {
inline void push_quad(TriMesh& m, const Vec3& a, const Vec3& b, const Vec3& c,
                      const Vec3& d, int cls) {
    const int base = static_cast<int>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), {a, b, c, d});
    m.triangles.push_back({base, base + 1, base + 2});
    m.triangles.push_back({base, base + 2, base + 3});
    m.triangle_class.push_back(cls);
    m.triangle_class.push_back(cls);
}
}  // namespace detail

/// Axis-aligned box in object frame: footprint [-hx,hx]x[-hy,hy], vertical
/// span [z0, z0 + 2*hz]. All six faces, one class.
inline TriMesh make_box_mesh(double hx, double hy, double hz, double z0, int cls) {
    TriMesh m;
    const double z1 = z0 + 2.0 * hz;
    const Vec3 p000(-hx, -hy, z0), p100(hx, -hy, z0), p110(hx, hy, z0), p010(-hx, hy, z0);
    const Vec3 p001(-hx, -hy, z1), p101(hx, -hy, z1), p111(hx, hy, z1), p011(-hx, hy, z1);
    detail::push_quad(m, p000, p100, p110, p010, cls);  // bottom
    detail::push_quad(m, p001, p101, p111, p011, cls);  // top
    detail::push_quad(m, p000, p100, p101, p001, cls);  // y = -hy
    detail::push_quad(m, p010, p110, p111, p011, cls);  // y = +hy
    detail::push_quad(m, p000, p010, p011, p001, cls);  // x = -hx
    detail::push_quad(m, p100, p110, p111, p101, cls);  // x = +hx
    return m;
}

/// Room shell geometry: floor, four walls and (when ceiling_class >= 0) a
/// ceiling, labelled with the given structural classes.
inline TriMesh make_room_mesh(const RoomShell& room, int floor_class,
                              int wall_class, int ceiling_class) {
    TriMesh m;
    const Vec2 lo = room.origin;
    const Vec2 hi = room.origin + Vec2(room.width, room.depth);
    const double h = room.wall_height;
    const Vec3 f00(lo.x(), lo.y(), 0), f10(hi.x(), lo.y(), 0);
    const Vec3 f11(hi.x(), hi.y(), 0), f01(lo.x(), hi.y(), 0);
    detail::push_quad(m, f00, f10, f11, f01, floor_class);
    detail::push_quad(m, f00, f10, f10 + Vec3(0, 0, h), f00 + Vec3(0, 0, h), wall_class);
    detail::push_quad(m, f10, f11, f11 + Vec3(0, 0, h), f10 + Vec3(0, 0, h), wall_class);
    detail::push_quad(m, f11, f01, f01 + Vec3(0, 0, h), f11 + Vec3(0, 0, h), wall_class);
    detail::push_quad(m, f01, f00, f00 + Vec3(0, 0, h), f01 + Vec3(0, 0, h), wall_class);
    if (ceiling_class >= 0)
        detail::push_quad(m, f00 + Vec3(0, 0, h), f10 + Vec3(0, 0, h),
                          f11 + Vec3(0, 0, h), f01 + Vec3(0, 0, h), ceiling_class);
    return m;
}

/// Applies a planar pose to an object-frame mesh: yaw about +z, then
/// translation to (x, y, base_height).
inline TriMesh transform_mesh(const TriMesh& mesh, const Pose2D& pose,
                              double base_height) {
    TriMesh out = mesh;
    const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
    for (auto& v : out.vertices) {
        const double x = c * v.x() - s * v.y() + pose.position.x();
        const double y = s * v.x() + c * v.y() + pose.position.y();
        v = Vec3(x, y, v.z() + base_height);
    }
    return out;
}

}  // namespace scenesynth
