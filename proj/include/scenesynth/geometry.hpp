#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>

namespace scenesynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Wraps an angle to [-pi, pi).
inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / M_PI; }

/// Axis-aligned rectangle on the floor plane.
struct Rect {
    Vec2 min{0.0, 0.0};
    Vec2 max{0.0, 0.0};

    double width() const { return max.x() - min.x(); }
    double height() const { return max.y() - min.y(); }
    Vec2 center() const { return 0.5 * (min + max); }
    double diagonal() const { return (max - min).norm(); }

    bool contains(const Vec2& p) const {
        return p.x() >= min.x() && p.x() <= max.x() &&
               p.y() >= min.y() && p.y() <= max.y();
    }

    void expand(const Vec2& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
};

struct Segment2 {
    Vec2 a;
    Vec2 b;
};

/// Distance from a point to a line segment.
inline double point_segment_distance(const Vec2& p, const Segment2& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.squaredNorm();
    if (len2 <= 0.0) return (p - s.a).norm();
    const double t = std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0);
    return (p - (s.a + t * d)).norm();
}

/// Corners of a yaw-rotated rectangle footprint centered at `center`.
inline std::array<Vec2, 4> footprint_corners(const Vec2& center, double hx,
                                             double hy, double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    std::array<Vec2, 4> out;
    const double sx[4] = {+1, +1, -1, -1};
    const double sy[4] = {+1, -1, -1, +1};
    for (int i = 0; i < 4; ++i) {
        const double lx = sx[i] * hx, ly = sy[i] * hy;
        out[i] = center + Vec2(c * lx - s * ly, s * lx + c * ly);
    }
    return out;
}

/// Point-in-oriented-rectangle test (footprint at `center` with yaw).
inline bool point_in_footprint(const Vec2& p, const Vec2& center, double hx,
                               double hy, double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const Vec2 d = p - center;
    const double lx = c * d.x() + s * d.y();
    const double ly = -s * d.x() + c * d.y();
    return std::abs(lx) <= hx && std::abs(ly) <= hy;
}

}  // namespace scenesynth
