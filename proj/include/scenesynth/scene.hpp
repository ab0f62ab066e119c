#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scenesynth/geometry.hpp"

namespace scenesynth {

/// Planar pose of an object: floor-plane position plus yaw about the
/// vertical axis. Yaw is kept normalized to [-pi, pi).
struct Pose2D {
    Vec2 position{0.0, 0.0};
    double yaw = 0.0;

    Pose2D() = default;
    Pose2D(const Vec2& p, double y) : position(p), yaw(wrap_angle(y)) {}

    void set_yaw(double y) { yaw = wrap_angle(y); }
};

/// A placed object: class, box footprint, planar pose. The 3D box spans
/// [base_height, base_height + 2*hz] vertically; layout optimization only
/// ever moves the planar pose.
struct ObjectInstance {
    std::string id;
    int class_id = 0;
    Vec3 half_extents{0.5, 0.5, 0.5};
    Pose2D pose;
    double base_height = 0.0;
    std::optional<std::string> mesh;  // key into a mesh library, box otherwise

    void validate() const {
        if (!(half_extents.x() > 0.0 && half_extents.y() > 0.0 &&
              half_extents.z() > 0.0))
            throw std::invalid_argument("object '" + id +
                                        "': half extents must be positive");
        if (base_height < 0.0)
            throw std::invalid_argument("object '" + id +
                                        "': base height must be >= 0");
    }
};

/// Half diagonal of the floor-plane footprint. Yaw-invariant; the vertical
/// extent does not enter layout distances.
inline double obb_half_diagonal(const ObjectInstance& obj) {
    return std::hypot(obj.half_extents.x(), obj.half_extents.y());
}

/// Planar distance between footprint centers.
inline double center_distance(const ObjectInstance& a, const ObjectInstance& b) {
    return (a.pose.position - b.pose.position).norm();
}

/// One wall of the room shell: a floor-plane segment plus the yaw of its
/// inward-pointing normal.
struct Wall {
    Segment2 segment;
    double inward_normal_yaw = 0.0;
};

/// Rectangular room: floor rectangle plus vertical walls of equal height.
struct RoomShell {
    double width = 4.0;
    double depth = 4.0;
    double wall_height = 2.5;
    Vec2 origin{0.0, 0.0};  // min corner of the floor rectangle

    RoomShell() = default;
    RoomShell(double w, double d, double h, const Vec2& o = Vec2(0.0, 0.0))
        : width(w), depth(d), wall_height(h), origin(o) {
        if (!(width > 0.0 && depth > 0.0 && wall_height > 0.0))
            throw std::invalid_argument("room: dimensions must be positive");
    }

    Rect floor_rect() const { return Rect{origin, origin + Vec2(width, depth)}; }

    /// Walls in fixed order: x=min, x=max, y=min, y=max.
    std::array<Wall, 4> walls() const {
        const Vec2 lo = origin;
        const Vec2 hi = origin + Vec2(width, depth);
        return {
            Wall{{Vec2(lo.x(), lo.y()), Vec2(lo.x(), hi.y())}, 0.0},
            Wall{{Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y())}, -M_PI},
            Wall{{Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y())}, M_PI / 2.0},
            Wall{{Vec2(lo.x(), hi.y()), Vec2(hi.x(), hi.y())}, -M_PI / 2.0},
        };
    }

    struct NearestWall {
        int index;
        double distance;
    };

    /// Wall nearest to a point (smallest index wins ties).
    NearestWall nearest_wall(const Vec2& p) const {
        const auto ws = walls();
        int best = 0;
        double best_d = point_segment_distance(p, ws[0].segment);
        for (int i = 1; i < 4; ++i) {
            const double d = point_segment_distance(p, ws[i].segment);
            if (d < best_d) {
                best = i;
                best_d = d;
            }
        }
        return {best, best_d};
    }
};

/// Optimization state: room shell, placed objects and a partition of the
/// objects into groups for hierarchical arrangement.
struct SceneLayout {
    RoomShell room;
    std::vector<ObjectInstance> objects;
    std::vector<std::vector<std::string>> groups;

    const ObjectInstance& object(const std::string& id) const {
        for (const auto& o : objects)
            if (o.id == id) return o;
        throw std::invalid_argument("layout: no object with id '" + id + "'");
    }

    int index_of(const std::string& id) const {
        for (int i = 0; i < static_cast<int>(objects.size()); ++i)
            if (objects[i].id == id) return i;
        throw std::invalid_argument("layout: no object with id '" + id + "'");
    }

    /// Every object id appears in exactly one group; empty `groups` is
    /// normalized to singletons.
    void validate() const {
        std::unordered_set<std::string> ids;
        for (const auto& o : objects) {
            o.validate();
            if (!ids.insert(o.id).second)
                throw std::invalid_argument("layout: duplicate object id '" +
                                            o.id + "'");
        }
        if (groups.empty()) return;
        std::unordered_set<std::string> seen;
        for (const auto& g : groups)
            for (const auto& id : g) {
                if (!ids.count(id))
                    throw std::invalid_argument("layout: group names unknown id '" +
                                                id + "'");
                if (!seen.insert(id).second)
                    throw std::invalid_argument("layout: id '" + id +
                                                "' in more than one group");
            }
        if (seen.size() != ids.size())
            throw std::invalid_argument("layout: group partition does not cover all objects");
    }

    /// Groups as object indices, defaulting to singletons when unset.
    std::vector<std::vector<int>> group_indices() const {
        std::vector<std::vector<int>> out;
        if (groups.empty()) {
            for (int i = 0; i < static_cast<int>(objects.size()); ++i)
                out.push_back({i});
            return out;
        }
        std::unordered_map<std::string, int> idx;
        for (int i = 0; i < static_cast<int>(objects.size()); ++i)
            idx[objects[i].id] = i;
        for (const auto& g : groups) {
            std::vector<int> gi;
            for (const auto& id : g) gi.push_back(idx.at(id));
            out.push_back(std::move(gi));
        }
        return out;
    }
};

}  // namespace scenesynth
