#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenesynth/geometry.hpp"
#include "scenesynth/priors.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

/// Global term weights. Per-prior weights live inside PairwisePrior /
/// WallPrior; these scalars multiply whole term families in the total.
struct EnergyWeights {
    double bbox = 10.0;
    double alpha = 2.0;        // exponent of the proximity penalty rho
    double visibility = 2.0;   // scales every protected-corridor triple
    double pair_angle = 0.5;
    double rho_cap = 1e6;      // finite stand-in for rho's d -> 0 pole
    bool smooth_rho = false;   // continuous variant: max(0, x^alpha - 1)

    void validate() const {
        if (bbox < 0.0 || visibility < 0.0 || pair_angle < 0.0)
            throw std::invalid_argument("energy weights: weights must be >= 0");
        if (alpha < 1.0)
            throw std::invalid_argument("energy weights: alpha must be >= 1");
        if (!(rho_cap > 0.0))
            throw std::invalid_argument("energy weights: rho cap must be > 0");
    }
};

/// Class pair whose instances must keep an unobstructed line: no third
/// object may sit inside the corridor spanned by the pair.
struct VisibilityPair {
    int class_a = 0;
    int class_b = 0;
    double weight = 1.0;

    void canonicalize() {
        if (class_a > class_b) std::swap(class_a, class_b);
    }
};

/// Which term families contribute to the total (components are always
/// evaluated; disabled families are just dropped from the sum).
struct TermMask {
    bool pairwise = true;
    bool visibility = true;
    bool wall = true;
    bool pair_angle = true;
};

struct ConstraintSet {
    EnergyWeights weights;
    std::vector<PairwisePrior> pairwise;
    std::vector<WallPrior> wall;
    std::vector<VisibilityPair> visibility;
    TermMask mask;

    void validate() const {
        weights.validate();
        for (const auto& p : pairwise) {
            if (p.class_a > p.class_b)
                throw std::invalid_argument("constraints: pairwise prior not canonical");
            p.validate();
        }
        for (const auto& w : wall) w.validate();
        for (const auto& v : visibility) {
            if (v.class_a > v.class_b)
                throw std::invalid_argument("constraints: visibility pair not canonical");
            if (v.weight < 0.0)
                throw std::invalid_argument("constraints: visibility weight must be >= 0");
        }
    }
};

struct EnergyBreakdown {
    double bbox = 0.0;
    double pairwise = 0.0;
    double visibility = 0.0;
    double wall_distance = 0.0;
    double wall_angle = 0.0;
    double pair_angle = 0.0;
    double total = 0.0;
};

// --- individual terms ------------------------------------------------------

/// max(0, bb - d): hinge on footprint half-diagonal sum vs center distance.
inline double bbox_penalty(const ObjectInstance& a, const ObjectInstance& b) {
    const double bb = obb_half_diagonal(a) + obb_half_diagonal(b);
    return std::max(0.0, bb - center_distance(a, b));
}

/// Piecewise proximity/attraction penalty:
///   (bb/d)^alpha  if d <  bb         (too close)
///   0             if bb <= d <= M    (comfortable band, boundaries included)
///   (d/M)^alpha   if d >  M          (too far)
/// The d -> 0 pole is capped. `smooth` subtracts 1 and clamps at zero to
/// remove the jump at both boundaries.
inline double rho(double d, double bb, double max_distance, double alpha,
                  double cap = 1e6, bool smooth = false) {
    double x;
    if (d < bb) {
        if (d <= 0.0) return cap;
        x = bb / d;
    } else if (d <= max_distance) {
        return 0.0;
    } else {
        x = d / max_distance;
    }
    double v = std::pow(x, alpha);
    if (smooth) v = std::max(0.0, v - 1.0);
    return std::min(v, cap);
}

/// rho for a concrete object pair under its class prior (per-prior weight
/// not applied here).
inline double pairwise_penalty(const ObjectInstance& a, const ObjectInstance& b,
                               const PairwisePrior& prior, double alpha,
                               double cap = 1e6, bool smooth = false) {
    const double bb = obb_half_diagonal(a) + obb_half_diagonal(b);
    return rho(center_distance(a, b), bb, prior.max_distance, alpha, cap, smooth);
}

inline Rect footprint_aabb(const ObjectInstance& obj) {
    const auto corners = footprint_corners(obj.pose.position, obj.half_extents.x(),
                                           obj.half_extents.y(), obj.pose.yaw);
    Rect r{corners[0], corners[0]};
    for (const auto& c : corners) r.expand(c);
    return r;
}

/// Sight corridor between an observer/target pair: the axis-aligned box
/// covering both footprints. Occluders are penalized for entering it.
struct VisibilityTriple {
    std::string observer;
    std::string target;
    Rect corridor;
};

inline VisibilityTriple make_visibility_triple(const ObjectInstance& o,
                                               const ObjectInstance& n) {
    if (o.id == n.id)
        throw std::invalid_argument("visibility triple: observer == target");
    Rect r = footprint_aabb(o);
    const Rect rn = footprint_aabb(n);
    r.expand(rn.min);
    r.expand(rn.max);
    return {o.id, n.id, r};
}

/// weight * max(0, bb - d) with bb = occluder half-diagonal + full corridor
/// diagonal and d = occluder center to corridor center.
inline double visibility_penalty(const VisibilityTriple& triple,
                                 const ObjectInstance& m, double weight = 1.0) {
    if (m.id == triple.observer || m.id == triple.target)
        throw std::invalid_argument("visibility penalty: occluder is part of the pair");
    const double bb = obb_half_diagonal(m) + triple.corridor.diagonal();
    const double d = (m.pose.position - triple.corridor.center()).norm();
    return weight * std::max(0.0, bb - d);
}

/// (distance, angle) squared deviations from the wall prior, unweighted.
/// Distance is center to nearest wall; angle compares object yaw against
/// the wall's inward normal offset by the prior's target angle.
inline std::pair<double, double> wall_penalties(const ObjectInstance& obj,
                                                const RoomShell& room,
                                                const WallPrior& prior) {
    const auto nearest = room.nearest_wall(obj.pose.position);
    const double dd = nearest.distance - prior.target_distance;
    const double wall_yaw = room.walls()[nearest.index].inward_normal_yaw;
    const double da = wrap_angle(obj.pose.yaw - (wall_yaw + prior.target_angle));
    return {dd * dd, da * da};
}

/// Squared wrapped deviation of the relative yaw (a - b) from the prior.
inline double pair_angle_penalty(const ObjectInstance& a, const ObjectInstance& b,
                                 double target_angle) {
    const double d = wrap_angle((a.pose.yaw - b.pose.yaw) - target_angle);
    return d * d;
}

// --- whole-layout evaluation -----------------------------------------------

/// Dense class-pair lookup tables so the annealing inner loop never searches
/// the prior lists.
class CompiledConstraints {
public:
    CompiledConstraints(ConstraintSet set, int num_classes)
        : set_(std::move(set)),
          k_(num_classes),
          pair_idx_(static_cast<std::size_t>(k_) * k_, -1),
          vis_idx_(static_cast<std::size_t>(k_) * k_, -1),
          wall_idx_(k_, -1) {
        set_.validate();
        for (std::size_t i = 0; i < set_.pairwise.size(); ++i) {
            const auto& p = set_.pairwise[i];
            check_class(p.class_a);
            check_class(p.class_b);
            int& slot = pair_idx_[cell(p.class_a, p.class_b)];
            if (slot >= 0)
                throw std::invalid_argument("constraints: duplicate pairwise prior");
            slot = static_cast<int>(i);
            pair_idx_[cell(p.class_b, p.class_a)] = static_cast<int>(i);
        }
        for (std::size_t i = 0; i < set_.visibility.size(); ++i) {
            const auto& v = set_.visibility[i];
            check_class(v.class_a);
            check_class(v.class_b);
            int& slot = vis_idx_[cell(v.class_a, v.class_b)];
            if (slot >= 0)
                throw std::invalid_argument("constraints: duplicate visibility pair");
            slot = static_cast<int>(i);
            vis_idx_[cell(v.class_b, v.class_a)] = static_cast<int>(i);
        }
        for (std::size_t i = 0; i < set_.wall.size(); ++i) {
            const auto& w = set_.wall[i];
            check_class(w.class_id);
            if (wall_idx_[w.class_id] >= 0)
                throw std::invalid_argument("constraints: duplicate wall prior");
            wall_idx_[w.class_id] = static_cast<int>(i);
        }
    }

    const ConstraintSet& set() const { return set_; }
    int num_classes() const { return k_; }

    const PairwisePrior* pair_prior(int ca, int cb) const {
        const int i = pair_idx_[cell(ca, cb)];
        return i < 0 ? nullptr : &set_.pairwise[i];
    }
    const VisibilityPair* vis_pair(int ca, int cb) const {
        const int i = vis_idx_[cell(ca, cb)];
        return i < 0 ? nullptr : &set_.visibility[i];
    }
    const WallPrior* wall_prior(int c) const {
        const int i = wall_idx_[c];
        return i < 0 ? nullptr : &set_.wall[i];
    }

private:
    std::size_t cell(int a, int b) const {
        return static_cast<std::size_t>(a) * k_ + b;
    }
    void check_class(int c) const {
        if (c < 0 || c >= k_)
            throw std::invalid_argument("constraints: class id out of range");
    }

    ConstraintSet set_;
    int k_;
    std::vector<int> pair_idx_;
    std::vector<int> vis_idx_;
    std::vector<int> wall_idx_;
};

/// Sums every enabled term over the full index structure. Components hold
/// raw family sums (per-prior weights folded in); the family scalars of
/// EnergyWeights only enter `total`. Ordered object pairs each count once,
/// so an unordered pair contributes twice to bbox/pairwise/pair-angle;
/// sight corridors count once per protected pair, against every third
/// object. Summation order is fixed for reproducibility.
inline EnergyBreakdown total_energy(const SceneLayout& layout,
                                    const CompiledConstraints& cc) {
    const auto& objs = layout.objects;
    const auto& w = cc.set().weights;
    EnergyBreakdown e;

    for (std::size_t i = 0; i < objs.size(); ++i) {
        const auto& a = objs[i];
        if (a.class_id < 0 || a.class_id >= cc.num_classes())
            throw std::invalid_argument("total energy: object class outside constraint table");
        for (std::size_t j = i + 1; j < objs.size(); ++j) {
            const auto& b = objs[j];
            e.bbox += 2.0 * bbox_penalty(a, b);
            if (const auto* p = cc.pair_prior(a.class_id, b.class_id)) {
                e.pairwise += 2.0 * p->weight *
                              pairwise_penalty(a, b, *p, w.alpha, w.rho_cap, w.smooth_rho);
                if (p->target_angle) {
                    // the prior's angle is stated for (class_a, class_b) order;
                    // both ordered directions contribute
                    const double t_ab = (a.class_id == p->class_a) ? *p->target_angle
                                                                   : -*p->target_angle;
                    const double t_ba = (b.class_id == p->class_a) ? *p->target_angle
                                                                   : -*p->target_angle;
                    e.pair_angle += pair_angle_penalty(a, b, t_ab) +
                                    pair_angle_penalty(b, a, t_ba);
                }
            }
            if (const auto* v = cc.vis_pair(a.class_id, b.class_id)) {
                const VisibilityTriple triple = make_visibility_triple(a, b);
                for (std::size_t k = 0; k < objs.size(); ++k) {
                    if (k == i || k == j) continue;
                    e.visibility += visibility_penalty(triple, objs[k], v->weight);
                }
            }
        }
        if (const auto* wp = cc.wall_prior(a.class_id)) {
            const auto [pd, pa] = wall_penalties(a, layout.room, *wp);
            e.wall_distance += wp->weight_distance * pd;
            e.wall_angle += wp->weight_angle * pa;
        }
    }

    const auto& m = cc.set().mask;
    e.total = w.bbox * e.bbox;
    if (m.pairwise) e.total += e.pairwise;
    if (m.visibility) e.total += w.visibility * e.visibility;
    if (m.wall) e.total += e.wall_distance + e.wall_angle;
    if (m.pair_angle) e.total += w.pair_angle * e.pair_angle;
    return e;
}

inline int required_classes(const SceneLayout& layout, const ConstraintSet& set) {
    int k = 0;
    for (const auto& o : layout.objects) k = std::max(k, o.class_id + 1);
    for (const auto& p : set.pairwise) k = std::max({k, p.class_a + 1, p.class_b + 1});
    for (const auto& v : set.visibility) k = std::max({k, v.class_a + 1, v.class_b + 1});
    for (const auto& p : set.wall) k = std::max(k, p.class_id + 1);
    return std::max(k, 1);
}

inline EnergyBreakdown total_energy(const SceneLayout& layout,
                                    const ConstraintSet& set) {
    return total_energy(layout, CompiledConstraints(set, required_classes(layout, set)));
}

}  // namespace scenesynth
