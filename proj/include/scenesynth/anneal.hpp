#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scenesynth/energy.hpp"
#include "scenesynth/rng.hpp"
#include "scenesynth/scene.hpp"

namespace scenesynth {

struct AnnealSchedule {
    double initial_temperature = 0.0;  // <= 0: calibrate from 100 unit-scale probes
    double cooling_factor = 0.95;
    int steps_per_temperature = 100;
    double min_temperature = 1e-4;
    long long max_iterations = 20000;
    double translate_scale = 1.0;          // move sigma in meters at T = T0
    double rotate_scale = M_PI / 2.0;      // move sigma in radians at T = T0
    bool snap_yaw_90 = false;
    double feasibility_bound = 0.0;        // final bbox component must not exceed this

    void validate() const {
        if (!(cooling_factor > 0.0 && cooling_factor < 1.0))
            throw std::invalid_argument("schedule: cooling factor must be in (0,1)");
        if (steps_per_temperature < 1 || max_iterations < 1)
            throw std::invalid_argument("schedule: counts must be positive");
        if (!(min_temperature > 0.0))
            throw std::invalid_argument("schedule: min temperature must be > 0");
        if (translate_scale < 0.0 || rotate_scale < 0.0)
            throw std::invalid_argument("schedule: move scales must be >= 0");
    }
};

struct MoveProposal {
    enum class Kind { translate, rotate, swap_positions };
    Kind kind = Kind::translate;
    int target = -1;  // object index, or group index in the rigid phase
    Vec2 delta{0.0, 0.0};
    double dtheta = 0.0;
    int swap_with = -1;
};

struct AnnealResult {
    SceneLayout best_layout;
    EnergyBreakdown best_energy;
    std::vector<std::pair<long long, double>> trace;  // (iteration, accepted total)
    std::uint64_t seed = 0;
    bool feasible = true;
};

/// Metropolis rule: downhill always, uphill with probability exp(-dE/T).
/// Draws exactly one uniform for an uphill proposal.
inline bool metropolis_accept(double delta_e, double temperature, Rng& rng) {
    if (delta_e <= 0.0) return true;
    if (temperature <= 0.0) return false;
    return rng.uniform() < std::exp(-delta_e / temperature);
}

/// Uniformly random poses inside the floor rectangle (the no-constraint
/// baseline initialization).
inline SceneLayout scatter_layout(const SceneLayout& layout, std::uint64_t seed) {
    SceneLayout out = layout;
    Rng rng(mix_seed(seed, 0x5ca77e));
    const Rect floor = out.room.floor_rect();
    for (auto& obj : out.objects) {
        obj.pose.position.x() = rng.uniform(floor.min.x(), floor.max.x());
        obj.pose.position.y() = rng.uniform(floor.min.y(), floor.max.y());
        obj.pose.set_yaw(rng.uniform(-M_PI, M_PI));
    }
    return out;
}

namespace detail {

inline Vec2 clamp_to_rect(const Vec2& p, const Rect& r) {
    return {std::clamp(p.x(), r.min.x(), r.max.x()),
            std::clamp(p.y(), r.min.y(), r.max.y())};
}

inline double maybe_snap(double yaw, bool snap) {
    if (!snap) return wrap_angle(yaw);
    const double q = M_PI / 2.0;
    return wrap_angle(std::round(yaw / q) * q);
}

struct SavedPose {
    int index;
    Pose2D pose;
};

/// Draws and applies one single-object move; fills `undo` with the poses it
/// replaced. Draw order is fixed: kind, target(s), then magnitudes.
inline void propose_object_move(SceneLayout& layout, Rng& rng, double sigma_xy,
                                double sigma_theta, bool snap,
                                std::vector<SavedPose>& undo) {
    undo.clear();
    const int n = static_cast<int>(layout.objects.size());
    const Rect floor = layout.room.floor_rect();
    const double r = rng.uniform();
    int kind = r < 0.6 ? 0 : (r < 0.9 ? 1 : 2);
    if (kind == 2 && n < 2) kind = 0;

    if (kind == 2) {
        const int i = rng.uniform_int(0, n - 1);
        int j = rng.uniform_int(0, n - 2);
        if (j >= i) ++j;
        undo.push_back({i, layout.objects[i].pose});
        undo.push_back({j, layout.objects[j].pose});
        std::swap(layout.objects[i].pose.position, layout.objects[j].pose.position);
        return;
    }
    const int i = rng.uniform_int(0, n - 1);
    undo.push_back({i, layout.objects[i].pose});
    auto& pose = layout.objects[i].pose;
    if (kind == 0) {
        const Vec2 d(rng.normal() * sigma_xy, rng.normal() * sigma_xy);
        pose.position = clamp_to_rect(pose.position + d, floor);
    } else {
        pose.yaw = maybe_snap(pose.yaw + rng.normal() * sigma_theta, snap);
    }
}

/// Draws and applies one rigid-group move (translate / rotate about the
/// group centroid / swap group centroids). Returns false when the move
/// would push a member's center outside the floor rectangle (rotations and
/// swaps are rejected outright; translations are clamped to stay inside).
inline bool propose_group_move(SceneLayout& layout,
                               const std::vector<std::vector<int>>& groups,
                               Rng& rng, double sigma_xy, double sigma_theta,
                               bool snap, std::vector<SavedPose>& undo) {
    undo.clear();
    const int g_count = static_cast<int>(groups.size());
    const Rect floor = layout.room.floor_rect();
    const double r = rng.uniform();
    int kind = r < 0.6 ? 0 : (r < 0.9 ? 1 : 2);
    if (kind == 2 && g_count < 2) kind = 0;

    auto centroid = [&](const std::vector<int>& g) {
        Vec2 c(0.0, 0.0);
        for (const int i : g) c += layout.objects[i].pose.position;
        return Vec2(c / static_cast<double>(g.size()));
    };
    auto save = [&](const std::vector<int>& g) {
        for (const int i : g) undo.push_back({i, layout.objects[i].pose});
    };
    auto translate_inside = [&](const std::vector<int>& g, const Vec2& want) {
        // shrink the translation so every member center stays on the floor
        Vec2 d = want;
        for (const int i : g) {
            const Vec2& p = layout.objects[i].pose.position;
            d.x() = std::clamp(d.x(), floor.min.x() - p.x(), floor.max.x() - p.x());
            d.y() = std::clamp(d.y(), floor.min.y() - p.y(), floor.max.y() - p.y());
        }
        for (const int i : g) layout.objects[i].pose.position += d;
    };

    if (kind == 0) {
        const int gi = rng.uniform_int(0, g_count - 1);
        const Vec2 d(rng.normal() * sigma_xy, rng.normal() * sigma_xy);
        save(groups[gi]);
        translate_inside(groups[gi], d);
        return true;
    }
    if (kind == 1) {
        const int gi = rng.uniform_int(0, g_count - 1);
        const double dth = rng.normal() * sigma_theta;
        const Vec2 c = centroid(groups[gi]);
        const double cs = std::cos(dth), sn = std::sin(dth);
        save(groups[gi]);
        for (const int i : groups[gi]) {
            auto& pose = layout.objects[i].pose;
            const Vec2 d = pose.position - c;
            pose.position = c + Vec2(cs * d.x() - sn * d.y(), sn * d.x() + cs * d.y());
            pose.yaw = maybe_snap(pose.yaw + dth, snap);
            if (!floor.contains(pose.position)) {
                for (const auto& s : undo) layout.objects[s.index].pose = s.pose;
                return false;
            }
        }
        return true;
    }
    const int gi = rng.uniform_int(0, g_count - 1);
    int gj = rng.uniform_int(0, g_count - 2);
    if (gj >= gi) ++gj;
    const Vec2 ci = centroid(groups[gi]);
    const Vec2 cj = centroid(groups[gj]);
    save(groups[gi]);
    save(groups[gj]);
    for (const int i : groups[gi]) layout.objects[i].pose.position += cj - ci;
    for (const int i : groups[gj]) layout.objects[i].pose.position += ci - cj;
    for (const auto& s : undo)
        if (!floor.contains(layout.objects[s.index].pose.position)) {
            for (const auto& u : undo) layout.objects[u.index].pose = u.pose;
            return false;
        }
    return true;
}

/// Shared cooling loop. `groups` selects the rigid-group move set; null
/// means single-object moves. The trace appends accepted energies offset
/// by `iter_base`, and the chain's best state is written back into
/// `layout` / returned.
struct ChainOutcome {
    EnergyBreakdown best;
    long long iterations = 0;
};

inline ChainOutcome run_chain(SceneLayout& layout, const CompiledConstraints& cc,
                              const AnnealSchedule& sched, Rng& rng,
                              const std::vector<std::vector<int>>* groups,
                              long long iter_base,
                              std::vector<std::pair<long long, double>>& trace) {
    EnergyBreakdown current = total_energy(layout, cc);
    SceneLayout best_layout = layout;
    EnergyBreakdown best = current;
    trace.emplace_back(iter_base, current.total);

    std::vector<SavedPose> undo;
    auto propose = [&](double sxy, double sth) {
        if (groups)
            return propose_group_move(layout, *groups, rng, sxy, sth,
                                      sched.snap_yaw_90, undo);
        propose_object_move(layout, rng, sxy, sth, sched.snap_yaw_90, undo);
        return true;
    };

    double t0 = sched.initial_temperature;
    if (t0 <= 0.0) {
        // calibrate: stddev of the energy over unit-scale probes of the start
        constexpr int kProbes = 100;
        double sum = 0.0, sum2 = 0.0;
        for (int p = 0; p < kProbes; ++p) {
            const bool applied = propose(sched.translate_scale, sched.rotate_scale);
            const double e = applied ? total_energy(layout, cc).total : current.total;
            for (auto it = undo.rbegin(); it != undo.rend(); ++it)
                layout.objects[it->index].pose = it->pose;
            sum += e;
            sum2 += e * e;
        }
        const double mean = sum / kProbes;
        t0 = std::sqrt(std::max(0.0, sum2 / kProbes - mean * mean));
        if (!(t0 > 0.0)) t0 = 1.0;
    }

    double t = t0;
    long long iter = 0;
    while (t > sched.min_temperature && iter < sched.max_iterations) {
        for (int s = 0; s < sched.steps_per_temperature && iter < sched.max_iterations;
             ++s, ++iter) {
            const double scale = t / t0;
            const bool applied =
                propose(sched.translate_scale * std::sqrt(scale),
                        sched.rotate_scale * scale);
            if (!applied) continue;
            const EnergyBreakdown next = total_energy(layout, cc);
            if (metropolis_accept(next.total - current.total, t, rng)) {
                current = next;
                trace.emplace_back(iter_base + iter + 1, current.total);
                if (current.total < best.total) {
                    best = current;
                    best_layout = layout;
                }
            } else {
                for (auto it = undo.rbegin(); it != undo.rend(); ++it)
                    layout.objects[it->index].pose = it->pose;
            }
        }
        t *= sched.cooling_factor;
    }

    layout = std::move(best_layout);
    return {best, iter};
}

inline void clamp_layout(SceneLayout& layout) {
    const Rect floor = layout.room.floor_rect();
    for (auto& o : layout.objects) {
        o.pose.position = clamp_to_rect(o.pose.position, floor);
        o.pose.set_yaw(o.pose.yaw);
    }
}

}  // namespace detail

/// Single-chain simulated annealing over all object poses, starting from the
/// given layout. Deterministic in (layout, constraints, schedule, seed).
inline AnnealResult anneal(const SceneLayout& layout, const ConstraintSet& constraints,
                           const AnnealSchedule& schedule, std::uint64_t seed) {
    schedule.validate();
    layout.validate();
    const CompiledConstraints cc(constraints, required_classes(layout, constraints));

    AnnealResult result;
    result.seed = seed;
    SceneLayout work = layout;
    detail::clamp_layout(work);
    Rng rng(mix_seed(seed, 1));
    const auto outcome =
        detail::run_chain(work, cc, schedule, rng, nullptr, 0, result.trace);
    result.best_layout = std::move(work);
    result.best_energy = outcome.best;
    result.feasible = result.best_energy.bbox <= schedule.feasibility_bound;
    return result;
}

/// Two-phase annealing: each group's internal arrangement first (only the
/// group's own objects and the room in play), then whole groups as rigid
/// bodies. The iteration budget matches a flat run: nine tenths spread across
/// the per-group chains, one tenth for the rigid phase, which only explores
/// three degrees of freedom per group. A single all-object group degenerates
/// to plain annealing.
inline AnnealResult anneal_hierarchical(const SceneLayout& layout,
                                        const ConstraintSet& constraints,
                                        const AnnealSchedule& schedule,
                                        std::uint64_t seed) {
    schedule.validate();
    layout.validate();
    const auto groups = layout.group_indices();
    if (groups.size() <= 1) return anneal(layout, constraints, schedule, seed);

    const CompiledConstraints cc(constraints, required_classes(layout, constraints));
    const auto g_count = static_cast<long long>(groups.size());

    AnnealResult result;
    result.seed = seed;
    SceneLayout work = layout;
    detail::clamp_layout(work);

    // proposals per level scale with each phase's budget so every chain walks
    // the same temperature ladder (level count) as a flat run would
    AnnealSchedule intra = schedule;
    intra.steps_per_temperature = static_cast<int>(std::max<long long>(
        1, 9LL * schedule.steps_per_temperature / (10 * g_count)));
    intra.max_iterations =
        std::max<long long>(1, 9LL * schedule.max_iterations / (10 * g_count));

    long long iter_base = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        SceneLayout sub;
        sub.room = work.room;
        for (const int i : groups[g]) sub.objects.push_back(work.objects[i]);
        Rng rng(mix_seed(seed, 101 + g));
        const auto outcome =
            detail::run_chain(sub, cc, intra, rng, nullptr, iter_base, result.trace);
        iter_base += outcome.iterations;
        for (std::size_t k = 0; k < groups[g].size(); ++k)
            work.objects[groups[g][k]].pose = sub.objects[k].pose;
    }

    AnnealSchedule rigid = schedule;
    rigid.steps_per_temperature = std::max(1, schedule.steps_per_temperature / 10);
    rigid.max_iterations = std::max<long long>(1, schedule.max_iterations / 10);
    Rng rng(mix_seed(seed, 2));
    const auto outcome =
        detail::run_chain(work, cc, rigid, rng, &groups, iter_base, result.trace);

    result.best_layout = std::move(work);
    result.best_energy = outcome.best;
    result.feasible = result.best_energy.bbox <= schedule.feasibility_bound;
    return result;
}

/// Anneal with the named term families removed from the objective. The
/// returned breakdown still carries every family's evaluated value.
inline AnnealResult ablate(const SceneLayout& layout, const ConstraintSet& constraints,
                           const AnnealSchedule& schedule, std::uint64_t seed,
                           const std::set<std::string>& disabled_terms) {
    ConstraintSet c = constraints;
    for (const auto& term : disabled_terms) {
        if (term == "pairwise") c.mask.pairwise = false;
        else if (term == "visibility") c.mask.visibility = false;
        else if (term == "wall") c.mask.wall = false;
        else if (term == "pair-angle" || term == "pair_angle") c.mask.pair_angle = false;
        else throw std::invalid_argument("ablate: unknown term '" + term + "'");
    }
    return anneal(layout, c, schedule, seed);
}

}  // namespace scenesynth
