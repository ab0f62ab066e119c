#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace scenesynth;
using testsupport::make_object;
using testsupport::oracle_total_energy;

namespace {
// half extents chosen so the footprint half diagonal is exactly 1
const double kUnitDiag = 1.0 / std::sqrt(2.0);
}  // namespace

TEST_CASE("bbox hinge on overlapping footprint spheres", "[energy]") {
    const auto a = make_object("a", 0, kUnitDiag, kUnitDiag, 0.5, 0.0, 0.0);
    auto b = make_object("b", 1, kUnitDiag, kUnitDiag, 0.5, 3.0, 0.0);
    REQUIRE(bbox_penalty(a, b) == 0.0);  // d=3 beyond bb=2
    b.pose.position = Vec2(1.0, 0.0);
    REQUIRE(bbox_penalty(a, b) == Catch::Approx(1.0));  // 2 - 1
    b.pose.position = Vec2(0.0, 0.0);
    REQUIRE(bbox_penalty(a, b) == Catch::Approx(2.0));  // coincident
    // symmetric in its arguments
    REQUIRE(bbox_penalty(a, b) == bbox_penalty(b, a));
    // exact touch is penalty-free
    b.pose.position = Vec2(2.0, 0.0);
    REQUIRE(bbox_penalty(a, b) == 0.0);
}

TEST_CASE("proximity penalty branches", "[energy]") {
    const double bb = 1.0, M = 2.0, alpha = 2.0;
    SECTION("too close, comfortable, too far") {
        REQUIRE(rho(0.5, bb, M, alpha) == Catch::Approx(4.0));
        REQUIRE(rho(1.5, bb, M, alpha) == 0.0);
        REQUIRE(rho(4.0, bb, M, alpha) == Catch::Approx(4.0));
    }
    SECTION("band boundaries are inclusive") {
        REQUIRE(rho(bb, bb, M, alpha) == 0.0);
        REQUIRE(rho(M, bb, M, alpha) == 0.0);
    }
    SECTION("middle branch is identically zero") {
        for (int i = 0; i <= 1000; ++i) {
            const double d = bb + (M - bb) * i / 1000.0;
            REQUIRE(rho(d, bb, M, alpha) == 0.0);
        }
    }
    SECTION("the pole at zero distance is capped") {
        REQUIRE(rho(0.0, bb, M, alpha, 123.0) == 123.0);
        REQUIRE(rho(-1.0, bb, M, alpha, 123.0) == 123.0);
        REQUIRE(rho(1e-9, bb, M, alpha, 50.0) == 50.0);  // capped blowup
    }
    SECTION("higher exponent penalizes harder") {
        REQUIRE(rho(4.0, bb, M, 3.0) == Catch::Approx(8.0));
    }
    SECTION("smooth variant removes the boundary jumps") {
        REQUIRE(rho(0.5, bb, M, alpha, 1e6, true) == Catch::Approx(3.0));
        // just inside each penalized branch the smooth value vanishes
        REQUIRE(rho(bb - 1e-8, bb, M, alpha, 1e6, true) ==
                Catch::Approx(0.0).margin(1e-6));
        REQUIRE(rho(M + 1e-8, bb, M, alpha, 1e6, true) ==
                Catch::Approx(0.0).margin(1e-6));
        REQUIRE(rho(1.5, bb, M, alpha, 1e6, true) == 0.0);
    }
}

TEST_CASE("pairwise penalty uses footprint diagonals and the prior reach", "[energy]") {
    const auto a = make_object("a", 0, kUnitDiag, kUnitDiag, 0.5, 0.0, 0.0);
    const auto b = make_object("b", 1, kUnitDiag, kUnitDiag, 0.5, 4.0, 0.0);
    PairwisePrior prior;
    prior.class_a = 0;
    prior.class_b = 1;
    prior.max_distance = 2.0;
    // bb = 2, d = 4 -> (4/2)^2
    REQUIRE(pairwise_penalty(a, b, prior, 2.0) == Catch::Approx(4.0));
}

TEST_CASE("sight corridor penalty", "[energy]") {
    // corridor spanning [-0.5, sqrt(15)-0.5] x [-0.5, 0.5]: diagonal exactly 4
    const double reach = std::sqrt(15.0) - 1.0;
    const auto o = make_object("sofa", 0, 0.5, 0.5, 0.5, 0.0, 0.0);
    const auto n = make_object("tv", 1, 0.5, 0.5, 0.5, reach, 0.0);
    const auto triple = make_visibility_triple(o, n);
    REQUIRE(triple.corridor.diagonal() == Catch::Approx(4.0));

    SECTION("occluder at the corridor center pays half diagonal plus diagonal") {
        const auto m = make_object("chair", 2, kUnitDiag, kUnitDiag, 0.5,
                                   triple.corridor.center().x(),
                                   triple.corridor.center().y());
        REQUIRE(visibility_penalty(triple, m, 1.0) == Catch::Approx(5.0));
        REQUIRE(visibility_penalty(triple, m, 0.25) == Catch::Approx(1.25));
    }
    SECTION("distant occluders pay nothing") {
        const auto m = make_object("chair", 2, kUnitDiag, kUnitDiag, 0.5, 50.0, 0.0);
        REQUIRE(visibility_penalty(triple, m) == 0.0);
    }
    SECTION("the pair itself cannot occlude") {
        REQUIRE_THROWS_AS(visibility_penalty(triple, o), std::invalid_argument);
        REQUIRE_THROWS_AS(make_visibility_triple(o, o), std::invalid_argument);
    }
}

TEST_CASE("wall prior penalties", "[energy]") {
    const RoomShell room(4.0, 4.0, 2.5);
    WallPrior prior;
    prior.class_id = 0;
    prior.target_distance = 0.4;
    prior.target_angle = 0.0;

    SECTION("exact prior pose costs nothing") {
        const auto obj = make_object("w", 0, .3, .3, .5, 0.4, 2.0, 0.0);
        const auto [pd, pa] = wall_penalties(obj, room, prior);
        REQUIRE(pd == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(pa == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("distance deviation squares") {
        const auto obj = make_object("w", 0, .3, .3, .5, 1.0, 2.0, 0.0);
        const auto [pd, pa] = wall_penalties(obj, room, prior);
        REQUIRE(pd == Catch::Approx(0.36));
        REQUIRE(pa == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("angle deviation squares against the inward normal") {
        const auto obj = make_object("w", 0, .3, .3, .5, 0.4, 2.0, M_PI / 2.0);
        const auto [pd, pa] = wall_penalties(obj, room, prior);
        REQUIRE(pa == Catch::Approx(M_PI * M_PI / 4.0));
    }
    SECTION("prior angle offsets the preferred yaw") {
        WallPrior tilted = prior;
        tilted.target_angle = M_PI / 4.0;
        const auto obj = make_object("w", 0, .3, .3, .5, 0.4, 2.0, M_PI / 4.0);
        const auto [pd, pa] = wall_penalties(obj, room, tilted);
        REQUIRE(pa == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("relative yaw penalty wraps", "[energy]") {
    auto a = make_object("a", 0, .5, .5, .5, 0, 0, 0.3);
    auto b = make_object("b", 1, .5, .5, .5, 1, 1, 0.3);
    REQUIRE(pair_angle_penalty(a, b, 0.0) == 0.0);

    // yaws stored wrapped: a - b = -pi + 0.1 - (pi - 0.1) wraps to 0.2
    a.pose.set_yaw(-M_PI + 0.1);
    b.pose.set_yaw(M_PI - 0.1);
    REQUIRE(pair_angle_penalty(a, b, 0.0) == Catch::Approx(0.04));

    // opposite prior at zero relative yaw: wrap(-pi) squared
    a.pose.set_yaw(0.0);
    b.pose.set_yaw(0.0);
    REQUIRE(pair_angle_penalty(a, b, M_PI) == Catch::Approx(M_PI * M_PI));
}

TEST_CASE("whole-layout energy on hand-checked scenes", "[energy]") {
    SECTION("no objects, no energy") {
        SceneLayout layout;
        const auto e = total_energy(layout, ConstraintSet{});
        REQUIRE(e.total == 0.0);
        REQUIRE(e.bbox == 0.0);
    }
    SECTION("single unconstrained object") {
        SceneLayout layout;
        layout.objects = {make_object("a", 0, .5, .5, .5, 2.0, 2.0)};
        const auto e = total_energy(layout, ConstraintSet{});
        REQUIRE(e.total == 0.0);
    }
    SECTION("two objects, every family by hand") {
        SceneLayout layout;
        layout.room = RoomShell(6.0, 6.0, 2.5);
        layout.objects = {
            make_object("bed", 0, kUnitDiag, kUnitDiag, .3, 1.0, 3.0, 0.0),
            make_object("stand", 1, kUnitDiag, kUnitDiag, .3, 2.5, 3.0, 0.5),
        };
        ConstraintSet set;
        PairwisePrior p;
        p.class_a = 0;
        p.class_b = 1;
        p.max_distance = 1.2;
        p.target_angle = 0.2;
        p.weight = 3.0;
        set.pairwise = {p};
        WallPrior wp;
        wp.class_id = 0;
        wp.target_distance = 0.4;
        wp.weight_distance = 2.0;
        wp.weight_angle = 0.5;
        set.wall = {wp};

        const auto e = total_energy(layout, set);
        // d = 1.5, bb = 2: overlap hinge 0.5, both ordered directions
        REQUIRE(e.bbox == Catch::Approx(2.0 * 0.5));
        // rho: d < bb -> (2/1.5)^2, per-prior weight 3, twice
        REQUIRE(e.pairwise == Catch::Approx(2.0 * 3.0 * std::pow(2.0 / 1.5, 2.0)));
        // relative yaw -0.5 vs sign-corrected target 0.2: (-0.7)^2 per direction
        REQUIRE(e.pair_angle == Catch::Approx(2.0 * 0.49));
        // bed sits 1m from the x=min wall, yaw matches the inward normal
        REQUIRE(e.wall_distance == Catch::Approx(2.0 * 0.36));
        REQUIRE(e.wall_angle == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(e.visibility == 0.0);
        const double expected_total = set.weights.bbox * e.bbox + e.pairwise +
                                      set.weights.visibility * e.visibility +
                                      e.wall_distance + e.wall_angle +
                                      set.weights.pair_angle * e.pair_angle;
        REQUIRE(e.total == Catch::Approx(expected_total).epsilon(1e-12));
    }
}

TEST_CASE("disabled families stay evaluated but leave the total", "[energy]") {
    Rng rng(77);
    auto [layout, set] = testsupport::make_random_scene(rng);
    set.mask = TermMask{};  // all enabled
    const auto full = total_energy(layout, set);

    ConstraintSet masked = set;
    masked.mask.pairwise = false;
    masked.mask.visibility = false;
    masked.mask.wall = false;
    masked.mask.pair_angle = false;
    const auto e = total_energy(layout, masked);
    REQUIRE(e.pairwise == full.pairwise);
    REQUIRE(e.visibility == full.visibility);
    REQUIRE(e.wall_distance == full.wall_distance);
    REQUIRE(e.wall_angle == full.wall_angle);
    REQUIRE(e.pair_angle == full.pair_angle);
    REQUIRE(e.total == Catch::Approx(set.weights.bbox * e.bbox).epsilon(1e-12));
}

TEST_CASE("energy is invariant under rigid translation", "[energy]") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto [layout, set] = testsupport::make_random_scene(rng);
        const auto before = total_energy(layout, set);
        SceneLayout moved = layout;
        const Vec2 delta(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
        moved.room.origin += delta;
        for (auto& o : moved.objects) o.pose.position += delta;
        const auto after = total_energy(moved, set);
        REQUIRE(testsupport::breakdown_rel_diff(before, after) < 1e-9);
    }
}

TEST_CASE("optimized evaluation matches the brute-force oracle", "[energy]") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        auto [layout, set] = testsupport::make_random_scene(rng);
        const auto fast = total_energy(layout, set);
        const auto slow = oracle_total_energy(layout, set);
        INFO("trial " << trial);
        REQUIRE(testsupport::breakdown_rel_diff(fast, slow) < 1e-9);
    }
}

TEST_CASE("compiled constraints reject malformed sets", "[energy]") {
    SECTION("duplicate pairwise prior") {
        ConstraintSet set;
        PairwisePrior p;
        p.class_a = 1;
        p.class_b = 2;
        set.pairwise = {p, p};
        REQUIRE_THROWS_AS(CompiledConstraints(set, 4), std::invalid_argument);
    }
    SECTION("duplicate visibility pair") {
        ConstraintSet set;
        VisibilityPair v;
        v.class_a = 0;
        v.class_b = 1;
        set.visibility = {v, v};
        REQUIRE_THROWS_AS(CompiledConstraints(set, 4), std::invalid_argument);
    }
    SECTION("duplicate wall prior") {
        ConstraintSet set;
        WallPrior w;
        w.class_id = 1;
        set.wall = {w, w};
        REQUIRE_THROWS_AS(CompiledConstraints(set, 4), std::invalid_argument);
    }
    SECTION("class id outside the table") {
        ConstraintSet set;
        PairwisePrior p;
        p.class_a = 1;
        p.class_b = 9;
        set.pairwise = {p};
        REQUIRE_THROWS_AS(CompiledConstraints(set, 4), std::invalid_argument);
    }
    SECTION("non-canonical order") {
        ConstraintSet set;
        PairwisePrior p;
        p.class_a = 2;
        p.class_b = 1;
        set.pairwise = {p};
        REQUIRE_THROWS_AS(CompiledConstraints(set, 4), std::invalid_argument);
    }
    SECTION("object class outside the table") {
        SceneLayout layout;
        layout.objects = {make_object("a", 7, .5, .5, .5, 0, 0)};
        const CompiledConstraints cc(ConstraintSet{}, 3);
        REQUIRE_THROWS_AS(total_energy(layout, cc), std::invalid_argument);
    }
}

TEST_CASE("energy weight validation", "[energy]") {
    EnergyWeights w;
    REQUIRE_NOTHROW(w.validate());
    w.alpha = 0.5;
    REQUIRE_THROWS_AS(w.validate(), std::invalid_argument);
    w.alpha = 2.0;
    w.bbox = -1.0;
    REQUIRE_THROWS_AS(w.validate(), std::invalid_argument);
    w.bbox = 10.0;
    w.rho_cap = 0.0;
    REQUIRE_THROWS_AS(w.validate(), std::invalid_argument);
}
