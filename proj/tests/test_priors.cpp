#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace scenesynth;
using testsupport::make_object;

namespace {

SceneLayout layout_with(const std::vector<std::pair<int, Vec2>>& placed) {
    SceneLayout l;
    l.room = RoomShell(10.0, 10.0, 2.5);
    int i = 0;
    for (const auto& [cls, pos] : placed)
        l.objects.push_back(
            make_object("o" + std::to_string(i++), cls, .4, .4, .4, pos.x(), pos.y()));
    return l;
}

}  // namespace

TEST_CASE("linear percentile", "[priors]") {
    REQUIRE(percentile({5.0}, 0.9) == Catch::Approx(5.0));
    std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    REQUIRE(percentile(v, 0.9) == Catch::Approx(9.1));
    REQUIRE(percentile(v, 0.0) == Catch::Approx(1.0));
    REQUIRE(percentile(v, 1.0) == Catch::Approx(10.0));
    REQUIRE(percentile(v, 0.5) == Catch::Approx(5.5));
    // order of input is irrelevant
    std::vector<double> shuffled{10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
    REQUIRE(percentile(shuffled, 0.9) == Catch::Approx(9.1));
    REQUIRE_THROWS_AS(percentile({}, 0.5), std::invalid_argument);
}

TEST_CASE("co-occurrence counts layouts, not instances", "[priors]") {
    const int bed = 1, stand = 2, table = 3;
    SECTION("single layout with one pair") {
        const auto m = cooccurrence_from_layouts(
            {layout_with({{bed, {1, 1}}, {stand, {2, 2}}})}, 4);
        REQUIRE(m.at(bed, stand) == 1);
        REQUIRE(m.at(stand, bed) == 1);
        REQUIRE(m.at(bed, bed) == 0);
        REQUIRE(m.at(bed, table) == 0);
    }
    SECTION("lonely class leaves the off-diagonal empty") {
        const auto m = cooccurrence_from_layouts({layout_with({{bed, {1, 1}}})}, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) REQUIRE(m.at(i, j) == 0);
    }
    SECTION("two layouts accumulate") {
        const auto m = cooccurrence_from_layouts(
            {layout_with({{bed, {1, 1}}, {table, {3, 3}}}),
             layout_with({{bed, {2, 2}}, {table, {4, 4}}})},
            4);
        REQUIRE(m.at(bed, table) == 2);
        REQUIRE(m.at(table, bed) == 2);
    }
    SECTION("diagonal needs two instances of the class") {
        const auto one = cooccurrence_from_layouts(
            {layout_with({{stand, {1, 1}}})}, 4);
        REQUIRE(one.at(stand, stand) == 0);
        const auto two = cooccurrence_from_layouts(
            {layout_with({{stand, {1, 1}}, {stand, {3, 3}}})}, 4);
        REQUIRE(two.at(stand, stand) == 1);
    }
    SECTION("multiple instances still count the layout once") {
        const auto m = cooccurrence_from_layouts(
            {layout_with({{bed, {1, 1}}, {stand, {2, 2}}, {stand, {3, 3}}})}, 4);
        REQUIRE(m.at(bed, stand) == 1);
    }
    SECTION("matrix is symmetric") {
        Rng rng(5);
        std::vector<SceneLayout> layouts;
        for (int i = 0; i < 8; ++i) {
            std::vector<std::pair<int, Vec2>> placed;
            const int n = rng.uniform_int(1, 6);
            for (int j = 0; j < n; ++j)
                placed.push_back({rng.uniform_int(0, 5),
                                  Vec2(rng.uniform(0, 9), rng.uniform(0, 9))});
            layouts.push_back(layout_with(placed));
        }
        const auto m = cooccurrence_from_layouts(layouts, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) REQUIRE(m.at(i, j) == m.at(j, i));
    }
    SECTION("empty corpus and bad class ids are rejected") {
        REQUIRE_THROWS_AS(cooccurrence_from_layouts({}, 4), std::invalid_argument);
        REQUIRE_THROWS_AS(
            cooccurrence_from_layouts({layout_with({{7, {1, 1}}})}, 4),
            std::invalid_argument);
    }
}

TEST_CASE("row normalization of co-occurrence", "[priors]") {
    CoOccurrenceMatrix m(3);
    m.at(1, 0) = 1;
    m.at(1, 2) = 3;
    const auto rows = m.row_normalized();
    REQUIRE(rows[1][0] == Catch::Approx(0.25));
    REQUIRE(rows[1][2] == Catch::Approx(0.75));
    // empty rows stay zero
    REQUIRE(rows[0][0] == 0.0);
    REQUIRE(rows[2][1] == 0.0);
}

TEST_CASE("pairwise priors from a corpus", "[priors]") {
    const int bed = 1, stand = 2, table = 3;
    std::vector<SceneLayout> layouts;
    // bed-stand appears in 3 layouts at distances 1..3; bed-table only once
    layouts.push_back(layout_with({{bed, {0, 0}}, {stand, {1, 0}}}));
    layouts.push_back(layout_with({{bed, {0, 0}}, {stand, {2, 0}}}));
    layouts.push_back(
        layout_with({{bed, {0, 0}}, {stand, {3, 0}}, {table, {0, 4}}}));

    const auto priors = pairwise_priors_from_layouts(layouts, 4, 2);
    REQUIRE(priors.size() == 1);
    REQUIRE(priors[0].class_a == bed);
    REQUIRE(priors[0].class_b == stand);
    // 90th percentile of {1, 2, 3}
    REQUIRE(priors[0].max_distance == Catch::Approx(percentile({1, 2, 3}, 0.9)));

    // with support 1 the lone pairs appear too (bed-table and stand-table
    // both co-occur once, in the third layout)
    const auto all = pairwise_priors_from_layouts(layouts, 4, 1);
    REQUIRE(all.size() == 3);
    REQUIRE_THROWS_AS(pairwise_priors_from_layouts(layouts, 4, 0),
                      std::invalid_argument);
}

TEST_CASE("class frequency over label frames", "[priors]") {
    SECTION("single class fills everything") {
        LabelFrame f(4, 4, 2);
        const auto freq = class_frequency({f}, 3, 0);
        REQUIRE(freq[2] == Catch::Approx(1.0));
        REQUIRE(freq[0] == 0.0);
        REQUIRE(freq[1] == 0.0);
    }
    SECTION("background pixels are excluded") {
        LabelFrame f(2, 2, 0);
        f.at(0, 0) = 1;
        f.at(1, 0) = 2;
        const auto freq = class_frequency({f}, 3, 0);
        REQUIRE(freq[1] == Catch::Approx(0.5));
        REQUIRE(freq[2] == Catch::Approx(0.5));
    }
    SECTION("multiple frames pool their pixels") {
        LabelFrame a(2, 1, 1);                 // 2 px of class 1
        LabelFrame b(2, 1, 2);                 // 2 px of class 2
        b.at(0, 0) = 1;                        // now 3 of class 1, 1 of class 2
        const auto freq = class_frequency({a, b}, 3, 0);
        REQUIRE(freq[1] == Catch::Approx(0.75));
        REQUIRE(freq[2] == Catch::Approx(0.25));
    }
    SECTION("proportions sum to one") {
        Rng rng(3);
        LabelFrame f(16, 16, 0);
        for (auto& px : f.data) px = static_cast<std::uint8_t>(rng.uniform_int(0, 4));
        const auto freq = class_frequency({f}, 5, 0);
        double sum = 0.0;
        for (double v : freq) sum += v;
        REQUIRE(sum == Catch::Approx(1.0));
    }
    SECTION("all-background input is an error") {
        LabelFrame f(4, 4, 0);
        REQUIRE_THROWS_AS(class_frequency({f}, 3, 0), std::invalid_argument);
    }
    SECTION("labels outside the taxonomy are an error") {
        LabelFrame f(2, 2, 9);
        REQUIRE_THROWS_AS(class_frequency({f}, 3, 0), std::invalid_argument);
    }
}

TEST_CASE("prior validation", "[priors]") {
    PairwisePrior p;
    p.class_a = 3;
    p.class_b = 1;
    p.canonicalize();
    REQUIRE(p.class_a == 1);
    REQUIRE(p.class_b == 3);
    p.max_distance = 0.0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p.max_distance = 1.0;
    p.weight = -1.0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);

    WallPrior w;
    w.target_distance = -0.1;
    REQUIRE_THROWS_AS(w.validate(), std::invalid_argument);
    w.target_distance = 0.2;
    w.weight_angle = -2.0;
    REQUIRE_THROWS_AS(w.validate(), std::invalid_argument);
}
