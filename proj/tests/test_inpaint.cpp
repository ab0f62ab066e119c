#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "test_support.hpp"

using namespace scenesynth;

namespace {

std::pair<double, double> valid_range(const DepthFrame& f) {
    double lo = 1e30, hi = -1e30;
    for (double z : f.data)
        if (depth_valid(z)) {
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
    return {lo, hi};
}

}  // namespace

TEST_CASE("a frame without holes passes through bitwise", "[inpaint]") {
    DepthFrame f(16, 12, 2.0);
    f.at(3, 3) = 1.7;
    const DepthFrame out = inpaint(f);
    REQUIRE(out == f);
}

TEST_CASE("a single hole in a constant frame takes the constant", "[inpaint]") {
    DepthFrame f(9, 9, 2.0);
    f.at(4, 4) = kInvalidDepth;
    const DepthFrame out = inpaint(f, 3);
    REQUIRE(std::abs(out.at(4, 4) - 2.0) < 1e-6);
    // every other pixel is untouched
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x)
            if (x != 4 || y != 4) REQUIRE(out.at(x, y) == 2.0);
}

TEST_CASE("valid pixels are hard constraints", "[inpaint]") {
    Rng rng(15);
    DepthFrame f(24, 18, 0.0);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) f.at(x, y) = 1.0 + 0.05 * x + 0.02 * y;
    std::vector<std::size_t> holes;
    for (std::size_t i = 0; i < f.data.size(); ++i)
        if (rng.uniform() < 0.2) {
            f.data[i] = kInvalidDepth;
            holes.push_back(i);
        }
    const DepthFrame out = inpaint(f, 3);
    SECTION("no invalid pixels remain") {
        for (double z : out.data) REQUIRE(depth_valid(z));
    }
    SECTION("valid inputs are bit-identical") {
        for (std::size_t i = 0; i < f.data.size(); ++i)
            if (depth_valid(f.data[i])) {
                // bit pattern comparison, not approximate
                REQUIRE(std::memcmp(&out.data[i], &f.data[i], sizeof(double)) == 0);
            }
    }
    SECTION("fills obey the maximum principle") {
        const auto [lo, hi] = valid_range(f);
        for (const std::size_t i : holes) {
            REQUIRE(out.data[i] >= lo - 1e-9);
            REQUIRE(out.data[i] <= hi + 1e-9);
        }
    }
    SECTION("the result is a fixed point") {
        const DepthFrame again = inpaint(out, 3);
        REQUIRE(again == out);
    }
}

TEST_CASE("a hole stripe across a ramp interpolates inside the ramp", "[inpaint]") {
    DepthFrame f(20, 10, 0.0);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) f.at(x, y) = 1.0 + 0.1 * x;
    for (int y = 0; y < f.height; ++y)
        for (int x = 8; x <= 11; ++x) f.at(x, y) = kInvalidDepth;
    const DepthFrame out = inpaint(f, 3);
    for (int y = 0; y < f.height; ++y)
        for (int x = 8; x <= 11; ++x) {
            REQUIRE(out.at(x, y) > 1.0 + 0.1 * 7 - 1e-9);
            REQUIRE(out.at(x, y) < 1.0 + 0.1 * 12 + 1e-9);
        }
}

TEST_CASE("kernels of different sizes fill larger neighborhoods", "[inpaint]") {
    DepthFrame f(20, 20, 2.0);
    for (int y = 8; y <= 12; ++y)
        for (int x = 8; x <= 12; ++x) f.at(x, y) = kInvalidDepth;
    const DepthFrame k3 = inpaint(f, 3);
    const DepthFrame k7 = inpaint(f, 7);
    for (double z : k3.data) REQUIRE(depth_valid(z));
    for (double z : k7.data) REQUIRE(depth_valid(z));
    // on a constant frame both kernels must agree to solver precision
    for (std::size_t i = 0; i < f.data.size(); ++i)
        REQUIRE(std::abs(k3.data[i] - k7.data[i]) < 1e-6);
}

TEST_CASE("inpaint input validation", "[inpaint]") {
    DepthFrame f(8, 8, 1.0);
    REQUIRE_THROWS_AS(inpaint(f, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(inpaint(f, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(inpaint(f, 4), std::invalid_argument);
    REQUIRE_NOTHROW(inpaint(f, 5));
    DepthFrame empty(8, 8, kInvalidDepth);
    REQUIRE_THROWS_AS(inpaint(empty), std::invalid_argument);
}
