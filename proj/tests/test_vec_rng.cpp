#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "voxhalf/rng.hpp"
#include "voxhalf/vec.hpp"

using namespace voxhalf;

TEST_CASE("integer vectors compare by value", "[vec]") {
    REQUIRE(Vec3i{1, 2, 3} == Vec3i{1, 2, 3});
    REQUIRE(Vec3i{1, 2, 3} != Vec3i{1, 2, 4});
    REQUIRE(Vec2i{5, -1} == Vec2i{5, -1});
}

TEST_CASE("scan_less orders by z, then y, then x", "[vec]") {
    REQUIRE(scan_less({9, 9, 0}, {0, 0, 1}));
    REQUIRE(scan_less({9, 0, 2}, {0, 1, 2}));
    REQUIRE(scan_less({0, 3, 2}, {1, 3, 2}));
    REQUIRE_FALSE(scan_less({1, 3, 2}, {1, 3, 2}));
    REQUIRE_FALSE(scan_less({0, 0, 1}, {9, 9, 0}));
}

TEST_CASE("double vector arithmetic", "[vec]") {
    Vec3d a{1, 2, 3}, b{4, -1, 0.5};
    Vec3d s = a + b;
    REQUIRE(s.x == 5.0);
    REQUIRE(s.y == 1.0);
    REQUIRE(s.z == 3.5);
    Vec3d d = a - b;
    REQUIRE(d.x == -3.0);
    Vec3d m = a * 2.0;
    REQUIRE(m.z == 6.0);
    Vec3d q = a / 2.0;
    REQUIRE(q.x == 0.5);
    REQUIRE(dot(a, b) == Catch::Approx(4 - 2 + 1.5));
}

TEST_CASE("cross product and length", "[vec]") {
    Vec3d c = cross({1, 0, 0}, {0, 1, 0});
    REQUIRE(c.x == 0.0);
    REQUIRE(c.y == 0.0);
    REQUIRE(c.z == 1.0);
    REQUIRE(length({3, 4, 0}) == Catch::Approx(5.0));
}

TEST_CASE("normalized handles the zero vector", "[vec]") {
    Vec3d n = normalized({0, 0, 2});
    REQUIRE(n.z == Catch::Approx(1.0));
    Vec3d z = normalized({0, 0, 0});
    REQUIRE(z.x == 0.0);
    REQUIRE(z.y == 0.0);
    REQUIRE(z.z == 0.0);
}

TEST_CASE("keyed draws are pure functions of the key", "[rng]") {
    double a = keyed_unit(7, {1, 2, 3});
    double b = keyed_unit(7, {1, 2, 3});
    REQUIRE(a == b);
    REQUIRE(keyed_bits(7, {1, 2, 3}) == keyed_bits(7, {1, 2, 3}));

    SECTION("the key is order sensitive") {
        REQUIRE(keyed_bits(7, {1, 2}) != keyed_bits(7, {2, 1}));
        REQUIRE(keyed_bits(7, {1, 2, 3}) != keyed_bits(8, {1, 2, 3}));
    }
}

TEST_CASE("keyed_unit stays in [0,1) and looks uniform", "[rng]") {
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    const int n = 20000;
    std::set<uint64_t> distinct;
    for (int i = 0; i < n; ++i) {
        double u = keyed_unit(42, {static_cast<uint64_t>(i)});
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        distinct.insert(keyed_bits(42, {static_cast<uint64_t>(i)}));
    }
    REQUIRE(sum / n == Catch::Approx(0.5).margin(0.01));
    REQUIRE(lo < 0.01);
    REQUIRE(hi > 0.99);
    REQUIRE(distinct.size() == static_cast<size_t>(n));
}
