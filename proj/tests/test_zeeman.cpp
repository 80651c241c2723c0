#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "holeburn/errors.hpp"
#include "holeburn/zeeman.hpp"

using namespace holeburn;
using doctest::Approx;

TEST_SUITE("zeeman") {

TEST_CASE("defaults") {
    ZeemanConfig z;
    CHECK(z.g_ground == Approx(19e9));
    CHECK(z.g_excited == Approx(25.5e9));
    CHECK(z.stray_field == Approx(0.2e-3));
    CHECK_NOTHROW(z.validate());
    z.g_excited = 0;
    CHECK_THROWS_AS(z.validate(), InputError);
    z = {};
    z.field_sign = 0;
    CHECK_THROWS_AS(z.validate(), InputError);
}

TEST_CASE("total field") {
    ZeemanConfig z;
    CHECK(total_field(-0.2e-3, z) == Approx(0.0).scale(1e-3));
    CHECK(std::abs(total_field(-0.2e-3, z)) < 1e-18);
    ZeemanConfig none;
    none.stray_field = 0;
    CHECK(total_field(1.234e-3, none) == 1.234e-3);
    ZeemanConfig flipped;
    flipped.field_sign = -1;
    CHECK(std::abs(total_field(0.2e-3, flipped)) < 1e-18);
    CHECK(applied_field(total_field(0.7e-3, z), z) == Approx(0.7e-3));
}

TEST_CASE("splittings") {
    ZeemanConfig z;
    const auto s = splittings(1e-3, z);
    CHECK(s.ground == Approx(19e6));
    CHECK(s.ground + s.excited == Approx(44.5e6));
    const auto zero = splittings(0.0, z);
    CHECK(zero.ground == 0.0);
    CHECK(zero.excited == 0.0);
    const auto s2 = splittings(2.7e-3, z), s1 = splittings(1.35e-3, z);
    CHECK(s2.ground == Approx(2 * s1.ground));
    CHECK(s2.excited == Approx(2 * s1.excited));
    // slope of 43.4 +- 1.7 MHz/mT is consistent with the sum of the defaults
    CHECK(std::abs(44.5 - 43.4) < 1.7);
}

TEST_CASE("subgroup lines") {
    ZeemanConfig z;
    const auto zero = subgroup_lines(5e14, 0.0, z);
    for (const auto& g : zero.groups) {
        CHECK(g.laser_line == 5e14);
        CHECK(g.cross_line == 5e14);
        CHECK(g.ground_line == 5e14);
    }
    const auto lines = subgroup_lines(0.0, 1e-3, z);
    const auto s = splittings(1e-3, z);
    CHECK(lines.groups[0].label == 'A');
    CHECK(lines.groups[3].label == 'D');
    CHECK(lines.groups[0].pair_separation() == Approx(s.ground + s.excited));
    CHECK(lines.groups[3].pair_separation() == Approx(s.ground + s.excited));
    CHECK(lines.groups[1].pair_separation() == Approx(std::abs(s.ground - s.excited)));
    CHECK(lines.groups[2].pair_separation() == Approx(std::abs(s.ground - s.excited)));
    std::set<long long> seps;
    for (const auto& g : lines.groups) {
        seps.insert(std::llround(g.pair_separation()));
        CHECK(std::abs(g.ground_line - g.laser_line) == Approx(s.ground));
    }
    CHECK(seps == std::set<long long>{44'500'000, 6'500'000});

    const auto neg = subgroup_lines(0.0, -1e-3, z);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(neg.groups[i].pair_separation() == Approx(lines.groups[i].pair_separation()));
}

TEST_CASE("resonance fields") {
    ZeemanConfig z;
    const auto a = resonance_fields(44.5e6, z);
    CHECK(a.b_sum == Approx(1e-3).epsilon(1e-12));
    CHECK(a.b_sum_applied == Approx(0.8e-3).epsilon(1e-12));
    const auto b = resonance_fields(19e6, z);
    CHECK(b.b_ground == Approx(1e-3).epsilon(1e-12));
    REQUIRE(b.b_diff.has_value());
    CHECK(*b.b_diff == Approx(19e6 / 6.5e9));
    CHECK(a.b_sum < a.b_ground);
    ZeemanConfig equal;
    equal.g_excited = equal.g_ground;
    const auto e = resonance_fields(10e6, equal);
    CHECK_FALSE(e.b_diff.has_value());
    CHECK_FALSE(e.b_diff_applied.has_value());
    CHECK_THROWS_AS(resonance_fields(0.0, z), InputError);
    CHECK_THROWS_AS(resonance_fields(-1.0, z), InputError);
}

TEST_CASE("resonance ordering for coefficient pairs below twice the ground value") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> gg(1e9, 50e9), frac(0.01, 1.99);
    for (int i = 0; i < 1000; ++i) {
        ZeemanConfig z;
        z.g_ground = gg(rng);
        do z.g_excited = frac(rng) * z.g_ground; while (z.g_excited == z.g_ground);
        const auto r = resonance_fields(30e6, z);
        CHECK(r.b_sum < r.b_ground);
        CHECK(r.b_ground < *r.b_diff);
    }
}

} // TEST_SUITE
