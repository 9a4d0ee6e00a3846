#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "segwave/cable.hpp"
#include "segwave/errors.hpp"
#include "segwave/gait.hpp"

using namespace segwave;

TEST_CASE("straight joint is D + l") {
    const JointGeometry g;
    for (int j = 0; j <= 20; ++j) {
        const double l = 0.0005 * j;
        const CablePair c = cable_lengths(g, 0.0, l);
        CHECK(std::abs(c.upper - (g.axial_offset + l)) <= 1e-12);
        CHECK(std::abs(c.lower - (g.axial_offset + l)) <= 1e-12);
    }
}

TEST_CASE("full pitch at zero extension") {
    const CablePair c = cable_lengths(JointGeometry{}, deg_to_rad(90.0), 0.0);
    CHECK(c.upper * 1e3 == doctest::Approx(34.25).epsilon(2e-4));
    CHECK(c.lower * 1e3 == doctest::Approx(81.17).epsilon(2e-4));
}

TEST_CASE("closed form agrees with the anchor-point construction") {
    const JointGeometry g;
    double worst = 0.0;
    for (int a = 0; a <= 180; ++a) {
        const double alpha = deg_to_rad(-90.0 + a);
        for (int j = 0; j <= 20; ++j) {
            const double l = 0.0005 * j;
            const CablePair c = cable_lengths(g, alpha, l);
            const CablePair o = cable_lengths_oracle(g, alpha, l);
            worst = std::max({worst, std::abs(c.upper - o.upper) / o.upper,
                              std::abs(c.lower - o.lower) / o.lower});
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("mirror symmetry") {
    const JointGeometry g;
    for (double alpha : {0.1, 0.7, 1.2, kPi / 2.0})
        for (double l : {0.0, 0.004, 0.01}) {
            CHECK(cable_lengths(g, -alpha, l).upper == cable_lengths(g, alpha, l).lower);
            CHECK(cable_lengths(g, -alpha, l).lower == cable_lengths(g, alpha, l).upper);
        }
}

TEST_CASE("positive pitch shortens the upper cable") {
    const CablePair c = cable_lengths(JointGeometry{}, 0.3, 0.005);
    CHECK(c.upper < c.lower);
}

TEST_CASE("invalid geometry") {
    CHECK_THROWS_AS((JointGeometry{0.0, 0.02}.validate()), ConfigError);
    CHECK_THROWS_AS((JointGeometry{0.04, -1.0}.validate()), ConfigError);
}
