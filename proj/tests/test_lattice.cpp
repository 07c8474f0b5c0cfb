#include "doctest.h"

#include <cmath>

#include "erwhex/lattice.hpp"
#include "erwhex/rng.hpp"

using namespace erwhex;

TEST_CASE("negate rotates by three and is an involution") {
    CHECK(negate(Direction(0)) == Direction(3));
    CHECK(negate(Direction(2)) == Direction(5));
    CHECK(negate(negate(Direction(4))) == Direction(4));
    for (int k = 0; k < kDirections; ++k) CHECK(unit_step(negate(Direction(k))) == -unit_step(Direction(k)));
}

TEST_CASE("direction and axis indices are range checked") {
    CHECK_THROWS_AS(Direction(6), std::out_of_range);
    CHECK_THROWS_AS(Direction(-1), std::out_of_range);
    CHECK_THROWS_AS(Axis(0), std::out_of_range);
    CHECK_THROWS_AS(Axis(4), std::out_of_range);
}

TEST_CASE("axis_sign_decompose") {
    auto [s0, a0] = axis_sign_decompose(Direction(0));
    CHECK(s0 == Sign::Plus);
    CHECK(a0.power() == 3);

    auto [s3, a3] = axis_sign_decompose(Direction(3));
    CHECK(s3 == Sign::Minus);
    CHECK(a3.power() == 3);

    // zeta^1 = -omega^2
    auto [s1, a1] = axis_sign_decompose(Direction(1));
    CHECK(s1 == Sign::Minus);
    CHECK(a1.power() == 2);

    SUBCASE("axes are the even directions") {
        CHECK(recompose(Sign::Plus, Axis(1)) == Direction(2));
        CHECK(recompose(Sign::Plus, Axis(2)) == Direction(4));
        CHECK(recompose(Sign::Plus, Axis(3)) == Direction(0));
    }

    SUBCASE("bijection onto signs x axes") {
        int seen[2][3] = {};
        for (int k = 0; k < kDirections; ++k) {
            const auto [s, a] = axis_sign_decompose(Direction(k));
            CHECK((s == Sign::Plus) == (k % 2 == 0));
            ++seen[s == Sign::Plus ? 0 : 1][a.slot()];
            CHECK(recompose(s, a) == Direction(k));
        }
        for (auto& row : seen)
            for (int x : row) CHECK(x == 1);
    }
}

TEST_CASE("unit steps in Eisenstein coordinates") {
    const LatticePoint expected[] = {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}};
    for (int k = 0; k < kDirections; ++k) {
        CHECK(unit_step(Direction(k)) == expected[k]);
        const Cartesian xy = to_cartesian(unit_step(Direction(k)));
        CHECK(std::hypot(xy.x, xy.y) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::atan2(xy.y, xy.x) == doctest::Approx(std::remainder(k * M_PI / 3, 2 * M_PI)).epsilon(1e-12));
        CHECK(unit_step(Direction(k)).norm2() == 1);
    }
}

TEST_CASE("position_from_counts") {
    CHECK(position_from_counts(CountVector6{{1, 0, 0, 0, 0, 0}}) == LatticePoint{1, 0});
    CHECK(position_from_counts(CountVector6{{1, 1, 1, 1, 1, 1}}) == LatticePoint{0, 0});
    CHECK(position_from_counts(CountVector6{{2, 1, 0, 0, 0, 0}}) == LatticePoint{3, 1});
}

TEST_CASE("to_cartesian") {
    const Cartesian a = to_cartesian({1, 0});
    CHECK(a.x == 1.0);
    CHECK(a.y == 0.0);
    const Cartesian b = to_cartesian({0, 1});
    CHECK(b.x == -0.5);
    CHECK(b.y == doctest::Approx(0.8660254).epsilon(1e-7));
    const Cartesian c = to_cartesian({1, 1});
    CHECK(c.x == 0.5);
    CHECK(c.y == doctest::Approx(0.8660254).epsilon(1e-7));
}

TEST_CASE("position properties on random count vectors") {
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        CountVector6 a, b;
        for (int k = 0; k < kDirections; ++k) {
            a[k] = static_cast<std::int64_t>(rng.below(1000));
            b[k] = static_cast<std::int64_t>(rng.below(1000));
        }
        // additivity
        CHECK(position_from_counts(a) + position_from_counts(b) == position_from_counts(a + b));
        // negation symmetry
        CHECK(position_from_counts(rotate_counts(a, 3)) == -position_from_counts(a));
        // position equals the step-by-step sum
        LatticePoint s;
        for (int k = 0; k < kDirections; ++k)
            for (std::int64_t i = 0; i < a[k]; ++i) s = s + unit_step(Direction(k));
        CHECK(s == position_from_counts(a));
        // Euclidean norm agrees with the exact Eisenstein norm
        const Cartesian xy = to_cartesian(s);
        CHECK(xy.x * xy.x + xy.y * xy.y == doctest::Approx(static_cast<double>(s.norm2())).epsilon(1e-12));
    }
}
