#include "doctest.h"

#include <bit>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "erwhex/rng.hpp"
#include "erwhex/stats.hpp"

using namespace erwhex;

TEST_CASE("KS on quantile-aligned points") {
    for (int m : {100, 1000, 5000}) {
        for (double sigma : {0.5, 1.0, 3.0}) {
            const boost::math::normal dist(0.0, sigma);
            std::vector<double> xs;
            for (int k = 1; k <= m; ++k) xs.push_back(boost::math::quantile(dist, static_cast<double>(k) / (m + 1)));
            const auto r = stats::ks_gaussian_test(xs, sigma);
            CHECK(r.statistic <= 1.0 / (m + 1) + 1e-12);
            CHECK_FALSE(r.reject);
        }
    }
}

TEST_CASE("KS on a point mass at zero") {
    const std::vector<double> zeros(1000, 0.0);
    const auto r = stats::ks_gaussian_test(zeros, 1.0);
    CHECK(r.statistic == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.reject);
}

TEST_CASE("KS critical value and preconditions") {
    CHECK(stats::ks_constant(1e-3) == doctest::Approx(std::sqrt(std::log(2000.0) / 2)).epsilon(1e-14));
    CHECK(stats::ks_constant(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
    CHECK_THROWS_AS(stats::ks_gaussian_test(std::vector<double>(99, 0.0), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(stats::ks_gaussian_test(std::vector<double>(200, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("KS accepts rescaled fair-coin sums") {
    // 1e5 sums of 1e4 fair +-1 steps, divided by sqrt(1e4).
    const int reps = 100000;
    const int n = 10000;
    Rng rng(2024);
    std::vector<double> xs;
    xs.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        int heads = 0;
        for (int w = 0; w < n / 64; ++w) heads += std::popcount(rng());
        heads += std::popcount(rng() >> (64 - n % 64));
        xs.push_back((2.0 * heads - n) / std::sqrt(static_cast<double>(n)));
    }
    const auto r = stats::ks_gaussian_test(xs, 1.0);
    CHECK_FALSE(r.reject);
    CHECK(stats::ks_gaussian_test(xs, 1.2).reject);
}

TEST_CASE("two-sample KS") {
    Rng rng(5);
    std::vector<double> a, b, shifted;
    for (int i = 0; i < 20000; ++i) {
        a.push_back(rng.uniform());
        b.push_back(rng.uniform());
        shifted.push_back(rng.uniform() + 0.05);
    }
    CHECK(stats::ks_two_sample(a, a).statistic == 0.0);
    CHECK_FALSE(stats::ks_two_sample(a, b).reject);
    CHECK(stats::ks_two_sample(a, shifted).reject);
    // D of {1,2} vs {3,4} is 1.
    CHECK(stats::ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}).statistic == 1.0);
}

TEST_CASE("chi-square goodness of fit") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(stats::chi_square_gof(std::vector<std::int64_t>{50, 50}, half, 100).statistic == 0.0);
    const auto r = stats::chi_square_gof(std::vector<std::int64_t>{60, 40}, half, 100);
    CHECK(r.statistic == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(r.degrees_of_freedom == 1);
    CHECK(r.p_value == doctest::Approx(0.0455).epsilon(1e-3));
    CHECK_FALSE(r.reject);
    CHECK(stats::chi_square_gof(std::vector<std::int64_t>{60, 40}, half, 100, 0.05).reject);

    const std::vector<double> thirds{0.2, 0.3, 0.5};
    CHECK(stats::chi_square_gof(std::vector<std::int64_t>{200, 300, 500}, thirds, 1000).statistic == 0.0);
}

TEST_CASE("chi-square pooling and degenerate inputs") {
    // Cells with expected count 1 and 2 pool into one cell of 3, which then joins the smallest regular cell.
    const std::vector<double> probs{0.01, 0.02, 0.47, 0.5};
    const auto r = stats::chi_square_gof(std::vector<std::int64_t>{1, 2, 47, 50}, probs, 100);
    CHECK(r.cells == 2);
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));

    // Impossible observations are an outright rejection.
    const auto impossible = stats::chi_square_gof(std::vector<std::int64_t>{50, 49, 1}, std::vector<double>{0.5, 0.5, 0.0}, 100);
    CHECK(std::isinf(impossible.statistic));
    CHECK(impossible.reject);

    CHECK_THROWS_AS(stats::chi_square_gof(std::vector<std::int64_t>{10}, std::vector<double>{1.0}, 10), std::invalid_argument);
    CHECK_THROWS_AS(stats::chi_square_gof(std::vector<std::int64_t>{5, 5}, std::vector<double>{0.6, 0.6}, 10), std::invalid_argument);
    CHECK_THROWS_AS(stats::chi_square_gof(std::vector<std::int64_t>{5, 5}, std::vector<double>{0.5, 0.5}, 11), std::invalid_argument);
    CHECK_THROWS_AS(stats::chi_square_gof(std::vector<std::int64_t>{5}, std::vector<double>{0.5, 0.5}, 5), std::invalid_argument);
    CHECK_THROWS_AS(stats::chi_square_gof(std::vector<std::int64_t>{5, 5}, std::vector<double>{0.5, 0.5}, 10, 0.0),
                    std::invalid_argument);
}

TEST_CASE("chi-square distribution helpers") {
    CHECK(stats::chi_square_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(stats::chi_square_critical(1, 0.05) == doctest::Approx(3.841458820694124).epsilon(1e-9));
    CHECK(stats::chi_square_critical(2, 1e-3) == doctest::Approx(-2 * std::log(1e-3)).epsilon(1e-9));
}

TEST_CASE("contingency independence") {
    const std::vector<std::vector<std::int64_t>> independent{{10, 20, 30}, {20, 40, 60}};
    const auto r = stats::chi_square_independence(independent);
    CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.degrees_of_freedom == 2);

    const std::vector<std::vector<std::int64_t>> dependent{{500, 100}, {100, 500}};
    CHECK(stats::chi_square_independence(dependent).reject);

    const std::vector<std::vector<std::int64_t>> empty_column{{10, 0, 30}, {20, 0, 60}};
    CHECK(stats::chi_square_independence(empty_column).degrees_of_freedom == 1);

    const std::vector<std::vector<std::int64_t>> one_column{{10, 0}, {20, 0}};
    CHECK_THROWS_AS(stats::chi_square_independence(one_column), std::invalid_argument);
}

TEST_CASE("summaries") {
    CHECK(stats::fair_coin_z(50, 100) == 0.0);
    CHECK(stats::fair_coin_z(60, 100) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(stats::fair_coin_z(0, 0), std::invalid_argument);

    const std::vector<double> xs{1, 2, 3, 4};
    const auto s = stats::summarize(xs);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3).epsilon(1e-15));
    CHECK(s.standard_error() == doctest::Approx(std::sqrt(5.0 / 12)).epsilon(1e-15));
    CHECK(stats::covariance(xs, std::vector<double>{2, 4, 6, 8}) == doctest::Approx(10.0 / 3).epsilon(1e-15));
}

TEST_CASE("rng bounded draws and streams") {
    Rng a(1), b(1);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) == derive_seed(1, {2}));

    Rng rng(11);
    std::vector<std::int64_t> hist(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        const auto x = rng.below(7);
        REQUIRE(x < 7);
        ++hist[x];
    }
    CHECK_FALSE(stats::chi_square_gof(hist, std::vector<double>(7, 1.0 / 7), draws).reject);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
