#include "doctest.h"

#include <algorithm>

#include "erwhex/harness.hpp"
#include "erwhex/io.hpp"

using namespace erwhex;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.p_grid = {0.0, 0.5, 0.9, 1.0};
    c.n_grid = {10, 100};
    c.replications = 200;
    c.base_seed = 7;
    return c;
}

const Check* find(const Report& r, const std::string& name, double p) {
    for (const auto& c : r.checks) {
        if (c.name == name && c.p && *c.p == p) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("experiment config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(validate(c));
    c.p_grid = {};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.p_grid = {0.5, 1.2};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.n_grid = {0};
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.replications = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.significance = 1.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("kernel and oracle suites pass") {
    const auto kernel = run_kernel_consistency(small_config());
    CHECK(kernel.checks.size() == 9);
    for (const auto& c : kernel.checks) CHECK_MESSAGE(c.pass, c.name);
    const auto oracle = run_oracle_checks(small_config());
    for (const auto& c : oracle.checks) CHECK_MESSAGE(c.pass, c.name << " p=" << c.p.value_or(-1));
}

TEST_CASE("sign battery on the literal walk") {
    const auto report = run_sign_battery(small_config(), RunOptions{1});
    for (const auto& c : report.checks) CHECK_MESSAGE(c.pass, c.name << " p=" << c.p.value_or(-1));
    // At p = 1 a single path stays on one axis.
    CHECK(find(report, "sign_axis_independence", 1.0) == nullptr);
    CHECK(find(report, "sign_axis_independence", 0.5) != nullptr);
}

TEST_CASE("sign battery flags a biased sign") {
    const TrajectorySampler biased = [](const WalkParams& params) {
        Trajectory t = simulate_history(params);
        Rng rng(params.seed ^ 0xBAD);
        for (auto& d : t.steps) {
            const auto [sign, axis] = axis_sign_decompose(d);
            if (sign == Sign::Minus && rng.uniform() < 0.5) d = recompose(Sign::Plus, axis);
        }
        return t;
    };
    const auto report = run_sign_battery(small_config(), biased);
    const Check* freq = find(report, "sign_frequency_z", 0.5);
    REQUIRE(freq != nullptr);
    CHECK_FALSE(freq->pass);
    CHECK_FALSE(apply_policy(report.checks, 1e-3).pass);
}

TEST_CASE("axis-fraction single-path rules depend on p") {
    const auto report = run_axis_fractions(small_config(), RunOptions{2});
    CHECK(find(report, "single_path_deviation", 0.5) != nullptr);
    CHECK(find(report, "single_path_deviation_decreasing", 0.9) != nullptr);
    CHECK(find(report, "single_path_deviation", 1.0) == nullptr);
    CHECK(find(report, "single_path_deviation_decreasing", 1.0) == nullptr);
    for (const auto& c : report.checks) {
        if (c.name.find("mean_fraction") != std::string::npos) CHECK_MESSAGE(c.pass, c.name);
    }
}

TEST_CASE("CLT suite skips p = 1 and compares the remaining p pairwise") {
    const auto report = run_clt(small_config(), RunOptions{2});
    CHECK(std::none_of(report.checks.begin(), report.checks.end(), [](const Check& c) { return c.p && *c.p == 1.0 && c.suite == "clt"; }));
    const auto pairwise = std::count_if(report.checks.begin(), report.checks.end(),
                                        [](const Check& c) { return c.suite == "p_independence"; });
    CHECK(pairwise == 6);  // three p values, two components
    CHECK(report.histograms.size() == 6);
}

TEST_CASE("summarize_clt") {
    const std::vector<double> xs{1, -1, 1, -1};
    const std::vector<double> ys{1, 1, -1, -1};
    const auto s = summarize_clt(xs, ys);
    CHECK(s.var_x == doctest::Approx(4.0 / 3));
    CHECK(s.var_y == doctest::Approx(4.0 / 3));
    CHECK(s.covariance == doctest::Approx(0.0));
    CHECK(s.isotropy == doctest::Approx(1.0));
    const auto line = summarize_clt(xs, xs);
    CHECK(line.isotropy == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multiple-testing policy") {
    std::vector<Check> checks(100);
    for (auto& c : checks) {
        c.kind = CheckKind::Statistical;
        c.pass = true;
    }
    checks[0].pass = false;
    auto out = apply_policy(checks, 0.01);  // expected 1 false positive, 2 allowed
    CHECK(out.allowed_rejections == 2);
    CHECK(out.pass);
    checks[1].pass = false;
    checks[2].pass = false;
    CHECK_FALSE(apply_policy(checks, 0.01).pass);

    std::vector<Check> hard(1);
    hard[0].kind = CheckKind::Tolerance;
    hard[0].pass = false;
    CHECK_FALSE(apply_policy(hard, 0.01).pass);
}

TEST_CASE("battery output does not depend on the thread count") {
    ExperimentConfig c = small_config();
    c.p_grid = {0.3, 1.0};
    const auto one = run_battery(c, RunOptions{1});
    const auto four = run_battery(c, RunOptions{4});
    CHECK(io::rows_csv(one.reports) == io::rows_csv(four.reports));
    CHECK(io::checks_csv(one.all_checks()) == io::checks_csv(four.all_checks()));
    CHECK(io::summary_json(one).dump() == io::summary_json(four).dump());
}
