#include "erwhex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace erwhex::stats {
namespace {

constexpr double kMinExpected = 5.0;

void check_significance(double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("significance must lie in (0,1)");
}

ChiSquareResult finish(double statistic, int cells, int dof, double significance) {
    ChiSquareResult r;
    r.statistic = statistic;
    r.cells = cells;
    r.degrees_of_freedom = dof;
    r.p_value = std::isinf(statistic) ? 0.0 : chi_square_survival(statistic, dof);
    r.reject = r.p_value < significance;
    return r;
}

}  // namespace

double ks_constant(double significance) {
    check_significance(significance);
    return std::sqrt(-0.5 * std::log(significance / 2.0));
}

double normal_cdf(double x, double sigma) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); }

KsResult ks_gaussian_test(std::span<const double> sample, double sigma, double significance) {
    if (sample.size() < 100) throw std::invalid_argument("KS test needs at least 100 points");
    if (!(sigma > 0.0)) throw std::invalid_argument("KS reference sigma must be positive");
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const auto m = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i], sigma);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    KsResult r;
    r.statistic = d;
    r.critical = ks_constant(significance) / std::sqrt(m);
    r.reject = d > r.critical;
    return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double significance) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two-sample KS needs non-empty samples");
    std::vector<double> xs(a.begin(), a.end());
    std::vector<double> ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const auto m = static_cast<double>(xs.size());
    const auto n = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double t = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == t) ++i;
        while (j < ys.size() && ys[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
    }
    KsResult r;
    r.statistic = d;
    r.critical = ks_constant(significance) * std::sqrt((m + n) / (m * n));
    r.reject = d > r.critical;
    return r;
}

double chi_square_survival(double statistic, int degrees_of_freedom) {
    const boost::math::chi_squared dist(degrees_of_freedom);
    return boost::math::cdf(boost::math::complement(dist, std::max(statistic, 0.0)));
}

double chi_square_critical(int degrees_of_freedom, double significance) {
    check_significance(significance);
    const boost::math::chi_squared dist(degrees_of_freedom);
    return boost::math::quantile(boost::math::complement(dist, significance));
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_probs,
                               std::int64_t total, double significance) {
    check_significance(significance);
    if (observed.size() != expected_probs.size()) throw std::invalid_argument("observed/expected size mismatch");
    if (total <= 0) throw std::invalid_argument("chi-square total must be positive");
    if (std::accumulate(observed.begin(), observed.end(), std::int64_t{0}) != total) {
        throw std::invalid_argument("observed counts do not add up to total");
    }
    double mass = 0.0;
    for (double q : expected_probs) {
        if (!(q >= 0.0)) throw std::invalid_argument("expected probabilities must be non-negative");
        mass += q;
    }
    if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("expected probabilities must sum to 1");

    const auto n = static_cast<double>(total);
    std::vector<double> cell_expected;
    std::vector<double> cell_observed;
    double pooled_expected = 0.0;
    double pooled_observed = 0.0;
    bool impossible = false;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_probs[i];
        const auto o = static_cast<double>(observed[i]);
        if (expected_probs[i] == 0.0) {
            impossible = impossible || observed[i] > 0;
        } else if (e < kMinExpected) {
            pooled_expected += e;
            pooled_observed += o;
        } else {
            cell_expected.push_back(e);
            cell_observed.push_back(o);
        }
    }
    if (pooled_expected > 0.0) {
        if (pooled_expected >= kMinExpected || cell_expected.empty()) {
            cell_expected.push_back(pooled_expected);
            cell_observed.push_back(pooled_observed);
        } else {
            const auto smallest = static_cast<std::size_t>(
                std::min_element(cell_expected.begin(), cell_expected.end()) - cell_expected.begin());
            cell_expected[smallest] += pooled_expected;
            cell_observed[smallest] += pooled_observed;
        }
    }
    const int cells = static_cast<int>(cell_expected.size());
    if (cells < 2) throw std::invalid_argument("chi-square needs at least two cells after pooling");
    if (impossible) return finish(std::numeric_limits<double>::infinity(), cells, cells - 1, significance);

    double statistic = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double diff = cell_observed[static_cast<std::size_t>(i)] - cell_expected[static_cast<std::size_t>(i)];
        statistic += diff * diff / cell_expected[static_cast<std::size_t>(i)];
    }
    return finish(statistic, cells, cells - 1, significance);
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& table, double significance) {
    check_significance(significance);
    if (table.empty()) throw std::invalid_argument("empty contingency table");
    const std::size_t cols = table.front().size();
    for (const auto& row : table) {
        if (row.size() != cols) throw std::invalid_argument("ragged contingency table");
    }
    std::vector<double> row_sum(table.size(), 0.0);
    std::vector<double> col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (table[i][j] < 0) throw std::invalid_argument("negative contingency count");
            const auto x = static_cast<double>(table[i][j]);
            row_sum[i] += x;
            col_sum[j] += x;
            total += x;
        }
    }
    const auto live_rows = std::count_if(row_sum.begin(), row_sum.end(), [](double s) { return s > 0.0; });
    const auto live_cols = std::count_if(col_sum.begin(), col_sum.end(), [](double s) { return s > 0.0; });
    if (live_rows < 2 || live_cols < 2) throw std::invalid_argument("contingency table needs two live rows and columns");

    double statistic = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (row_sum[i] == 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            if (col_sum[j] == 0.0) continue;
            const double e = row_sum[i] * col_sum[j] / total;
            const double diff = static_cast<double>(table[i][j]) - e;
            statistic += diff * diff / e;
        }
    }
    const int dof = static_cast<int>((live_rows - 1) * (live_cols - 1));
    return finish(statistic, static_cast<int>(live_rows * live_cols), dof, significance);
}

double fair_coin_z(std::int64_t successes, std::int64_t trials) {
    if (trials <= 0) throw std::invalid_argument("fair-coin test needs at least one trial");
    const auto m = static_cast<double>(trials);
    return (static_cast<double>(successes) - 0.5 * m) / (0.5 * std::sqrt(m));
}

double Summary::standard_error() const {
    return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(xs.size() - 1);
    return s;
}

double covariance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("covariance needs paired samples");
    const double mx = summarize(xs).mean;
    const double my = summarize(ys).mean;
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
    return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace erwhex::stats
