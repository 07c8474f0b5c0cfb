#pragma once

// Goodness-of-fit machinery: Kolmogorov-Smirnov (one- and two-sample),
// Pearson chi-square with small-cell pooling, contingency independence and
// z-score helpers.

#include <cstdint>
#include <span>
#include <vector>

namespace erwhex::stats {

inline constexpr double kDefaultSignificance = 1e-3;

struct KsResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool reject = false;
};

struct ChiSquareResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    int cells = 0;  // after pooling
    bool reject = false;
};

/// Asymptotic Kolmogorov constant c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_constant(double significance);

double normal_cdf(double x, double sigma);

/// One-sample KS against N(0, sigma^2); rejects when D > c(alpha)/sqrt(m).
/// Throws std::invalid_argument for fewer than 100 points or sigma <= 0.
KsResult ks_gaussian_test(std::span<const double> sample, double sigma,
                          double significance = kDefaultSignificance);

/// Two-sample KS; rejects when D > c(alpha) sqrt((m+n)/(m n)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double significance = kDefaultSignificance);

/// Pearson statistic with (cells - 1) degrees of freedom. Cells with expected
/// count below 5 are pooled together (and, if still short, into the smallest
/// regular cell). A zero-probability cell with observations makes the
/// statistic infinite. Throws std::invalid_argument for a malformed or
/// degenerate expected vector.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> expected_probs,
                               std::int64_t total, double significance = kDefaultSignificance);

/// Pearson independence test on an r x c contingency table; all-zero rows and
/// columns are dropped. Throws if fewer than two rows or columns remain.
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& table,
                                        double significance = kDefaultSignificance);

double chi_square_survival(double statistic, int degrees_of_freedom);

/// Upper critical value: P(chi2_dof > value) = significance.
double chi_square_critical(int degrees_of_freedom, double significance);

/// (successes - m/2) / (sqrt(m)/2).
double fair_coin_z(std::int64_t successes, std::int64_t trials);

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    std::int64_t count = 0;
    double standard_error() const;
};

/// Two-pass mean and variance in index order.
Summary summarize(std::span<const double> xs);

/// Unbiased sample covariance.
double covariance(std::span<const double> xs, std::span<const double> ys);

}  // namespace erwhex::stats
