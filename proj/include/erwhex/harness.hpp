#pragma once

// Monte Carlo experiments and the verification battery.
//
// Every experiment derives one random stream per replication from
// (base_seed, experiment tag, p, n, sampler, replication), stores per-replication
// results by index and reduces them in index order, so the output does not
// depend on the thread count.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "erwhex/lattice.hpp"
#include "erwhex/stats.hpp"
#include "erwhex/walk.hpp"

namespace erwhex {

struct ExperimentConfig {
    std::vector<double> p_grid{0.0, 0.5, 0.9, 1.0};
    std::vector<std::int64_t> n_grid{100, 1000, 10000};
    std::int64_t replications = 10000;
    std::uint64_t base_seed = 20161010;
    double significance = stats::kDefaultSignificance;
};

/// Throws std::invalid_argument on empty grids, p outside [0,1], n < 1,
/// replications < 1 or significance outside (0,1).
void validate(const ExperimentConfig& config);

enum class Sampler { History, Counts, Decomposed };

std::string to_string(Sampler s);
Sampler sampler_from_string(const std::string& name);

/// Final counts of one replication from the chosen sampler.
CountVector6 sample_final_counts(Sampler sampler, const WalkParams& params);

using TrajectorySampler = std::function<Trajectory(const WalkParams&)>;

enum class CheckKind {
    Tolerance,    // deterministic or fixed-sigma bound
    Statistical,  // significance-level hypothesis test, counted by the multiple-testing policy
    Trend,        // monotone-trend requirement
};

std::string to_string(CheckKind k);

struct Check {
    std::string suite;
    std::string name;
    int criterion = 0;  // 0 marks a supplementary check
    std::string sampler;
    std::optional<double> p;
    std::optional<std::int64_t> n;
    double statistic = 0.0;
    double threshold = 0.0;
    CheckKind kind = CheckKind::Tolerance;
    bool pass = false;
};

struct Row {
    double p = 0.0;
    std::int64_t n = 0;
    std::string statistic;
    double value = 0.0;
};

struct Histogram {
    std::string label;
    double left = 0.0;
    double width = 0.0;
    std::vector<std::int64_t> counts;
};

struct Report {
    std::string experiment;
    std::vector<Row> rows;
    std::vector<Check> checks;
    std::vector<Histogram> histograms;

    void append(const Report& other);
};

/// Runtime knobs that never affect results.
struct RunOptions {
    int threads = 1;
};

// Pinned tolerances.
inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kMassTolerance = 1e-10;
inline constexpr double kMeanTolerance = 1e-10;
inline constexpr double kMomentTolerance = 1e-9;
inline constexpr int kKernelMaxTotal = 4;
inline constexpr int kOracleMaxLevel = 20;
inline constexpr int kFidelityHorizon = 6;
inline constexpr int kAxisOracleHorizon = 8;
inline constexpr double kSigmaBound = 4.0;
inline constexpr double kCltVariance = 0.5;
inline constexpr double kCltVarianceTolerance = 0.01;
inline constexpr double kLlnDecadeTolerance = 0.10;
inline constexpr double kAxisPathThreshold = 0.01;
inline constexpr int kMaxLag = 4;

/// p values every oracle suite covers in addition to the configured grid.
const std::vector<double>& oracle_p_grid();

Report run_kernel_consistency(const ExperimentConfig& config);
Report run_oracle_checks(const ExperimentConfig& config);
Report run_fidelity(const ExperimentConfig& config, const RunOptions& options);
Report run_sign_battery(const ExperimentConfig& config, const RunOptions& options);
/// Same battery on trajectories from a caller-supplied sampler.
Report run_sign_battery(const ExperimentConfig& config, const TrajectorySampler& sampler);
Report run_axis_fractions(const ExperimentConfig& config, const RunOptions& options);
Report run_lln(const ExperimentConfig& config, const RunOptions& options);
Report run_clt(const ExperimentConfig& config, const RunOptions& options);

/// Samples final counts of `reps` replications; results indexed by replication.
std::vector<CountVector6> sample_counts(Sampler sampler, double p, std::int64_t n, std::int64_t reps,
                                        std::uint64_t stream_key, const RunOptions& options);

/// Samples final positions of `reps` replications; results indexed by replication.
std::vector<LatticePoint> sample_positions(Sampler sampler, double p, std::int64_t n, std::int64_t reps,
                                           std::uint64_t stream_key, const RunOptions& options);

struct CltSummary {
    double mean_x = 0.0, mean_y = 0.0;
    double var_x = 0.0, var_y = 0.0;
    double covariance = 0.0;
    double isotropy = 0.0;  // smaller / larger eigenvalue of the sample covariance
};

CltSummary summarize_clt(const std::vector<double>& xs, const std::vector<double>& ys);

struct PolicyOutcome {
    int statistical_tests = 0;
    int rejections = 0;
    double expected_false_positives = 0.0;
    int allowed_rejections = 0;
    int failed_hard_checks = 0;
    bool pass = false;
};

/// Hard checks must all pass; statistical rejections may not exceed twice
/// the expected number of false positives.
PolicyOutcome apply_policy(const std::vector<Check>& checks, double significance);

struct BatteryResult {
    ExperimentConfig config;
    std::vector<Report> reports;
    PolicyOutcome policy;

    std::vector<Check> all_checks() const;
};

/// Kernel, oracle, fidelity, sign, axis-fraction, LLN and CLT suites in that order.
BatteryResult run_battery(const ExperimentConfig& config, const RunOptions& options);

}  // namespace erwhex
