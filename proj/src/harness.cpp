#include "erwhex/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "erwhex/enumeration.hpp"
#include "erwhex/oracle.hpp"
#include "erwhex/parallel.hpp"
#include "erwhex/rng.hpp"
#include "erwhex/urn.hpp"

namespace erwhex {
namespace {

// Stream tags, one per experiment.
enum : std::uint64_t {
    kTagFidelity = 0xF1DE,
    kTagAxisFidelity = 0xA815,
    kTagUrnFidelity = 0x0E2A,
    kTagSigns = 0xC1A1,
    kTagAxisMeans = 0xC2A0,
    kTagAxisPath = 0xC2B0,
    kTagLln = 0x0111,
    kTagClt = 0x0C17,
};

std::uint64_t tag_of(double p) noexcept { return std::bit_cast<std::uint64_t>(p); }

std::uint64_t sampler_tag(Sampler s) noexcept { return static_cast<std::uint64_t>(s) + 1; }

Check make_check(std::string suite, std::string name, int criterion, double statistic, double threshold,
                 CheckKind kind, bool pass) {
    Check c;
    c.suite = std::move(suite);
    c.name = std::move(name);
    c.criterion = criterion;
    c.statistic = statistic;
    c.threshold = threshold;
    c.kind = kind;
    c.pass = pass;
    return c;
}

Check bound_check(std::string suite, std::string name, int criterion, double statistic, double bound) {
    return make_check(std::move(suite), std::move(name), criterion, statistic, bound, CheckKind::Tolerance,
                      statistic <= bound);
}

Check chi_square_check(std::string suite, std::string name, int criterion, const stats::ChiSquareResult& r,
                       double significance) {
    const double critical = stats::chi_square_critical(r.degrees_of_freedom, significance);
    return make_check(std::move(suite), std::move(name), criterion, r.statistic, critical, CheckKind::Statistical,
                      !r.reject);
}

Check ks_check(std::string suite, std::string name, int criterion, const stats::KsResult& r) {
    return make_check(std::move(suite), std::move(name), criterion, r.statistic, r.critical, CheckKind::Statistical,
                      !r.reject);
}

Check& with(Check& c, std::optional<double> p, std::optional<std::int64_t> n, std::string sampler = {}) {
    c.p = p;
    c.n = n;
    c.sampler = std::move(sampler);
    return c;
}

void push(Report& r, Check c, std::optional<double> p, std::optional<std::int64_t> n, std::string sampler = {}) {
    r.checks.push_back(std::move(with(c, p, n, std::move(sampler))));
}

std::vector<double> merged_grid(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a);
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::int64_t max_horizon(const ExperimentConfig& config) {
    return *std::max_element(config.n_grid.begin(), config.n_grid.end());
}

template <std::size_t K>
double max_gap(const std::array<double, K>& a, const std::array<double, K>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

// Histogram of packed count vectors against an exact law over the given support.
template <std::size_t K>
stats::ChiSquareResult histogram_vs_law(const std::vector<std::uint64_t>& keys, const CountLaw<K, double>& law,
                                        double significance) {
    std::map<std::uint64_t, std::int64_t> tally;
    for (const auto& [key, m] : law.mass) tally[key] = 0;
    std::int64_t outside = 0;
    for (auto key : keys) {
        auto it = tally.find(key);
        if (it == tally.end()) {
            ++outside;
        } else {
            ++it->second;
        }
    }
    std::vector<std::int64_t> observed;
    std::vector<double> expected;
    for (const auto& [key, m] : law.mass) {
        observed.push_back(tally[key]);
        expected.push_back(m);
    }
    // Renormalise away double rounding in the oracle mass.
    double mass = 0.0;
    for (double e : expected) mass += e;
    for (double& e : expected) e /= mass;
    observed.push_back(outside);
    expected.push_back(0.0);
    return stats::chi_square_gof(observed, expected, static_cast<std::int64_t>(keys.size()), significance);
}

double axis_fraction_deviation(const CountVector3& c) {
    const auto n = static_cast<double>(c.total());
    double worst = 0.0;
    for (int i = 0; i < kAxes; ++i) worst = std::max(worst, std::abs(static_cast<double>(c[i]) / n - 1.0 / 3.0));
    return worst;
}

}  // namespace

void validate(const ExperimentConfig& config) {
    if (config.p_grid.empty() || config.n_grid.empty()) throw std::invalid_argument("p_grid and n_grid must be non-empty");
    for (double p : config.p_grid) validate_memory(p);
    for (auto n : config.n_grid) {
        if (n < 1) throw std::invalid_argument("n_grid entries must be at least 1");
    }
    if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (!(config.significance > 0.0 && config.significance < 1.0)) {
        throw std::invalid_argument("significance must lie in (0,1)");
    }
}

std::string to_string(Sampler s) {
    switch (s) {
        case Sampler::History: return "history";
        case Sampler::Counts: return "counts";
        case Sampler::Decomposed: return "decomposed";
    }
    return "unknown";
}

Sampler sampler_from_string(const std::string& name) {
    if (name == "history") return Sampler::History;
    if (name == "counts") return Sampler::Counts;
    if (name == "decomposed") return Sampler::Decomposed;
    throw std::invalid_argument("unknown sampler mode '" + name + "'");
}

std::string to_string(CheckKind k) {
    switch (k) {
        case CheckKind::Tolerance: return "tolerance";
        case CheckKind::Statistical: return "statistical";
        case CheckKind::Trend: return "trend";
    }
    return "unknown";
}

CountVector6 sample_final_counts(Sampler sampler, const WalkParams& params) {
    switch (sampler) {
        case Sampler::History: return simulate_history(params).counts();
        case Sampler::Counts: return simulate_counts(params);
        case Sampler::Decomposed: return simulate_decomposed_walk(params).counts();
    }
    throw std::invalid_argument("unknown sampler");
}

void Report::append(const Report& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    histograms.insert(histograms.end(), other.histograms.begin(), other.histograms.end());
}

const std::vector<double>& oracle_p_grid() {
    static const std::vector<double> grid{0.0, 0.3, 0.5, 0.9, 1.0};
    return grid;
}

std::vector<CountVector6> sample_counts(Sampler sampler, double p, std::int64_t n, std::int64_t reps,
                                        std::uint64_t stream_key, const RunOptions& options) {
    validate(WalkParams{p, n, 0});
    std::vector<CountVector6> out(static_cast<std::size_t>(reps));
    parallel_for(reps, options.threads, [&](std::int64_t rep) {
        const WalkParams params{p, n, derive_seed(stream_key, {static_cast<std::uint64_t>(rep)})};
        out[static_cast<std::size_t>(rep)] = sample_final_counts(sampler, params);
    });
    return out;
}

std::vector<LatticePoint> sample_positions(Sampler sampler, double p, std::int64_t n, std::int64_t reps,
                                           std::uint64_t stream_key, const RunOptions& options) {
    const auto counts = sample_counts(sampler, p, n, reps, stream_key, options);
    std::vector<LatticePoint> out;
    out.reserve(counts.size());
    for (const auto& c : counts) out.push_back(position_from_counts(c));
    return out;
}

// ---------------------------------------------------------------------------
// Kernel

Report run_kernel_consistency(const ExperimentConfig& config) {
    validate(config);
    Report report;
    report.experiment = "kernel";
    for (double p : {0.0, 0.3, 1.0}) {
        double worst = 0.0;
        double worst_sum = 0.0;
        double worst_rotation = 0.0;
        for (int total = 0; total <= kKernelMaxTotal; ++total) {
            for (const auto& c : enumeration::compositions(total)) {
                const Probabilities6 q = step_distribution(c, p);
                worst = std::max(worst, max_gap(q, enumeration::kernel_by_enumeration(c, p)));
                double sum = 0.0;
                for (double x : q) sum += x;
                worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
                const Probabilities6 rotated = step_distribution(rotate_counts(c, 2), p);
                for (int k = 0; k < kDirections; ++k) {
                    worst_rotation = std::max(worst_rotation, std::abs(rotated[static_cast<std::size_t>((k + 2) % 6)] -
                                                                       q[static_cast<std::size_t>(k)]));
                }
            }
        }
        push(report, bound_check("kernel", "closed_form_vs_enumeration", 1, worst, kExactTolerance), p, kKernelMaxTotal);
        push(report, bound_check("kernel", "probability_sum", 1, worst_sum, kExactTolerance), p, kKernelMaxTotal);
        push(report, bound_check("kernel", "rotation_equivariance", 1, worst_rotation, kExactTolerance), p,
             kKernelMaxTotal);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Oracle

Report run_oracle_checks(const ExperimentConfig& config) {
    validate(config);
    Report report;
    report.experiment = "oracle";
    for (double p : merged_grid(oracle_p_grid(), config.p_grid)) {
        const auto levels = exact_count_levels(kOracleMaxLevel, p);
        double mass_gap = 0.0, ck_gap = 0.0, rotation_gap = 0.0, enum_gap = 0.0, axis_gap = 0.0;
        double mean_gap = 0.0, radius_gap = 0.0, variance_gap = 0.0, covariance_gap = 0.0;
        for (int n = 1; n <= kOracleMaxLevel; ++n) {
            const auto& law = levels[static_cast<std::size_t>(n)];
            mass_gap = std::max(mass_gap, std::abs(law.total() - 1.0));
            ck_gap = std::max(ck_gap, max_abs_difference(step_forward(levels[static_cast<std::size_t>(n - 1)]), law));
            for (const auto& [key, m] : law.mass) {
                const CountVector6 c = to_vector6(unpack<kDirections>(key));
                rotation_gap = std::max(rotation_gap, std::abs(m - law.probability(rotate_counts(c, 1).c)));
            }
            if (n <= kKernelMaxTotal) {
                enum_gap = std::max(enum_gap, max_abs_difference(law, enumeration::count_distribution_by_enumeration(n, p)));
            }
            if (n <= kAxisOracleHorizon) {
                const auto folded = fold_to_axes(law);
                const auto urn = exact_axis_distribution(n, p);
                for (const auto& [key, m] : urn.mass) axis_gap = std::max(axis_gap, std::abs(m - folded.probability(unpack<kAxes>(key))));
                for (const auto& [key, m] : folded.mass) axis_gap = std::max(axis_gap, std::abs(m - urn.probability(unpack<kAxes>(key))));
            }
            const MomentReport mom = moments_of(law);
            const double half = n / 2.0;
            mean_gap = std::max({mean_gap, std::abs(mom.mean[0]), std::abs(mom.mean[1])});
            radius_gap = std::max(radius_gap, std::abs(mom.second_moment_radius - n));
            variance_gap = std::max({variance_gap, std::abs(mom.component_variances[0] - half),
                                     std::abs(mom.component_variances[1] - half)});
            covariance_gap = std::max(covariance_gap, std::abs(mom.component_covariance));
            report.rows.push_back({p, n, "second_moment_radius", mom.second_moment_radius});
            report.rows.push_back({p, n, "var_x", mom.component_variances[0]});
            report.rows.push_back({p, n, "var_y", mom.component_variances[1]});
            report.rows.push_back({p, n, "states", static_cast<double>(law.size())});
        }
        const auto rational = exact_count_distribution_rational(kRationalOracleCap, p);
        double rational_gap = 0.0;
        for (const auto& [key, m] : rational.mass) {
            rational_gap = std::max(rational_gap, std::abs(m.convert_to<double>() -
                                                           levels[kRationalOracleCap].probability(unpack<kDirections>(key))));
        }
        const bool rational_mass_exact = rational.total() == Rational(1);

        push(report, bound_check("oracle", "total_mass", 2, mass_gap, kMassTolerance), p, kOracleMaxLevel);
        push(report, bound_check("oracle", "chapman_kolmogorov", 2, ck_gap, kExactTolerance), p, kOracleMaxLevel);
        push(report, bound_check("oracle", "rotation_invariance", 2, rotation_gap, kExactTolerance), p, kOracleMaxLevel);
        push(report, bound_check("oracle", "dp_vs_enumeration", 2, enum_gap, kExactTolerance), p, kKernelMaxTotal);
        push(report, bound_check("oracle", "float_vs_rational", 2, rational_gap, kExactTolerance), p, kRationalOracleCap);
        push(report, make_check("oracle", "rational_mass_exactly_one", 2, rational_mass_exact ? 0.0 : 1.0, 0.0,
                                CheckKind::Tolerance, rational_mass_exact), p, kRationalOracleCap);
        push(report, bound_check("oracle", "mean_zero", 3, mean_gap, kMeanTolerance), p, kOracleMaxLevel);
        push(report, bound_check("oracle", "second_moment_equals_n", 3, radius_gap, kMomentTolerance), p, kOracleMaxLevel);
        push(report, bound_check("oracle", "component_variance_half_n", 3, variance_gap, kMomentTolerance), p,
             kOracleMaxLevel);
        push(report, bound_check("oracle", "covariance_zero", 3, covariance_gap, kMomentTolerance), p, kOracleMaxLevel);
        push(report, bound_check("urn", "axis_oracle_vs_folded_direction_oracle", 0, axis_gap, kExactTolerance), p,
             kAxisOracleHorizon);
    }

    // Independent route to the limit variance: one uniform step has E[x^2] = E[y^2] = 1/2.
    double ex2 = 0.0, ey2 = 0.0;
    for (int k = 0; k < kDirections; ++k) {
        const Cartesian xy = to_cartesian(unit_step(Direction(k)));
        ex2 += xy.x * xy.x / kDirections;
        ey2 += xy.y * xy.y / kDirections;
    }
    push(report, bound_check("oracle", "uniform_step_component_variance", 3,
                             std::max(std::abs(ex2 - kCltVariance), std::abs(ey2 - kCltVariance)), kExactTolerance),
         0.0, 1);

    // Mean replacement matrix: doubly stochastic, second eigenvalue p.
    double stochastic_gap = 0.0, eigen_gap = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        const auto r = mean_replacement_matrix(p);
        for (int a = 0; a < kAxes; ++a) {
            double row = 0.0, col = 0.0;
            for (int b = 0; b < kAxes; ++b) {
                row += r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                col += r[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
            }
            stochastic_gap = std::max({stochastic_gap, std::abs(row - 1.0), std::abs(col - 1.0)});
        }
        // (1, -1, 0) is orthogonal to the all-ones vector; R v = lambda v.
        const double lambda = r[0][0] - r[0][1];
        const double second = r[1][0] - r[1][1];
        eigen_gap = std::max({eigen_gap, std::abs(lambda - p), std::abs(second + p), std::abs(r[2][0] - r[2][1])});
    }
    push(report, bound_check("urn", "replacement_matrix_doubly_stochastic", 0, stochastic_gap, kExactTolerance),
         std::nullopt, std::nullopt);
    push(report, bound_check("urn", "replacement_matrix_second_eigenvalue", 0, eigen_gap, kExactTolerance), std::nullopt,
         std::nullopt);
    return report;
}

// ---------------------------------------------------------------------------
// Sampler fidelity

Report run_fidelity(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    Report report;
    report.experiment = "fidelity";
    const std::int64_t reps = 100 * config.replications;
    for (double p : config.p_grid) {
        const auto law = exact_count_distribution(kFidelityHorizon, p);
        for (Sampler sampler : {Sampler::History, Sampler::Counts, Sampler::Decomposed}) {
            const std::uint64_t key = derive_seed(config.base_seed, {kTagFidelity, tag_of(p), sampler_tag(sampler)});
            std::vector<std::uint64_t> keys(static_cast<std::size_t>(reps));
            parallel_for(reps, options.threads, [&](std::int64_t rep) {
                const WalkParams params{p, kFidelityHorizon, derive_seed(key, {static_cast<std::uint64_t>(rep)})};
                keys[static_cast<std::size_t>(rep)] = pack<kDirections>(sample_final_counts(sampler, params).c);
            });
            const auto r = histogram_vs_law(keys, law, config.significance);
            push(report, chi_square_check("fidelity", "count_histogram_vs_oracle", 4, r, config.significance), p,
                 kFidelityHorizon, to_string(sampler));
            report.rows.push_back({p, kFidelityHorizon, to_string(sampler) + "_chi_square", r.statistic});
            report.rows.push_back({p, kFidelityHorizon, to_string(sampler) + "_p_value", r.p_value});
        }

        // Axis marginal of the literal walk and the urn sampler against the three-colour oracle.
        const auto axis_law = exact_axis_distribution(kAxisOracleHorizon, p);
        {
            const std::uint64_t key = derive_seed(config.base_seed, {kTagAxisFidelity, tag_of(p)});
            std::vector<std::uint64_t> keys(static_cast<std::size_t>(reps));
            parallel_for(reps, options.threads, [&](std::int64_t rep) {
                const WalkParams params{p, kAxisOracleHorizon, derive_seed(key, {static_cast<std::uint64_t>(rep)})};
                keys[static_cast<std::size_t>(rep)] = pack<kAxes>(axis_counts(simulate_history(params).counts()).c);
            });
            const auto r = histogram_vs_law(keys, axis_law, config.significance);
            push(report, chi_square_check("urn", "history_axis_counts_vs_urn_oracle", 0, r, config.significance), p,
                 kAxisOracleHorizon, "history");
        }
        {
            const std::uint64_t key = derive_seed(config.base_seed, {kTagUrnFidelity, tag_of(p)});
            std::vector<std::uint64_t> keys(static_cast<std::size_t>(reps));
            parallel_for(reps, options.threads, [&](std::int64_t rep) {
                const auto path = simulate_urn_counts(kAxisOracleHorizon, p, derive_seed(key, {static_cast<std::uint64_t>(rep)}));
                keys[static_cast<std::size_t>(rep)] = pack<kAxes>(path.back().c);
            });
            const auto r = histogram_vs_law(keys, axis_law, config.significance);
            push(report, chi_square_check("urn", "urn_sampler_vs_urn_oracle", 0, r, config.significance), p,
                 kAxisOracleHorizon, "urn");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sign sequence: fair i.i.d. signs independent of the axes

Report run_sign_battery(const ExperimentConfig& config, const RunOptions&) {
    return run_sign_battery(config, TrajectorySampler(simulate_history));
}

Report run_sign_battery(const ExperimentConfig& config, const TrajectorySampler& sampler) {
    validate(config);
    Report report;
    report.experiment = "signs";
    const std::int64_t n = 10 * max_horizon(config);
    const double m = static_cast<double>(n);
    for (double p : config.p_grid) {
        const Trajectory t = sampler(WalkParams{p, n, derive_seed(config.base_seed, {kTagSigns, tag_of(p)})});
        if (t.length() != n) throw std::runtime_error("trajectory sampler returned the wrong length");
        const Decomposition d = decompose_trajectory(t);

        std::int64_t plus = 0;
        for (Sign s : d.signs) plus += s == Sign::Plus ? 1 : 0;
        const double z = stats::fair_coin_z(plus, n);
        push(report, bound_check("signs", "sign_frequency_z", 5, std::abs(z), kSigmaBound), p, n);
        report.rows.push_back({p, n, "sign_plus_fraction", static_cast<double>(plus) / m});

        for (int lag = 1; lag <= kMaxLag; ++lag) {
            double acc = 0.0;
            for (std::int64_t i = 0; i + lag < n; ++i) {
                acc += value(d.signs[static_cast<std::size_t>(i)]) * value(d.signs[static_cast<std::size_t>(i + lag)]);
            }
            const double r = acc / static_cast<double>(n - lag);
            push(report, bound_check("signs", "sign_autocorrelation_lag" + std::to_string(lag), 5, std::abs(r),
                                     kSigmaBound / std::sqrt(m)),
                 p, n);
            report.rows.push_back({p, n, "sign_autocorrelation_lag" + std::to_string(lag), r});
        }

        std::vector<std::vector<std::int64_t>> sign_axis(2, std::vector<std::int64_t>(kAxes, 0));
        std::vector<std::vector<std::int64_t>> sign_pairs(2, std::vector<std::int64_t>(2, 0));
        for (std::int64_t i = 0; i < n; ++i) {
            const auto row = static_cast<std::size_t>(d.signs[static_cast<std::size_t>(i)] == Sign::Plus ? 0 : 1);
            ++sign_axis[row][static_cast<std::size_t>(d.axes[static_cast<std::size_t>(i)].slot())];
            if (i + 1 < n) {
                ++sign_pairs[row][d.signs[static_cast<std::size_t>(i + 1)] == Sign::Plus ? 0 : 1];
            }
        }
        int live_axes = 0;
        for (int a = 0; a < kAxes; ++a) {
            live_axes += sign_axis[0][static_cast<std::size_t>(a)] + sign_axis[1][static_cast<std::size_t>(a)] > 0 ? 1 : 0;
        }
        if (live_axes >= 2) {
            const auto r = stats::chi_square_independence(sign_axis, config.significance);
            push(report, chi_square_check("signs", "sign_axis_independence", 5, r, config.significance), p, n);
        } else {
            // One visited axis: independence from the axis is vacuous.
            report.rows.push_back({p, n, "sign_axis_independence_not_applicable", 1.0});
        }
        const auto pairs = stats::chi_square_independence(sign_pairs, config.significance);
        push(report, chi_square_check("signs", "consecutive_sign_independence", 5, pairs, config.significance), p, n);

        for (int j = 1; j <= kAxes; ++j) {
            const auto& times = d.tau.of(Axis(j));
            report.rows.push_back({p, n, "axis" + std::to_string(j) + "_visits", static_cast<double>(times.size())});
            if (times.empty()) continue;
            std::int64_t up = 0;
            for (auto tau : times) up += d.signs[static_cast<std::size_t>(tau - 1)] == Sign::Plus ? 1 : 0;
            const double za = stats::fair_coin_z(up, static_cast<std::int64_t>(times.size()));
            push(report, bound_check("signs", "axis" + std::to_string(j) + "_substream_z", 5, std::abs(za), kSigmaBound),
                 p, n);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Axis counts: axis fractions tend to 1/3

Report run_axis_fractions(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    Report report;
    report.experiment = "axis_fractions";
    const std::int64_t top = max_horizon(config);
    const std::int64_t n_mean = std::max<std::int64_t>(1, top / 10);
    const std::int64_t reps = config.replications;
    for (double p : config.p_grid) {
        std::array<std::array<stats::Summary, kAxes>, 2> by_sampler{};
        int sampler_index = 0;
        for (Sampler sampler : {Sampler::Counts, Sampler::Decomposed}) {
            const std::uint64_t key = derive_seed(config.base_seed, {kTagAxisMeans, tag_of(p), sampler_tag(sampler)});
            std::array<std::vector<double>, kAxes> fractions;
            for (auto& f : fractions) f.resize(static_cast<std::size_t>(reps));
            parallel_for(reps, options.threads, [&](std::int64_t rep) {
                const WalkParams params{p, n_mean, derive_seed(key, {static_cast<std::uint64_t>(rep)})};
                const CountVector3 c = axis_counts(sample_final_counts(sampler, params));
                for (int i = 0; i < kAxes; ++i) {
                    fractions[static_cast<std::size_t>(i)][static_cast<std::size_t>(rep)] =
                        static_cast<double>(c[i]) / static_cast<double>(n_mean);
                }
            });
            for (int i = 0; i < kAxes; ++i) {
                const auto s = stats::summarize(fractions[static_cast<std::size_t>(i)]);
                by_sampler[static_cast<std::size_t>(sampler_index)][static_cast<std::size_t>(i)] = s;
                const std::string axis = "axis" + std::to_string(i + 1);
                report.rows.push_back({p, n_mean, to_string(sampler) + "_" + axis + "_mean_fraction", s.mean});
                report.rows.push_back({p, n_mean, to_string(sampler) + "_" + axis + "_standard_error", s.standard_error()});
                if (sampler == Sampler::Counts) {
                    push(report, bound_check("axis_fractions", axis + "_mean_fraction_gap", 6, std::abs(s.mean - 1.0 / 3.0),
                                             kSigmaBound * s.standard_error()),
                         p, n_mean, to_string(sampler));
                }
            }
            ++sampler_index;
        }
        for (int i = 0; i < kAxes; ++i) {
            const auto& a = by_sampler[0][static_cast<std::size_t>(i)];
            const auto& b = by_sampler[1][static_cast<std::size_t>(i)];
            const double se = std::hypot(a.standard_error(), b.standard_error());
            push(report, bound_check("agreement", "axis" + std::to_string(i + 1) + "_fraction_counts_vs_decomposed", 0,
                                     std::abs(a.mean - b.mean), kSigmaBound * se),
                 p, n_mean);
        }

        // One long path; deviations read off at geometric checkpoints.
        const std::vector<std::int64_t> checkpoints{top, 10 * top, 100 * top};
        CountWalker walker(p, derive_seed(config.base_seed, {kTagAxisPath, tag_of(p)}));
        std::vector<double> deviations;
        for (auto checkpoint : checkpoints) {
            while (walker.steps_taken() < checkpoint) walker.step();
            const double dev = axis_fraction_deviation(axis_counts(walker.counts()));
            deviations.push_back(dev);
            report.rows.push_back({p, checkpoint, "single_path_max_deviation", dev});
        }
        UrnWalker urn(p, derive_seed(config.base_seed, {kTagAxisPath, tag_of(p), 0xA11}));
        for (std::int64_t m = 0; m < checkpoints.back(); ++m) urn.draw();
        report.rows.push_back({p, checkpoints.back(), "urn_single_path_max_deviation", axis_fraction_deviation(urn.counts())});

        if (p <= 0.5) {
            push(report, make_check("axis_fractions", "single_path_deviation", 6, deviations.back(), kAxisPathThreshold,
                                    CheckKind::Tolerance, deviations.back() < kAxisPathThreshold),
                 p, checkpoints.back(), "counts");
        } else if (p < 1.0) {
            const bool decreasing = deviations[1] < deviations[0] && deviations[2] < deviations[1];
            // statistic: largest ratio of consecutive deviations (must stay below 1).
            const double ratio = std::max(deviations[1] / deviations[0], deviations[2] / deviations[1]);
            push(report, make_check("axis_fractions", "single_path_deviation_decreasing", 6, ratio, 1.0, CheckKind::Trend, decreasing),
                 p, checkpoints.back(), "counts");
        } else {
            // At p = 1 the first axis is kept forever; no single-path limit exists.
            report.rows.push_back({p, checkpoints.back(), "single_path_not_applicable", 1.0});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Law of large numbers

Report run_lln(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    Report report;
    report.experiment = "lln";
    std::vector<std::int64_t> horizons(config.n_grid);
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    const std::int64_t reps = config.replications;

    for (double p : config.p_grid) {
        std::vector<double> mean_abs;
        std::array<stats::Summary, 2> radius_by_sampler{};
        for (auto n : horizons) {
            const auto key = derive_seed(config.base_seed, {kTagLln, tag_of(p), static_cast<std::uint64_t>(n),
                                                            sampler_tag(Sampler::Counts)});
            const auto positions = sample_positions(Sampler::Counts, p, n, reps, key, options);
            std::vector<double> abs_scaled, xs, ys, radius;
            for (const auto& pt : positions) {
                const Cartesian xy = to_cartesian(pt);
                const auto nn = static_cast<double>(n);
                abs_scaled.push_back(std::sqrt(static_cast<double>(pt.norm2())) / nn);
                xs.push_back(xy.x / nn);
                ys.push_back(xy.y / nn);
                radius.push_back(static_cast<double>(pt.norm2()) / nn);
            }
            const auto a = stats::summarize(abs_scaled);
            const auto sx = stats::summarize(xs);
            const auto sy = stats::summarize(ys);
            mean_abs.push_back(a.mean);
            report.rows.push_back({p, n, "mean_abs_S_over_n", a.mean});
            report.rows.push_back({p, n, "mean_abs_S_over_n_standard_error", a.standard_error()});
            report.rows.push_back({p, n, "mean_x_over_n", sx.mean});
            report.rows.push_back({p, n, "mean_y_over_n", sy.mean});
            push(report, bound_check("lln", "mean_x_over_n_zero", 7, std::abs(sx.mean), kSigmaBound * sx.standard_error()),
                 p, n, "counts");
            push(report, bound_check("lln", "mean_y_over_n_zero", 7, std::abs(sy.mean), kSigmaBound * sy.standard_error()),
                 p, n, "counts");
            if (n == horizons.back()) radius_by_sampler[0] = stats::summarize(radius);
        }
        for (std::size_t i = 0; i + 1 < horizons.size(); ++i) {
            const double expected = std::sqrt(static_cast<double>(horizons[i + 1]) / static_cast<double>(horizons[i]));
            const double ratio = mean_abs[i] / mean_abs[i + 1];
            report.rows.push_back({p, horizons[i + 1], "decay_ratio", ratio});
            push(report, bound_check("lln", "decay_ratio_relative_error", 7, std::abs(ratio / expected - 1.0),
                                     kLlnDecadeTolerance),
                 p, horizons[i + 1], "counts");
        }

        // Same statistic from the decomposed sampler at the top horizon.
        const std::int64_t n = horizons.back();
        const auto key = derive_seed(config.base_seed, {kTagLln, tag_of(p), static_cast<std::uint64_t>(n),
                                                        sampler_tag(Sampler::Decomposed)});
        const auto positions = sample_positions(Sampler::Decomposed, p, n, reps, key, options);
        std::vector<double> radius;
        for (const auto& pt : positions) radius.push_back(static_cast<double>(pt.norm2()) / static_cast<double>(n));
        radius_by_sampler[1] = stats::summarize(radius);
        const auto& a = radius_by_sampler[0];
        const auto& b = radius_by_sampler[1];
        report.rows.push_back({p, n, "counts_mean_norm2_over_n", a.mean});
        report.rows.push_back({p, n, "decomposed_mean_norm2_over_n", b.mean});
        push(report, bound_check("agreement", "mean_norm2_counts_vs_decomposed", 0, std::abs(a.mean - b.mean),
                                 kSigmaBound * std::hypot(a.standard_error(), b.standard_error())),
             p, n);
        push(report, bound_check("agreement", "mean_norm2_equals_n", 0, std::abs(a.mean - 1.0), kSigmaBound * a.standard_error()),
             p, n, "counts");
    }
    return report;
}

// ---------------------------------------------------------------------------
// Central limit theorem

CltSummary summarize_clt(const std::vector<double>& xs, const std::vector<double>& ys) {
    CltSummary s;
    const auto sx = stats::summarize(xs);
    const auto sy = stats::summarize(ys);
    s.mean_x = sx.mean;
    s.mean_y = sy.mean;
    s.var_x = sx.variance;
    s.var_y = sy.variance;
    s.covariance = stats::covariance(xs, ys);
    const double mid = 0.5 * (s.var_x + s.var_y);
    const double spread = std::hypot(0.5 * (s.var_x - s.var_y), s.covariance);
    s.isotropy = mid + spread > 0.0 ? (mid - spread) / (mid + spread) : 0.0;
    return s;
}

Report run_clt(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    Report report;
    report.experiment = "clt";
    const std::int64_t n = max_horizon(config);
    const std::int64_t reps = 10 * config.replications;
    const std::int64_t cross_reps = std::max<std::int64_t>(2, reps / 10);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double sigma = std::sqrt(kCltVariance);

    std::vector<double> ps;
    std::vector<std::vector<double>> all_x, all_y;
    for (double p : config.p_grid) {
        if (p >= 1.0) {
            // At p = 1 the walk never leaves its first axis; no planar Gaussian limit.
            report.rows.push_back({p, n, "clt_not_applicable", 1.0});
            continue;
        }
        const auto key = derive_seed(config.base_seed, {kTagClt, tag_of(p), static_cast<std::uint64_t>(n),
                                                        sampler_tag(Sampler::Counts)});
        const auto counts = sample_counts(Sampler::Counts, p, n, reps, key, options);
        std::vector<double> xs, ys;
        // Components divided by their standard deviation given the axis counts.
        std::vector<double> cond_x, cond_y;
        std::vector<double> axis3_fraction;
        xs.reserve(counts.size());
        ys.reserve(counts.size());
        for (const auto& c : counts) {
            const Cartesian xy = to_cartesian(position_from_counts(c));
            xs.push_back(xy.x * scale);
            ys.push_back(xy.y * scale);
            const CountVector3 a = axis_counts(c);
            const double off_axis = static_cast<double>(a[0] + a[1]);
            const double sd_x = std::sqrt(static_cast<double>(a[2]) + off_axis / 4.0);
            const double sd_y = std::sqrt(0.75 * off_axis);
            cond_x.push_back(xy.x / sd_x);
            if (sd_y > 0.0) cond_y.push_back(xy.y / sd_y);
            axis3_fraction.push_back(static_cast<double>(a[2]) / static_cast<double>(n));
        }
        const CltSummary s = summarize_clt(xs, ys);
        report.rows.push_back({p, n, "mean_x", s.mean_x});
        report.rows.push_back({p, n, "mean_y", s.mean_y});
        report.rows.push_back({p, n, "var_x", s.var_x});
        report.rows.push_back({p, n, "var_y", s.var_y});
        report.rows.push_back({p, n, "covariance", s.covariance});
        report.rows.push_back({p, n, "isotropy", s.isotropy});
        push(report, bound_check("clt", "var_x", 8, std::abs(s.var_x - kCltVariance), kCltVarianceTolerance), p, n, "counts");
        push(report, bound_check("clt", "var_y", 8, std::abs(s.var_y - kCltVariance), kCltVarianceTolerance), p, n, "counts");
        push(report, bound_check("clt", "covariance", 8, std::abs(s.covariance), kCltVarianceTolerance), p, n, "counts");
        const auto kx = stats::ks_gaussian_test(xs, sigma, config.significance);
        const auto ky = stats::ks_gaussian_test(ys, sigma, config.significance);
        report.rows.push_back({p, n, "ks_x", kx.statistic});
        report.rows.push_back({p, n, "ks_y", ky.statistic});
        push(report, ks_check("clt", "ks_gaussian_x", 8, kx), p, n, "counts");
        push(report, ks_check("clt", "ks_gaussian_y", 8, ky), p, n, "counts");

        // Given the axis counts the signs are fair coins, so S_n is a Gaussian
        // scale mixture; at large p the axis fractions relax like n^(p-1).
        const auto fraction = stats::summarize(axis3_fraction);
        report.rows.push_back({p, n, "axis3_fraction_sd", std::sqrt(fraction.variance)});
        const auto cx = stats::ks_gaussian_test(cond_x, 1.0, config.significance);
        const auto cy = stats::ks_gaussian_test(cond_y, 1.0, config.significance);
        report.rows.push_back({p, n, "ks_conditional_x", cx.statistic});
        report.rows.push_back({p, n, "ks_conditional_y", cy.statistic});
        push(report, ks_check("clt_mixture", "ks_conditional_x", 0, cx), p, n, "counts");
        push(report, ks_check("clt_mixture", "ks_conditional_y", 0, cy), p, n, "counts");

        for (int axis = 0; axis < 2; ++axis) {
            Histogram h;
            h.label = "p" + std::to_string(p).substr(0, 4) + (axis == 0 ? "_x" : "_y");
            h.left = -4.0;
            h.width = 0.1;
            h.counts.assign(80, 0);
            for (double v : axis == 0 ? xs : ys) {
                const double bin = std::floor((v - h.left) / h.width);
                if (bin >= 0 && bin < 80) ++h.counts[static_cast<std::size_t>(bin)];
            }
            report.histograms.push_back(std::move(h));
        }

        // Decomposed sampler on a tenth of the replications.
        const auto dkey = derive_seed(config.base_seed, {kTagClt, tag_of(p), static_cast<std::uint64_t>(n),
                                                         sampler_tag(Sampler::Decomposed)});
        const auto dpos = sample_positions(Sampler::Decomposed, p, n, cross_reps, dkey, options);
        std::vector<double> dx, dy;
        for (const auto& pt : dpos) {
            const Cartesian xy = to_cartesian(pt);
            dx.push_back(xy.x * scale);
            dy.push_back(xy.y * scale);
        }
        const CltSummary ds = summarize_clt(dx, dy);
        report.rows.push_back({p, n, "decomposed_var_x", ds.var_x});
        report.rows.push_back({p, n, "decomposed_var_y", ds.var_y});
        // Var of a sample variance is about 2 sigma^4 / R for near-Gaussian data.
        const double se = std::sqrt(2.0 * kCltVariance * kCltVariance *
                                    (1.0 / static_cast<double>(reps) + 1.0 / static_cast<double>(cross_reps)));
        push(report, bound_check("agreement", "var_x_counts_vs_decomposed", 0, std::abs(s.var_x - ds.var_x), kSigmaBound * se),
             p, n);
        push(report, bound_check("agreement", "var_y_counts_vs_decomposed", 0, std::abs(s.var_y - ds.var_y), kSigmaBound * se),
             p, n);

        ps.push_back(p);
        all_x.push_back(std::move(xs));
        all_y.push_back(std::move(ys));
    }

    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const auto kx = stats::ks_two_sample(all_x[i], all_x[j], config.significance);
            const auto ky = stats::ks_two_sample(all_y[i], all_y[j], config.significance);
            const std::string pair = "p" + std::to_string(ps[i]).substr(0, 4) + "_vs_p" + std::to_string(ps[j]).substr(0, 4);
            push(report, ks_check("p_independence", "two_sample_ks_x_" + pair, 8, kx), ps[j], n, "counts");
            push(report, ks_check("p_independence", "two_sample_ks_y_" + pair, 8, ky), ps[j], n, "counts");
            report.rows.push_back({ps[j], n, "two_sample_ks_x_" + pair, kx.statistic});
            report.rows.push_back({ps[j], n, "two_sample_ks_y_" + pair, ky.statistic});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Battery

PolicyOutcome apply_policy(const std::vector<Check>& checks, double significance) {
    PolicyOutcome out;
    for (const auto& c : checks) {
        if (c.kind == CheckKind::Statistical) {
            ++out.statistical_tests;
            out.rejections += c.pass ? 0 : 1;
        } else {
            out.failed_hard_checks += c.pass ? 0 : 1;
        }
    }
    out.expected_false_positives = significance * out.statistical_tests;
    out.allowed_rejections = static_cast<int>(std::floor(2.0 * out.expected_false_positives));
    out.pass = out.failed_hard_checks == 0 && out.rejections <= out.allowed_rejections;
    return out;
}

std::vector<Check> BatteryResult::all_checks() const {
    std::vector<Check> out;
    for (const auto& r : reports) out.insert(out.end(), r.checks.begin(), r.checks.end());
    return out;
}

BatteryResult run_battery(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    BatteryResult result;
    result.config = config;
    result.reports.push_back(run_kernel_consistency(config));
    result.reports.push_back(run_oracle_checks(config));
    result.reports.push_back(run_fidelity(config, options));
    result.reports.push_back(run_sign_battery(config, options));
    result.reports.push_back(run_axis_fractions(config, options));
    result.reports.push_back(run_lln(config, options));
    result.reports.push_back(run_clt(config, options));
    result.policy = apply_policy(result.all_checks(), config.significance);
    return result;
}

}  // namespace erwhex
