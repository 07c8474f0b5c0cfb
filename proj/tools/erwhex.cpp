// erwhex: simulate, enumerate and verify the elephant random walk on the
// triangular lattice.
//
// Exit codes: 0 success, 1 statistical failure, 2 usage error, 3 I/O error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "erwhex/harness.hpp"
#include "erwhex/io.hpp"
#include "erwhex/oracle.hpp"
#include "erwhex/parallel.hpp"
#include "erwhex/rng.hpp"
#include "erwhex/urn.hpp"
#include "erwhex/walk.hpp"

namespace fs = std::filesystem;
using namespace erwhex;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitStatistical = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr std::int64_t kTrajectoryDumpCap = 10000;
constexpr std::int64_t kDecomposeCap = 10000000;

struct Common {
    double p = 0.5;
    std::int64_t n = 1000;
    std::int64_t reps = 1;
    std::uint64_t seed = 1;
    std::string out = ".";
    int threads = 0;
};

fs::path prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw io::IoError("cannot create output directory " + out + ": " + ec.message());
    return fs::path(out);
}

Trajectory trajectory_for(Sampler mode, const WalkParams& params) {
    switch (mode) {
        case Sampler::History: return simulate_history(params);
        case Sampler::Decomposed: return simulate_decomposed_walk(params);
        case Sampler::Counts: {
            validate(params);
            CountWalker walker(params.p, params.seed);
            Trajectory t;
            t.steps.reserve(static_cast<std::size_t>(params.n));
            for (std::int64_t m = 0; m < params.n; ++m) t.steps.push_back(walker.step());
            return t;
        }
    }
    throw std::invalid_argument("unknown mode");
}

int cmd_simulate(const Common& c, const std::string& mode_name, bool dump_trajectories) {
    const Sampler mode = sampler_from_string(mode_name);
    validate(WalkParams{c.p, c.n, c.seed});
    if (c.reps < 1) throw std::invalid_argument("--reps must be at least 1");
    if (dump_trajectories && c.n > kTrajectoryDumpCap) {
        throw std::invalid_argument("trajectory dumps are limited to n <= " + std::to_string(kTrajectoryDumpCap));
    }
    const fs::path dir = prepare_out(c.out);
    const RunOptions options{resolve_threads(c.threads)};
    io::RunManifest manifest;
    manifest.command = "simulate";
    manifest.base_seed = c.seed;
    manifest.parameters = {{"p", c.p}, {"n", c.n}, {"reps", c.reps}, {"mode", mode_name},
                           {"trajectories", dump_trajectories}};

    const auto positions = sample_positions(mode, c.p, c.n, c.reps, c.seed, options);
    io::write_file(dir / "positions.csv", io::positions_csv(positions));
    manifest.outputs.push_back("positions.csv");
    if (dump_trajectories) {
        std::vector<Trajectory> trajectories(static_cast<std::size_t>(c.reps));
        parallel_for(c.reps, options.threads, [&](std::int64_t rep) {
            trajectories[static_cast<std::size_t>(rep)] =
                trajectory_for(mode, WalkParams{c.p, c.n, derive_seed(c.seed, {static_cast<std::uint64_t>(rep)})});
        });
        io::write_file(dir / "trajectories.csv", io::trajectories_csv(trajectories));
        manifest.outputs.push_back("trajectories.csv");
    }
    io::write_manifest(manifest, dir);
    return kExitPass;
}

int cmd_oracle(const Common& c, const std::string& mode, int cap) {
    const fs::path dir = prepare_out(c.out);
    if (c.n > cap || c.n < 1) throw std::invalid_argument("oracle horizon must lie in [1, " + std::to_string(cap) + "]");
    const int n = static_cast<int>(c.n);
    io::RunManifest manifest;
    manifest.command = "oracle";
    manifest.parameters = {{"p", c.p}, {"n", c.n}, {"mode", mode}, {"cap", cap}};
    if (mode == "float") {
        const auto law = exact_count_distribution(n, c.p, cap);
        io::write_file(dir / "oracle_table.csv", io::oracle_table_csv(law));
        io::write_file(dir / "oracle_moments.csv", io::moments_csv(n, c.p, moments_of(law)));
    } else if (mode == "rational") {
        const auto exact = exact_count_distribution_rational(n, c.p);
        io::write_file(dir / "oracle_table.csv", io::oracle_table_csv(exact));
        io::write_file(dir / "oracle_moments.csv", io::moments_csv(n, c.p, exact_moments(n, c.p, cap)));
    } else {
        throw std::invalid_argument("--mode must be float or rational");
    }
    manifest.outputs = {"oracle_table.csv", "oracle_moments.csv"};
    io::write_manifest(manifest, dir);
    return kExitPass;
}

int cmd_decompose(const Common& c, const std::string& mode_name) {
    const Sampler mode = sampler_from_string(mode_name);
    if (c.n > kDecomposeCap) throw std::invalid_argument("decompose is limited to n <= " + std::to_string(kDecomposeCap));
    const fs::path dir = prepare_out(c.out);
    const Trajectory t = trajectory_for(mode, WalkParams{c.p, c.n, c.seed});
    io::write_file(dir / "decomposition.csv", io::decomposition_csv(t));
    io::RunManifest manifest;
    manifest.command = "decompose";
    manifest.base_seed = c.seed;
    manifest.parameters = {{"p", c.p}, {"n", c.n}, {"mode", mode_name}};
    manifest.outputs = {"decomposition.csv"};
    io::write_manifest(manifest, dir);
    return kExitPass;
}

int cmd_urn(const Common& c) {
    if (c.n > kDecomposeCap) throw std::invalid_argument("urn paths are limited to n <= " + std::to_string(kDecomposeCap));
    const fs::path dir = prepare_out(c.out);
    io::write_file(dir / "urn_path.csv", io::urn_path_csv(simulate_urn_counts(c.n, c.p, c.seed)));
    io::RunManifest manifest;
    manifest.command = "urn";
    manifest.base_seed = c.seed;
    manifest.parameters = {{"p", c.p}, {"n", c.n}};
    manifest.outputs = {"urn_path.csv"};
    io::write_manifest(manifest, dir);
    return kExitPass;
}

struct ConfigFlags {
    std::string config_path;
    std::string p_grid;
    std::string n_grid;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double significance = 0.0;
};

ExperimentConfig resolve_config(const ConfigFlags& f) {
    ExperimentConfig config;
    if (!f.config_path.empty()) config = io::load_config(f.config_path);
    if (!f.p_grid.empty()) config.p_grid = io::parse_real_list(f.p_grid);
    if (!f.n_grid.empty()) config.n_grid = io::parse_integer_list(f.n_grid);
    if (f.reps > 0) config.replications = f.reps;
    if (f.seed_given) config.base_seed = f.seed;
    if (f.significance > 0.0) config.significance = f.significance;
    validate(config);
    return config;
}

void write_reports(const fs::path& dir, const std::string& prefix, const std::vector<Report>& reports,
                   const std::vector<Check>& checks, io::RunManifest& manifest) {
    io::write_file(dir / (prefix + "_rows.csv"), io::rows_csv(reports));
    io::write_file(dir / (prefix + "_checks.csv"), io::checks_csv(checks));
    manifest.outputs.push_back(prefix + "_rows.csv");
    manifest.outputs.push_back(prefix + "_checks.csv");
    for (const auto& r : reports) {
        for (const auto& h : r.histograms) {
            const std::string name = "hist_" + r.experiment + "_" + h.label + ".csv";
            io::write_file(dir / name, io::histogram_csv(h));
            manifest.outputs.push_back(name);
        }
    }
}

int cmd_verify(const ConfigFlags& flags, const std::string& out, int threads) {
    const ExperimentConfig config = resolve_config(flags);
    const fs::path dir = prepare_out(out);
    const BatteryResult result = run_battery(config, RunOptions{resolve_threads(threads)});
    io::RunManifest manifest;
    manifest.command = "verify";
    manifest.base_seed = config.base_seed;
    manifest.parameters = io::to_json(config);
    write_reports(dir, "verify", result.reports, result.all_checks(), manifest);
    io::write_file(dir / "verify_summary.json", io::summary_json(result).dump(2) + "\n");
    manifest.outputs.push_back("verify_summary.json");
    io::write_file(dir / "verify_config.txt", io::config_to_text(config));
    manifest.outputs.push_back("verify_config.txt");
    io::write_manifest(manifest, dir);

    const auto& policy = result.policy;
    for (const auto& c : result.all_checks()) {
        if (!c.pass) std::cerr << "FAILED " << c.suite << "/" << c.name << " statistic=" << io::format_double(c.statistic)
                               << " threshold=" << io::format_double(c.threshold) << "\n";
    }
    std::cout << "checks: " << result.all_checks().size() << ", statistical tests: " << policy.statistical_tests
              << ", rejections: " << policy.rejections << " (allowed " << policy.allowed_rejections
              << "), failed hard checks: " << policy.failed_hard_checks << "\n"
              << (policy.pass ? "PASS" : "FAIL") << "\n";
    return policy.pass ? kExitPass : kExitStatistical;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& out, int threads) {
    const ExperimentConfig config = resolve_config(flags);
    const fs::path dir = prepare_out(out);
    const RunOptions options{resolve_threads(threads)};
    std::vector<Report> reports{run_axis_fractions(config, options), run_lln(config, options), run_clt(config, options)};
    std::vector<Check> checks;
    for (const auto& r : reports) checks.insert(checks.end(), r.checks.begin(), r.checks.end());
    io::RunManifest manifest;
    manifest.command = "sweep";
    manifest.base_seed = config.base_seed;
    manifest.parameters = io::to_json(config);
    write_reports(dir, "sweep", reports, checks, manifest);
    io::write_manifest(manifest, dir);
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elephant random walk on the triangular lattice: samplers, exact oracle and verification battery"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(io::kToolVersion));

    Common common;
    auto add_common = [&](CLI::App* sub, bool with_reps) {
        sub->add_option("--p", common.p, "memory parameter in [0,1]");
        sub->add_option("--n", common.n, "horizon (number of steps)");
        if (with_reps) sub->add_option("--reps", common.reps, "replications");
        sub->add_option("--seed", common.seed, "base seed");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker threads (default: ERWHEX_THREADS or all cores)");
    };

    std::string mode = "counts";
    bool dump_trajectories = false;
    auto* simulate = app.add_subcommand("simulate", "sample final positions");
    add_common(simulate, true);
    simulate->add_option("--mode", mode, "history | counts | decomposed");
    simulate->add_flag("--trajectories", dump_trajectories, "also dump full trajectories (n <= 10^4)");

    std::string oracle_mode = "float";
    int cap = kDefaultOracleCap;
    auto* oracle = app.add_subcommand("oracle", "exact count distribution and moments");
    add_common(oracle, false);
    oracle->add_option("--mode", oracle_mode, "float | rational (rational needs n <= 10)");
    oracle->add_option("--cap", cap, "largest horizon the oracle accepts");

    std::string decompose_mode = "history";
    auto* decompose = app.add_subcommand("decompose", "sign/axis decomposition of one trajectory");
    add_common(decompose, false);
    decompose->add_option("--mode", decompose_mode, "history | counts | decomposed");

    auto* urn = app.add_subcommand("urn", "three-colour urn count path");
    add_common(urn, false);

    ConfigFlags flags;
    std::string battery_out = ".";
    int battery_threads = 0;
    auto add_battery = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "flat key = value config file");
        sub->add_option("--p-grid", flags.p_grid, "comma-separated memory parameters");
        sub->add_option("--n-grid", flags.n_grid, "comma-separated horizons");
        sub->add_option("--reps", flags.reps, "replications");
        sub->add_option("--seed", flags.seed, "base seed")->each([&](const std::string&) { flags.seed_given = true; });
        sub->add_option("--significance", flags.significance, "test significance");
        sub->add_option("--out", battery_out, "output directory");
        sub->add_option("--threads", battery_threads, "worker threads (default: ERWHEX_THREADS or all cores)");
    };
    auto* verify = app.add_subcommand("verify", "run the verification battery");
    add_battery(verify);
    auto* sweep = app.add_subcommand("sweep", "LLN, CLT and urn-fraction tables over a grid");
    add_battery(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(common, mode, dump_trajectories);
        if (*oracle) return cmd_oracle(common, oracle_mode, cap);
        if (*decompose) return cmd_decompose(common, decompose_mode);
        if (*urn) return cmd_urn(common);
        if (*verify) return cmd_verify(flags, battery_out, battery_threads);
        if (*sweep) return cmd_sweep(flags, battery_out, battery_threads);
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
