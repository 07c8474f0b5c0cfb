#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "erwhex/io.hpp"
#include "erwhex/stats.hpp"

namespace fs = std::filesystem;
using erwhex::io::read_file;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string("SOURCE_DATE_EPOCH=1700000000 ") + ERWHEX_CLI_PATH + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("erwhex_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("simulate writes positions and a reproducible manifest") {
    const fs::path a = scratch("sim_a");
    const fs::path b = scratch("sim_b");
    REQUIRE(run("simulate --p 0.5 --n 1000 --reps 100 --seed 7 --mode counts --out " + a.string()) == 0);
    REQUIRE(run("simulate --p 0.5 --n 1000 --reps 100 --seed 7 --mode counts --threads 3 --out " + b.string()) == 0);
    const auto rows = read_csv(a / "positions.csv");
    REQUIRE(rows.size() == 101);
    CHECK(rows[0] == std::vector<std::string>{"rep", "u", "v", "x", "y"});
    CHECK(read_file(a / "positions.csv") == read_file(b / "positions.csv"));
    CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));
    const auto manifest = nlohmann::json::parse(read_file(a / "manifest.json"));
    CHECK(manifest["prng"] == "xoshiro256**/splitmix64-stream-v1");
    CHECK(manifest["parameters"]["mode"] == "counts");
    CHECK(manifest["base_seed"] == 7);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("simulate trajectories and errors") {
    const fs::path dir = scratch("sim_traj");
    REQUIRE(run("simulate --p 0.9 --n 50 --reps 3 --seed 1 --mode history --trajectories --out " + dir.string()) == 0);
    const auto rows = read_csv(dir / "trajectories.csv");
    CHECK(rows.size() == 1 + 3 * 50);
    // The last trajectory row of each replication matches its final position.
    const auto positions = read_csv(dir / "positions.csv");
    CHECK(rows[50][3] == positions[1][1]);
    CHECK(rows[50][4] == positions[1][2]);
    CHECK(run("simulate --p 1.5 --n 10 --out " + dir.string()) == 2);
    CHECK(run("simulate --p 0.5 --n 0 --out " + dir.string()) == 2);
    CHECK(run("simulate --p 0.5 --n 20000 --trajectories --out " + dir.string()) == 2);
    CHECK(run("simulate --p 0.5 --n 10 --mode bogus --out " + dir.string()) == 2);
    CHECK(run("simulate --p 0.5 --n 10 --out /proc/erwhex_forbidden") == 3);
    CHECK(run("frobnicate") == 2);
    CHECK(run("simulate --nonsense 3") == 2);
    fs::remove_all(dir);
}

TEST_CASE("oracle command") {
    const fs::path dir = scratch("oracle");
    REQUIRE(run("oracle --n 1 --p 0.7 --out " + dir.string()) == 0);
    auto rows = read_csv(dir / "oracle_table.csv");
    REQUIRE(rows.size() == 7);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][6]) == doctest::Approx(1.0 / 6).epsilon(1e-15));

    REQUIRE(run("oracle --n 2 --p 1 --out " + dir.string()) == 0);
    rows = read_csv(dir / "oracle_table.csv");
    REQUIRE(rows.size() == 10);
    int doubled = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double m = std::stod(rows[i][6]);
        if (m == doctest::Approx(1.0 / 12).epsilon(1e-15)) ++doubled;
        else CHECK(m == doctest::Approx(1.0 / 6).epsilon(1e-15));
    }
    CHECK(doubled == 6);

    REQUIRE(run("oracle --n 20 --p 0.9 --out " + dir.string()) == 0);
    const auto moments = read_csv(dir / "oracle_moments.csv");
    REQUIRE(moments.size() == 2);
    CHECK(moments[0][7] == "second_moment_radius");
    CHECK(std::abs(std::stod(moments[1][7]) - 20.0) <= 1e-9);

    REQUIRE(run("oracle --n 3 --p 0.5 --mode rational --out " + dir.string()) == 0);
    CHECK(read_file(dir / "oracle_table.csv").find("# mode=rational") != std::string::npos);
    CHECK(run("oracle --n 31 --p 0.5 --out " + dir.string()) == 2);
    CHECK(run("oracle --n 12 --p 0.5 --mode rational --out " + dir.string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("decompose and urn commands") {
    const fs::path dir = scratch("decompose");
    REQUIRE(run("decompose --p 0.6 --n 200 --seed 4 --out " + dir.string()) == 0);
    const auto rows = read_csv(dir / "decomposition.csv");
    REQUIRE(rows.size() == 201);
    CHECK(rows[0] == std::vector<std::string>{"step_index", "direction_k", "sign", "axis"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int k = std::stoi(rows[i][1]);
        CHECK(std::stoi(rows[i][2]) == (k % 2 == 0 ? 1 : -1));
    }
    REQUIRE(run("urn --p 0.6 --n 300 --seed 4 --out " + dir.string()) == 0);
    const auto urn = read_csv(dir / "urn_path.csv");
    REQUIRE(urn.size() == 301);
    CHECK(urn[0] == std::vector<std::string>{"n", "C1", "C2", "C3"});
    CHECK(std::stoi(urn[300][1]) + std::stoi(urn[300][2]) + std::stoi(urn[300][3]) == 300);
    fs::remove_all(dir);
}

TEST_CASE("decomposed and count samplers agree through the CLI") {
    const fs::path a = scratch("agree_counts");
    const fs::path b = scratch("agree_decomposed");
    REQUIRE(run("simulate --p 0.7 --n 1000 --reps 100000 --seed 11 --mode counts --out " + a.string()) == 0);
    REQUIRE(run("simulate --p 0.7 --n 1000 --reps 100000 --seed 12 --mode decomposed --out " + b.string()) == 0);
    auto load = [](const fs::path& dir, int column) {
        std::vector<double> xs;
        const auto rows = read_csv(dir / "positions.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) xs.push_back(std::stod(rows[i][static_cast<std::size_t>(column)]));
        return xs;
    };
    for (int column : {3, 4}) {
        const auto sa = erwhex::stats::summarize(load(a, column));
        const auto sb = erwhex::stats::summarize(load(b, column));
        CHECK(std::abs(sa.mean - sb.mean) <= 4.0 * std::hypot(sa.standard_error(), sb.standard_error()));
        // sd of a sample variance ~ sigma^2 sqrt(2/R) per sample
        const double se_var = 500.0 * std::sqrt(2.0 / 100000.0);
        CHECK(std::abs(sa.variance - sb.variance) <= 4.0 * std::sqrt(2.0) * se_var);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("verify reads a config file and writes reports") {
    const fs::path dir = scratch("verify");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "battery.cfg");
        cfg << "p_grid = 0.5, 1\nn_grid = 10, 100\nreplications = 100\nbase_seed = 3\n";
    }
    const fs::path out = dir / "out";
    const int code = run("verify --config " + (dir / "battery.cfg").string() + " --threads 2 --out " + out.string());
    CHECK((code == 0 || code == 1));
    const auto summary = nlohmann::json::parse(read_file(out / "verify_summary.json"));
    CHECK(summary["config"]["replications"] == 100);
    CHECK(summary["checks"].size() > 50);
    CHECK(summary["pass"].get<bool>() == (code == 0));
    CHECK(read_csv(out / "verify_checks.csv")[0][0] == "suite");
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(run("verify --config " + (dir / "missing.cfg").string() + " --out " + out.string()) == 3);
    CHECK(run("verify --p-grid 0.5,7 --out " + out.string()) == 2);
    fs::remove_all(dir);
}
