#pragma once

// File formats: CSV tables ('.' decimals, '\n' endings, header always on,
// 17 significant digits), the flat key = value experiment config, JSON
// summaries and run manifests.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "erwhex/harness.hpp"
#include "erwhex/oracle.hpp"
#include "erwhex/urn.hpp"

namespace erwhex::io {

inline constexpr std::string_view kToolVersion = "0.1.0";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double x);

/// Parses `key = value` lines ('#' starts a comment). Keys: p_grid, n_grid,
/// replications, base_seed, significance; grids are comma separated.
/// Throws std::invalid_argument on unknown keys or malformed values.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string config_to_text(const ExperimentConfig& config);

std::vector<double> parse_real_list(const std::string& text);
std::vector<std::int64_t> parse_integer_list(const std::string& text);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string oracle_table_csv(const CountDistribution& law);
std::string oracle_table_csv(const RationalCountDistribution& law);
std::string moments_csv(int n, double p, const MomentReport& m);
std::string positions_csv(const std::vector<LatticePoint>& positions);
/// rep,step_index,direction_k,u,v
std::string trajectories_csv(const std::vector<Trajectory>& trajectories);
std::string decomposition_csv(const Trajectory& t);
std::string urn_path_csv(const std::vector<CountVector3>& path);
std::string rows_csv(const std::vector<Report>& reports);
std::string checks_csv(const std::vector<Check>& checks);
std::string histogram_csv(const Histogram& h);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const Check& check);
nlohmann::json summary_json(const BatteryResult& result);

struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t base_seed = 0;
    std::vector<std::string> outputs;  // file names relative to the output directory
};

/// 64-bit FNV-1a over the manifest fields (timestamp excluded) and the bytes of every output file.
std::string reproducibility_hash(const RunManifest& manifest, const std::filesystem::path& dir);

/// Writes manifest.json into dir. The timestamp honours SOURCE_DATE_EPOCH.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace erwhex::io
