#include "erwhex/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <sstream>

#include "erwhex/rng.hpp"

namespace erwhex::io {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_number(const std::string& text, const char* what) {
    const std::string t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw std::invalid_argument(std::string("malformed ") + what + " '" + t + "'");
    }
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::string opt_double(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::string opt_int(const std::optional<std::int64_t>& x) { return x ? std::to_string(*x) : std::string(); }

void fnv(std::uint64_t& h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            t = static_cast<std::time_t>(std::stoll(epoch));
        } catch (const std::exception&) {
        }
    }
    std::tm utc{};
    gmtime_r(&t, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number<double>(item, "real"));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<std::int64_t> parse_integer_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number<std::int64_t>(item, "integer"));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig config) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "p_grid") {
            config.p_grid = parse_real_list(val);
        } else if (key == "n_grid") {
            config.n_grid = parse_integer_list(val);
        } else if (key == "replications") {
            config.replications = parse_number<std::int64_t>(val, "replications");
        } else if (key == "base_seed") {
            config.base_seed = parse_number<std::uint64_t>(val, "base_seed");
        } else if (key == "significance") {
            config.significance = parse_number<double>(val, "significance");
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    return parse_config(in, std::move(base));
}

std::string config_to_text(const ExperimentConfig& config) {
    std::string out = "p_grid = ";
    for (std::size_t i = 0; i < config.p_grid.size(); ++i) out += (i ? "," : "") + format_double(config.p_grid[i]);
    out += "\nn_grid = ";
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) out += (i ? "," : "") + std::to_string(config.n_grid[i]);
    out += "\nreplications = " + std::to_string(config.replications);
    out += "\nbase_seed = " + std::to_string(config.base_seed);
    out += "\nsignificance = " + format_double(config.significance) + "\n";
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string oracle_table_csv(const CountDistribution& law) {
    std::string out = "# n=" + std::to_string(law.n) + "\n# p=" + format_double(law.p) +
                      "\n# mode=float\n# states=" + std::to_string(law.size()) + "\nc0,c1,c2,c3,c4,c5,probability\n";
    for (const auto& [key, m] : law.mass) {
        for (auto c : unpack<kDirections>(key)) out += std::to_string(c) + ",";
        out += format_double(m) + "\n";
    }
    return out;
}

std::string oracle_table_csv(const RationalCountDistribution& law) {
    std::string out = "# n=" + std::to_string(law.n) + "\n# p=" + format_double(law.p) +
                      "\n# mode=rational\n# states=" + std::to_string(law.size()) +
                      "\nc0,c1,c2,c3,c4,c5,probability,exact\n";
    for (const auto& [key, m] : law.mass) {
        for (auto c : unpack<kDirections>(key)) out += std::to_string(c) + ",";
        out += format_double(m.convert_to<double>()) + "," + m.str() + "\n";
    }
    return out;
}

std::string moments_csv(int n, double p, const MomentReport& m) {
    return "n,p,mean_x,mean_y,var_x,var_y,covariance,second_moment_radius\n" + std::to_string(n) + "," +
           format_double(p) + "," + format_double(m.mean[0]) + "," + format_double(m.mean[1]) + "," +
           format_double(m.component_variances[0]) + "," + format_double(m.component_variances[1]) + "," +
           format_double(m.component_covariance) + "," + format_double(m.second_moment_radius) + "\n";
}

std::string positions_csv(const std::vector<LatticePoint>& positions) {
    std::string out = "rep,u,v,x,y\n";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& pt = positions[i];
        const Cartesian xy = to_cartesian(pt);
        out += std::to_string(i) + "," + std::to_string(pt.u) + "," + std::to_string(pt.v) + "," + format_double(xy.x) +
               "," + format_double(xy.y) + "\n";
    }
    return out;
}

std::string trajectories_csv(const std::vector<Trajectory>& trajectories) {
    std::string out = "rep,step_index,direction_k,u,v\n";
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const auto positions = trajectories[r].positions();
        for (std::size_t i = 0; i < positions.size(); ++i) {
            out += std::to_string(r) + "," + std::to_string(i + 1) + "," +
                   std::to_string(trajectories[r].steps[i].index()) + "," + std::to_string(positions[i].u) + "," +
                   std::to_string(positions[i].v) + "\n";
        }
    }
    return out;
}

std::string decomposition_csv(const Trajectory& t) {
    std::string out = "step_index,direction_k,sign,axis\n";
    const Decomposition d = decompose_trajectory(t);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        out += std::to_string(i + 1) + "," + std::to_string(t.steps[i].index()) + "," + std::to_string(value(d.signs[i])) +
               "," + std::to_string(d.axes[i].power()) + "\n";
    }
    return out;
}

std::string urn_path_csv(const std::vector<CountVector3>& path) {
    std::string out = "n,C1,C2,C3\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out += std::to_string(i + 1) + "," + std::to_string(path[i][0]) + "," + std::to_string(path[i][1]) + "," +
               std::to_string(path[i][2]) + "\n";
    }
    return out;
}

std::string rows_csv(const std::vector<Report>& reports) {
    std::string out = "experiment,p,n,statistic,value\n";
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out += r.experiment + "," + format_double(row.p) + "," + std::to_string(row.n) + "," + row.statistic + "," +
                   format_double(row.value) + "\n";
        }
    }
    return out;
}

std::string checks_csv(const std::vector<Check>& checks) {
    std::string out = "suite,criterion,name,sampler,p,n,statistic,threshold,kind,pass\n";
    for (const auto& c : checks) {
        out += c.suite + "," + std::to_string(c.criterion) + "," + c.name + "," + c.sampler + "," + opt_double(c.p) + "," +
               opt_int(c.n) + "," + format_double(c.statistic) + "," + format_double(c.threshold) + "," +
               to_string(c.kind) + "," + (c.pass ? "true" : "false") + "\n";
    }
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double left = h.left + h.width * static_cast<double>(i);
        out += format_double(left) + "," + format_double(left + h.width) + "," + std::to_string(h.counts[i]) + "\n";
    }
    return out;
}

nlohmann::json to_json(const ExperimentConfig& config) {
    return {{"p_grid", config.p_grid},
            {"n_grid", config.n_grid},
            {"replications", config.replications},
            {"base_seed", config.base_seed},
            {"significance", config.significance}};
}

nlohmann::json to_json(const Check& c) {
    nlohmann::json j{{"suite", c.suite},
                     {"name", c.name},
                     {"criterion", c.criterion},
                     {"sampler", c.sampler},
                     {"statistic", format_double(c.statistic)},
                     {"threshold", format_double(c.threshold)},
                     {"kind", to_string(c.kind)},
                     {"pass", c.pass}};
    j["p"] = c.p ? nlohmann::json(*c.p) : nlohmann::json();
    j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json();
    return j;
}

nlohmann::json summary_json(const BatteryResult& result) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : result.all_checks()) checks.push_back(to_json(c));
    const auto& policy = result.policy;
    return {{"tool", "erwhex"},
            {"tool_version", kToolVersion},
            {"prng", kRngAlgorithm},
            {"config", to_json(result.config)},
            {"policy",
             {{"statistical_tests", policy.statistical_tests},
              {"rejections", policy.rejections},
              {"expected_false_positives", policy.expected_false_positives},
              {"allowed_rejections", policy.allowed_rejections},
              {"failed_hard_checks", policy.failed_hard_checks}}},
            {"pass", policy.pass},
            {"checks", checks}};
}

std::string reproducibility_hash(const RunManifest& manifest, const std::filesystem::path& dir) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    fnv(h, manifest.command);
    fnv(h, manifest.parameters.dump());
    fnv(h, std::to_string(manifest.base_seed));
    fnv(h, kRngAlgorithm);
    fnv(h, kToolVersion);
    for (const auto& name : manifest.outputs) {
        fnv(h, name);
        fnv(h, read_file(dir / name));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
    const nlohmann::json j{{"command", manifest.command},
                           {"parameters", manifest.parameters},
                           {"base_seed", manifest.base_seed},
                           {"prng", kRngAlgorithm},
                           {"tool_version", kToolVersion},
                           {"timestamp", timestamp()},
                           {"outputs", manifest.outputs},
                           {"reproducibility_hash", reproducibility_hash(manifest, dir)}};
    write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace erwhex::io
