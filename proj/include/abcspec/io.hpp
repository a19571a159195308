// Data ingestion and run manifests for the command-line tools.

#ifndef ABCSPEC_IO_HPP
#define ABCSPEC_IO_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace abcspec {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Load a returns series from CSV. Default: one numeric column, optional
/// "return" header. With prices = true: one or two columns (date, price);
/// the last column is read as prices and transformed to log returns
/// r_t = ln(p_t / p_{t-1}). Trailing blank lines are ignored; a non-numeric
/// data row raises an error naming its line number. Requires >= 8 usable
/// returns.
std::vector<double> load_returns_csv(const std::string& path, bool prices = false);

/// Two-column (x, y) data for the regression model; optional header row.
std::pair<std::vector<double>, std::vector<double>> load_xy_csv(const std::string& path);

/// Single numeric column (counts or draws); optional header row.
std::vector<double> load_series_csv(const std::string& path);

/// Record of one CLI run: written at start, finalised at exit. Re-running
/// from the recorded resolved config and seed reproduces the outputs.
struct RunManifest {
    std::string command;
    std::string config_path;
    nlohmann::ordered_json resolved_config;
    std::uint64_t master_seed = 0;
    std::string tool_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
    int threads = 0;

    nlohmann::ordered_json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

std::string iso8601_now();

}  // namespace abcspec

#endif  // ABCSPEC_IO_HPP
