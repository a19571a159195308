#include "abcspec/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "abcspec/parallel.hpp"

namespace abcspec {

int default_thread_count() {
    if (const char* env = std::getenv("ABC_SPECCHECK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    return fields;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

bool parse_number(const std::string& s, double* out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) {
        return false;
    }
    while (*end != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*end))) {
            return false;
        }
        ++end;
    }
    if (!std::isfinite(v)) {
        return false;
    }
    *out = v;
    return true;
}

struct CsvTable {
    std::vector<std::vector<std::string>> rows;  // data rows only
    std::vector<int> line_numbers;
};

// Reads all rows; a non-numeric first row is treated as a header and
// dropped, blank lines are skipped.
CsvTable read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    CsvTable table;
    std::string line;
    int line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank(line)) {
            continue;
        }
        auto fields = split_fields(line);
        if (first_content) {
            first_content = false;
            double ignored;
            if (!parse_number(fields.back(), &ignored)) {
                continue;  // header row
            }
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

double parse_cell(const CsvTable& table, std::size_t row, const std::string& cell,
                  const std::string& path) {
    double v;
    if (!parse_number(cell, &v)) {
        throw IoError(path + ": non-numeric value at line " +
                      std::to_string(table.line_numbers[row]));
    }
    return v;
}

}  // namespace

std::vector<double> load_returns_csv(const std::string& path, bool prices) {
    const CsvTable table = read_csv_rows(path);
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        // Prices files may carry a leading date column; the value of
        // interest is always the last field.
        values.push_back(parse_cell(table, i, table.rows[i].back(), path));
    }
    std::vector<double> returns;
    if (prices) {
        if (values.size() < 2) {
            throw IoError(path + ": need at least two prices");
        }
        returns.reserve(values.size() - 1);
        for (std::size_t t = 1; t < values.size(); ++t) {
            if (values[t] <= 0.0 || values[t - 1] <= 0.0) {
                throw IoError(path + ": prices must be positive at line " +
                              std::to_string(table.line_numbers[t]));
            }
            returns.push_back(std::log(values[t] / values[t - 1]));
        }
    } else {
        returns = std::move(values);
    }
    if (returns.size() < 8) {
        throw IoError(path + ": fewer than 8 usable rows");
    }
    return returns;
}

std::vector<double> load_series_csv(const std::string& path) {
    const CsvTable table = read_csv_rows(path);
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        values.push_back(parse_cell(table, i, table.rows[i].back(), path));
    }
    if (values.empty()) {
        throw IoError(path + ": no data rows");
    }
    return values;
}

std::pair<std::vector<double>, std::vector<double>> load_xy_csv(const std::string& path) {
    const CsvTable table = read_csv_rows(path);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() < 2) {
            throw IoError(path + ": expected two columns at line " +
                          std::to_string(table.line_numbers[i]));
        }
        x.push_back(parse_cell(table, i, table.rows[i][0], path));
        y.push_back(parse_cell(table, i, table.rows[i][1], path));
    }
    if (x.empty()) {
        throw IoError(path + ": no data rows");
    }
    return {std::move(x), std::move(y)};
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc;
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["resolved_config"] = resolved_config;
    j["master_seed"] = master_seed;
    j["tool_version"] = tool_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = outputs;
    j["threads"] = threads;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.value("command", "");
    m.config_path = j.value("config_path", "");
    if (j.contains("resolved_config")) {
        m.resolved_config = j["resolved_config"];
    }
    m.master_seed = j.value("master_seed", std::uint64_t{0});
    m.tool_version = j.value("tool_version", "");
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    if (j.contains("outputs")) {
        m.outputs = j["outputs"].get<std::vector<std::string>>();
    }
    m.threads = j.value("threads", 0);
    return m;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << manifest.to_json().dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    nlohmann::json j;
    in >> j;
    return RunManifest::from_json(j);
}

}  // namespace abcspec
