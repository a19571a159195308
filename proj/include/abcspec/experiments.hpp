// Monte Carlo study harness: size/power tables over a misspecification
// grid, per-diagnostic timing tables, and the returns-series application
// pipeline.

#ifndef ABCSPEC_EXPERIMENTS_HPP
#define ABCSPEC_EXPERIMENTS_HPP

#include <nlohmann/json.hpp>

#include "abcspec/diagnostics.hpp"

namespace abcspec {

struct StudyConfig {
    std::string model = "normal";
    std::string grid_param = "sigma";  // name of the misspecification knob
    std::vector<double> grid;
    std::vector<int> sample_sizes;
    int replications = 100;

    long abc_N = 50000;
    double abc_alpha = 0.01;
    std::vector<double> distance_weights;  // empty = unweighted

    GofConfig gof;
    std::vector<std::string> diagnostics;  // empty = all four
    int R = 100;
    long inner_N = 50000;
    double inner_alpha = 0.01;
    double level = 0.05;

    std::uint64_t master_seed = 0;
    int threads = 0;  // 0 = default_thread_count()

    std::vector<std::string> active_diagnostics() const;
};

/// Paper-fidelity settings for one of the built-in studies:
/// "normal", "gk-regression", "ricker", "returns".
StudyConfig preset_config(const std::string& model);

nlohmann::ordered_json config_to_json(const StudyConfig& cfg);
StudyConfig config_from_json(const nlohmann::json& j);

/// Observed-data generator for the power studies (the truth side of each
/// benchmark, with the misspecification knob set to grid_value).
Dataset simulate_truth(const std::string& model, double grid_value, int n,
                       const SeedPath& seed);

struct PowerRow {
    std::string model;
    int n = 0;
    std::string grid_param;
    double grid_value = 0.0;
    std::string diagnostic;
    int replications = 0;
    int errors = 0;      // failed replications (flagged, not counted)
    int rejections = 0;
    double frequency = 0.0;
    double mc_se = 0.0;
    double mean_seconds = 0.0;  // reported via the timing table only
};

struct PowerTable {
    StudyConfig config;
    std::vector<PowerRow> rows;
    std::vector<std::string> errors;  // per-failure descriptions with seed paths
};

/// One full study: for every (n, grid value, replication) simulate the truth,
/// run accept/reject ABC under the assumed model, apply the requested
/// diagnostics, and aggregate rejection frequencies. Deterministic for a
/// fixed config regardless of thread count.
PowerTable run_power_study(const StudyConfig& cfg);

/// The statistical columns of the table; excludes wall-clock so the bytes
/// are reproducible across worker layouts.
void write_power_csv(const PowerTable& table, std::ostream& out);
nlohmann::ordered_json power_to_json(const PowerTable& table);

/// Mean per-diagnostic wall-clock, measured after the accept/reject pass.
void write_timing_csv(const PowerTable& table, std::ostream& out);
nlohmann::ordered_json timing_to_json(const PowerTable& table);

struct PosteriorSummaryRow {
    std::string param;
    double median = 0.0;
    double lo = 0.0;  // symmetric 95% credible interval
    double hi = 0.0;
};

struct ApplicationResult {
    std::vector<PosteriorSummaryRow> posterior;
    std::vector<double> theta_hat;
    std::vector<DiagnosticReport> reports;
    long resimulated = 0;
};

/// Fit the MA(1) g-and-k returns model to a series and run the requested
/// diagnostics (asymptotic dof = 12 - 5 = 7).
ApplicationResult run_application(const std::vector<double>& returns,
                                  const StudyConfig& cfg);

void write_posterior_csv(const ApplicationResult& result, std::ostream& out);

}  // namespace abcspec

#endif  // ABCSPEC_EXPERIMENTS_HPP
