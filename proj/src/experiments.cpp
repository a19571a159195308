#include "abcspec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "abcspec/models.hpp"
#include "abcspec/parallel.hpp"

namespace abcspec {

namespace {

const std::vector<std::string> kAllDiagnostics = {
    "asymptotic-gof", "simulated-gof", "predictive-pvalue", "discrepancy"};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string describe_path(const SeedPath& seed) {
    std::ostringstream os;
    os << "seed " << seed.master_seed() << " path [";
    const auto& p = seed.path();
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << (i ? "," : "") << p[i];
    }
    os << "]";
    return os.str();
}

}  // namespace

std::vector<std::string> StudyConfig::active_diagnostics() const {
    if (diagnostics.empty()) {
        return kAllDiagnostics;
    }
    for (const auto& d : diagnostics) {
        diagnostic_from_name(d);  // validate
    }
    return diagnostics;
}

StudyConfig preset_config(const std::string& model) {
    StudyConfig cfg;
    cfg.model = model;
    if (model == "normal") {
        cfg.grid_param = "sigma";
        cfg.grid = {0.8, 0.9, 1.0, 1.1, 1.2, 1.3};
        cfg.sample_sizes = {100, 500, 1000};
        cfg.replications = 100;
        cfg.abc_N = 50000;
        cfg.abc_alpha = 0.01;
        cfg.gof = {10000, 1.0, 0.05, {VarianceProvenance::Analytic, 200}};
        cfg.inner_N = 50000;
        cfg.inner_alpha = 0.01;
    } else if (model == "gk-regression") {
        cfg.grid_param = "rho";
        cfg.grid = {0.0, 0.4, 0.8};
        cfg.sample_sizes = {500, 1000};
        cfg.replications = 50;
        cfg.abc_N = 100000;
        cfg.abc_alpha = 0.001;
        cfg.gof = {10000, 1.0, 0.05, {VarianceProvenance::Bootstrap, 200}};
        cfg.inner_N = 10000;
        cfg.inner_alpha = 0.01;
    } else if (model == "ricker") {
        cfg.grid_param = "k_break";
        cfg.grid = {0.6, 0.7, 0.8, 0.9, 1.0};
        cfg.sample_sizes = {250, 500, 1000};
        cfg.replications = 50;
        cfg.abc_N = 500000;
        cfg.abc_alpha = 0.00025;
        cfg.gof = {200000, 0.9, 0.05, {VarianceProvenance::Bootstrap, 200}};
        cfg.inner_N = 10000;
        cfg.inner_alpha = 0.01;
    } else if (model == "returns") {
        cfg.grid_param = "theta1";
        cfg.grid = {0.2};
        cfg.sample_sizes = {524};
        cfg.replications = 1;
        cfg.abc_N = 1000000;
        cfg.abc_alpha = 0.0001;
        cfg.gof = {1000000, 0.025, 0.05, {VarianceProvenance::Bootstrap, 200}};
        cfg.inner_N = 10000;
        cfg.inner_alpha = 0.01;
    } else {
        throw std::invalid_argument("unknown preset: " + model);
    }
    cfg.R = 100;
    cfg.level = 0.05;
    return cfg;
}

nlohmann::ordered_json config_to_json(const StudyConfig& cfg) {
    nlohmann::ordered_json j;
    j["model"] = cfg.model;
    j["grid_param"] = cfg.grid_param;
    j["grid"] = cfg.grid;
    j["sample_sizes"] = cfg.sample_sizes;
    j["replications"] = cfg.replications;
    j["abc"] = {{"N", cfg.abc_N}, {"alpha", cfg.abc_alpha}};
    if (!cfg.distance_weights.empty()) {
        j["abc"]["weights"] = cfg.distance_weights;
    }
    j["gof"] = {{"N_n", cfg.gof.N_n},
                {"C", cfg.gof.C},
                {"variance", provenance_name(cfg.gof.variance.source)},
                {"bootstrap_B", cfg.gof.variance.B}};
    j["diagnostics"] = cfg.active_diagnostics();
    j["R"] = cfg.R;
    j["inner"] = {{"N", cfg.inner_N}, {"alpha", cfg.inner_alpha}};
    j["level"] = cfg.level;
    j["seed"] = cfg.master_seed;
    return j;
}

StudyConfig config_from_json(const nlohmann::json& j) {
    StudyConfig cfg = preset_config(j.value("model", std::string("normal")));
    if (j.contains("grid_param")) cfg.grid_param = j["grid_param"];
    if (j.contains("grid")) cfg.grid = j["grid"].get<std::vector<double>>();
    if (j.contains("sample_sizes"))
        cfg.sample_sizes = j["sample_sizes"].get<std::vector<int>>();
    if (j.contains("replications")) cfg.replications = j["replications"];
    if (j.contains("abc")) {
        const auto& a = j["abc"];
        if (a.contains("N")) cfg.abc_N = a["N"];
        if (a.contains("alpha")) cfg.abc_alpha = a["alpha"];
        if (a.contains("weights"))
            cfg.distance_weights = a["weights"].get<std::vector<double>>();
    }
    if (j.contains("gof")) {
        const auto& g = j["gof"];
        if (g.contains("N_n")) cfg.gof.N_n = g["N_n"];
        if (g.contains("C")) cfg.gof.C = g["C"];
        if (g.contains("variance")) {
            const std::string v = g["variance"];
            if (v == "plug-in") cfg.gof.variance.source = VarianceProvenance::PlugIn;
            else if (v == "bootstrap") cfg.gof.variance.source = VarianceProvenance::Bootstrap;
            else if (v == "analytic") cfg.gof.variance.source = VarianceProvenance::Analytic;
            else throw std::invalid_argument("unknown variance source: " + v);
        }
        if (g.contains("bootstrap_B")) cfg.gof.variance.B = g["bootstrap_B"];
    }
    if (j.contains("diagnostics"))
        cfg.diagnostics = j["diagnostics"].get<std::vector<std::string>>();
    if (j.contains("R")) cfg.R = j["R"];
    if (j.contains("inner")) {
        if (j["inner"].contains("N")) cfg.inner_N = j["inner"]["N"];
        if (j["inner"].contains("alpha")) cfg.inner_alpha = j["inner"]["alpha"];
    }
    if (j.contains("level")) cfg.level = j["level"];
    if (j.contains("seed")) cfg.master_seed = j["seed"];
    cfg.gof.alpha_level = cfg.level;
    return cfg;
}

Dataset simulate_truth(const std::string& model, double grid_value, int n,
                       const SeedPath& seed) {
    if (model == "normal") {
        return Dataset{{simulate_normal(0.0, grid_value, n, seed)}};
    }
    if (model == "gk-regression") {
        EndogGkParams p;
        p.beta = 0.5;
        p.rho = grid_value;
        p.theta_x = GkParams{0.0, 1.0, 2.0, 1.0, 0.8};
        p.theta_u = p.theta_x;
        auto [x, y] = simulate_gk_regression(p, n, seed);
        return Dataset{{std::move(x), std::move(y)}};
    }
    if (model == "ricker") {
        RickerParams p;
        p.r = 44.7;
        p.phi = 10.0;
        p.sigma1 = 1.3;
        p.sigma2 = 0.3;
        p.k_break = grid_value;
        p.N1 = 1.0;
        p.T = n;
        return Dataset{{simulate_ricker(p, seed)}};
    }
    if (model == "returns") {
        Ma1GkParams p;
        p.theta1 = grid_value;
        p.gk = GkParams{0.08, 0.08, -0.2, 0.02, 0.8};
        return Dataset{{simulate_ma1_gk(p, n, seed)}};
    }
    throw std::invalid_argument("unknown model: " + model);
}

namespace {

struct CellOutcome {
    bool failed = false;
    std::string error;
    // index-aligned with the active diagnostics list
    std::vector<int> reject;
    std::vector<double> seconds;
};

// Sub-stream roles inside one replication cell.
enum CellStream : std::uint64_t {
    kTruthStream = 0,
    kAbcStream = 1,
    kAsymptoticStream = 2,
    kSimulatedStream = 3,
    kPredictiveStream = 4,
    kDiscrepancyStream = 5,
};

CellOutcome run_cell(const StudyConfig& cfg, const ModelSpec& model,
                     const std::vector<std::string>& diags, int n, double grid_value,
                     const SeedPath& cell_seed) {
    CellOutcome out;
    out.reject.assign(diags.size(), 0);
    out.seconds.assign(diags.size(), 0.0);

    const Dataset observed =
        simulate_truth(cfg.model, grid_value, n, cell_seed.child(kTruthStream));
    const SummaryVector eta_obs = model.summarize(observed);

    AbcOptions opts;
    opts.N = cfg.abc_N;
    opts.alpha = cfg.abc_alpha;
    opts.weights = cfg.distance_weights;
    opts.threads = 1;
    const AbcResult abc =
        abc_reject(model, eta_obs, opts, n, cell_seed.child(kAbcStream));
    const std::vector<double> theta_hat = posterior_mean(abc.accepted, false);

    GofConfig gof = cfg.gof;
    gof.alpha_level = cfg.level;

    for (std::size_t d = 0; d < diags.size(); ++d) {
        const DiagnosticKind kind = diagnostic_from_name(diags[d]);
        DiagnosticReport report;
        switch (kind) {
            case DiagnosticKind::AsymptoticGof:
                report = asymptotic_gof(model, theta_hat, observed, gof,
                                        cell_seed.child(kAsymptoticStream));
                break;
            case DiagnosticKind::SimulatedGof:
                report = simulated_gof(abc.table, cfg.R, cfg.level,
                                       cell_seed.child(kSimulatedStream));
                break;
            case DiagnosticKind::PredictivePvalue:
                report = predictive_pvalue(
                    abc.accepted, model, model.scalar_pp_index,
                    eta_obs[static_cast<std::size_t>(model.scalar_pp_index)], cfg.R,
                    cfg.level, n, cell_seed.child(kPredictiveStream));
                break;
            case DiagnosticKind::Discrepancy: {
                AbcOptions inner;
                inner.N = cfg.inner_N;
                inner.alpha = cfg.inner_alpha;
                inner.weights = cfg.distance_weights;
                report = discrepancy_diag(abc.accepted, eta_obs, model, squared_cubed,
                                          theta_hat, cfg.R, inner, cfg.level, n,
                                          cell_seed.child(kDiscrepancyStream));
                break;
            }
        }
        out.reject[d] = report.reject ? 1 : 0;
        out.seconds[d] = report.seconds;
    }
    return out;
}

}  // namespace

PowerTable run_power_study(const StudyConfig& cfg) {
    const ModelSpec model = make_model(cfg.model);
    const std::vector<std::string> diags = cfg.active_diagnostics();
    if (cfg.grid.empty() || cfg.sample_sizes.empty() || cfg.replications < 1) {
        throw std::invalid_argument("empty study grid");
    }

    const std::size_t n_cells = cfg.sample_sizes.size() * cfg.grid.size() *
                                static_cast<std::size_t>(cfg.replications);
    std::vector<CellOutcome> cells(n_cells);
    const SeedPath root(cfg.master_seed);
    const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();

    const std::size_t grid_count = cfg.grid.size();
    const std::size_t rep_count = static_cast<std::size_t>(cfg.replications);
    parallel_for(n_cells, threads, [&](std::size_t cell) {
        const std::size_t n_idx = cell / (grid_count * rep_count);
        const std::size_t g_idx = (cell / rep_count) % grid_count;
        const std::size_t rep = cell % rep_count;
        const SeedPath cell_seed = root.child(n_idx).child(g_idx).child(rep);
        try {
            cells[cell] = run_cell(cfg, model, diags, cfg.sample_sizes[n_idx],
                                   cfg.grid[g_idx], cell_seed);
        } catch (const std::exception& e) {
            cells[cell].failed = true;
            cells[cell].error = std::string(e.what()) + " (" + describe_path(cell_seed) + ")";
            cells[cell].reject.assign(diags.size(), 0);
            cells[cell].seconds.assign(diags.size(), 0.0);
        }
    });

    PowerTable table;
    table.config = cfg;
    for (std::size_t n_idx = 0; n_idx < cfg.sample_sizes.size(); ++n_idx) {
        for (std::size_t g_idx = 0; g_idx < grid_count; ++g_idx) {
            std::vector<int> rejections(diags.size(), 0);
            std::vector<double> seconds(diags.size(), 0.0);
            int errors = 0;
            for (std::size_t rep = 0; rep < rep_count; ++rep) {
                const std::size_t cell =
                    (n_idx * grid_count + g_idx) * rep_count + rep;
                if (cells[cell].failed) {
                    ++errors;
                    table.errors.push_back(cells[cell].error);
                    continue;
                }
                for (std::size_t d = 0; d < diags.size(); ++d) {
                    rejections[d] += cells[cell].reject[d];
                    seconds[d] += cells[cell].seconds[d];
                }
            }
            const int valid = cfg.replications - errors;
            for (std::size_t d = 0; d < diags.size(); ++d) {
                PowerRow row;
                row.model = cfg.model;
                row.n = cfg.sample_sizes[n_idx];
                row.grid_param = cfg.grid_param;
                row.grid_value = cfg.grid[g_idx];
                row.diagnostic = diags[d];
                row.replications = valid;
                row.errors = errors;
                row.rejections = rejections[d];
                row.frequency =
                    valid > 0 ? static_cast<double>(rejections[d]) / valid : 0.0;
                row.mc_se = valid > 0
                                ? std::sqrt(row.frequency * (1.0 - row.frequency) /
                                            static_cast<double>(valid))
                                : 0.0;
                row.mean_seconds = valid > 0 ? seconds[d] / valid : 0.0;
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

void write_power_csv(const PowerTable& table, std::ostream& out) {
    out << "model,n,grid_param,grid_value,diagnostic,replications,errors,"
           "rejections,frequency,mc_se,abc_N,abc_alpha,gof_Nn,R,level,master_seed\n";
    const StudyConfig& cfg = table.config;
    for (const auto& row : table.rows) {
        out << row.model << "," << row.n << "," << row.grid_param << ","
            << format_double(row.grid_value) << "," << row.diagnostic << ","
            << row.replications << "," << row.errors << "," << row.rejections << ","
            << format_double(row.frequency) << "," << format_double(row.mc_se) << ","
            << cfg.abc_N << "," << format_double(cfg.abc_alpha) << "," << cfg.gof.N_n
            << "," << cfg.R << "," << format_double(cfg.level) << ","
            << cfg.master_seed << "\n";
    }
}

nlohmann::ordered_json power_to_json(const PowerTable& table) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(table.config);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        j["rows"].push_back({{"model", row.model},
                             {"n", row.n},
                             {"grid_param", row.grid_param},
                             {"grid_value", row.grid_value},
                             {"diagnostic", row.diagnostic},
                             {"replications", row.replications},
                             {"errors", row.errors},
                             {"rejections", row.rejections},
                             {"frequency", row.frequency},
                             {"mc_se", row.mc_se}});
    }
    j["errors"] = table.errors;
    return j;
}

void write_timing_csv(const PowerTable& table, std::ostream& out) {
    out << "model,n,grid_param,grid_value,diagnostic,replications,mean_seconds,"
           "master_seed\n";
    for (const auto& row : table.rows) {
        out << row.model << "," << row.n << "," << row.grid_param << ","
            << format_double(row.grid_value) << "," << row.diagnostic << ","
            << row.replications << "," << format_double(row.mean_seconds) << ","
            << table.config.master_seed << "\n";
    }
}

nlohmann::ordered_json timing_to_json(const PowerTable& table) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(table.config);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        j["rows"].push_back({{"model", row.model},
                             {"n", row.n},
                             {"grid_value", row.grid_value},
                             {"diagnostic", row.diagnostic},
                             {"replications", row.replications},
                             {"mean_seconds", row.mean_seconds}});
    }
    return j;
}

ApplicationResult run_application(const std::vector<double>& returns,
                                  const StudyConfig& cfg) {
    if (returns.size() < 8) {
        throw std::invalid_argument("returns series too short");
    }
    const ModelSpec model = make_returns_model();
    const int n = static_cast<int>(returns.size());
    const Dataset observed{{returns}};
    const SummaryVector eta_obs = model.summarize(observed);
    const SeedPath root(cfg.master_seed);
    const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();

    AbcOptions opts;
    opts.N = cfg.abc_N;
    opts.alpha = cfg.abc_alpha;
    opts.weights = cfg.distance_weights;
    opts.threads = threads;
    const AbcResult abc = abc_reject(model, eta_obs, opts, n, root.child(kAbcStream));

    ApplicationResult result;
    result.resimulated = abc.resimulated;
    result.theta_hat = posterior_mean(abc.accepted, false);
    for (int p = 0; p < model.k_theta(); ++p) {
        std::vector<double> draws(static_cast<std::size_t>(abc.accepted.delta));
        for (long i = 0; i < abc.accepted.delta; ++i) {
            draws[static_cast<std::size_t>(i)] = abc.accepted.draws(i, p);
        }
        std::sort(draws.begin(), draws.end());
        PosteriorSummaryRow row;
        row.param = model.param_names[static_cast<std::size_t>(p)];
        row.median = quantile_sorted(draws, 0.5);
        row.lo = quantile_sorted(draws, 0.025);
        row.hi = quantile_sorted(draws, 0.975);
        result.posterior.push_back(std::move(row));
    }

    GofConfig gof = cfg.gof;
    gof.alpha_level = cfg.level;
    for (const auto& name : cfg.active_diagnostics()) {
        switch (diagnostic_from_name(name)) {
            case DiagnosticKind::AsymptoticGof:
                result.reports.push_back(asymptotic_gof(
                    model, result.theta_hat, observed, gof,
                    root.child(kAsymptoticStream), threads));
                break;
            case DiagnosticKind::SimulatedGof:
                result.reports.push_back(simulated_gof(
                    abc.table, cfg.R, cfg.level, root.child(kSimulatedStream), threads));
                break;
            case DiagnosticKind::PredictivePvalue:
                result.reports.push_back(predictive_pvalue(
                    abc.accepted, model, model.scalar_pp_index,
                    eta_obs[static_cast<std::size_t>(model.scalar_pp_index)], cfg.R,
                    cfg.level, n, root.child(kPredictiveStream), false, threads));
                break;
            case DiagnosticKind::Discrepancy: {
                AbcOptions inner;
                inner.N = cfg.inner_N;
                inner.alpha = cfg.inner_alpha;
                inner.weights = cfg.distance_weights;
                result.reports.push_back(discrepancy_diag(
                    abc.accepted, eta_obs, model, squared_cubed, result.theta_hat,
                    cfg.R, inner, cfg.level, n, root.child(kDiscrepancyStream),
                    threads));
                break;
            }
        }
    }
    return result;
}

void write_posterior_csv(const ApplicationResult& result, std::ostream& out) {
    out << "param,median,lo_2.5,hi_97.5\n";
    for (const auto& row : result.posterior) {
        out << row.param << "," << format_double(row.median) << ","
            << format_double(row.lo) << "," << format_double(row.hi) << "\n";
    }
}

}  // namespace abcspec
