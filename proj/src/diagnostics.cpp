#include "abcspec/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "abcspec/parallel.hpp"

namespace abcspec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// D-ABC-3 style retry: resimulate with the next sub-seed when the simulator
// or the summary map rejects a dataset.
SummaryVector simulate_summary_with_retries(const ModelSpec& model,
                                            std::span<const double> theta, int n,
                                            const SeedPath& base, int max_retries) {
    for (int attempt = 0;; ++attempt) {
        try {
            const Dataset z = model.simulate(theta, n, base.child(static_cast<std::uint64_t>(attempt)));
            return model.summarize(z);
        } catch (const std::exception&) {
            if (attempt + 1 >= max_retries) {
                throw AbcError("simulator-failed-after-retries");
            }
        }
    }
}

}  // namespace

const char* diagnostic_name(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::AsymptoticGof: return "asymptotic-gof";
        case DiagnosticKind::SimulatedGof: return "simulated-gof";
        case DiagnosticKind::PredictivePvalue: return "predictive-pvalue";
        case DiagnosticKind::Discrepancy: return "discrepancy";
    }
    return "unknown";
}

DiagnosticKind diagnostic_from_name(const std::string& name) {
    if (name == "asymptotic-gof") return DiagnosticKind::AsymptoticGof;
    if (name == "simulated-gof") return DiagnosticKind::SimulatedGof;
    if (name == "predictive-pvalue") return DiagnosticKind::PredictivePvalue;
    if (name == "discrepancy") return DiagnosticKind::Discrepancy;
    throw std::invalid_argument("unknown diagnostic: " + name);
}

nlohmann::json report_to_json(const DiagnosticReport& r) {
    nlohmann::json j;
    j["kind"] = diagnostic_name(r.kind);
    j["statistic"] = r.statistic;
    j["level"] = r.alpha_level;
    if (r.kind == DiagnosticKind::AsymptoticGof) {
        j["dof"] = r.dof;
        j["critical_value"] = r.critical_value;
        j["quantiles"] = nullptr;
    } else {
        j["dof"] = nullptr;
        j["critical_value"] = nullptr;
        if (r.kind == DiagnosticKind::PredictivePvalue) {
            j["quantiles"] = {r.lower_threshold, r.upper_threshold};
        } else {
            j["quantiles"] = {r.upper_threshold};
        }
        j["resampled"] = r.resampled;
    }
    j["reject"] = r.reject;
    j["seconds"] = r.seconds;
    return j;
}

long choose_Nn(long n, int k_theta, double C) {
    if (n < 2) {
        throw NumericsError("bad-sample-size");
    }
    const int q = std::max(k_theta, 2);
    const double bound =
        C * std::log(static_cast<double>(n)) *
        std::pow(static_cast<double>(n), static_cast<double>(q) / 2.0);
    return static_cast<long>(std::ceil(std::max(bound, 10000.0)));
}

double j_statistic(const SummaryVector& eta_hat_z, const SummaryVector& eta_obs,
                   const VarianceEstimate& V0, long n) {
    if (eta_hat_z.size() != eta_obs.size() ||
        V0.matrix.rows() != static_cast<Eigen::Index>(eta_obs.size())) {
        throw NumericsError("length-mismatch");
    }
    Eigen::VectorXd delta(static_cast<Eigen::Index>(eta_obs.size()));
    for (std::size_t j = 0; j < eta_obs.size(); ++j) {
        delta(static_cast<Eigen::Index>(j)) = eta_hat_z[j] - eta_obs[j];
    }
    const Eigen::MatrixXd v_inv = invert_psd(V0.matrix, nullptr, "singular-variance");
    const double value = static_cast<double>(n) * delta.dot(v_inv * delta);
    return std::max(value, 0.0);
}

DiagnosticReport asymptotic_gof(const ModelSpec& model,
                                std::span<const double> theta_hat,
                                const Dataset& observed, const GofConfig& cfg,
                                const SeedPath& seed, int threads) {
    const auto start = Clock::now();
    const int dof = model.k_eta - model.k_theta();
    if (dof <= 0) {
        throw NumericsError("nonpositive-dof");
    }
    const long n = observed.n();
    if (cfg.N_n < static_cast<long>(
            std::floor(cfg.C * std::log(static_cast<double>(n)) *
                       std::pow(static_cast<double>(n),
                                std::max(model.k_theta(), 2) / 2.0)))) {
        throw NumericsError("Nn-below-bound");
    }

    // eta_hat(z): average summary over ceil(N_n / n) size-n replicates, i.e.
    // N_n observations in total, all under theta_hat.
    const long replicates = (cfg.N_n + n - 1) / n;
    std::vector<SummaryVector> etas(static_cast<std::size_t>(replicates));
    const SeedPath sim_seed = seed.child(0);
    std::vector<double> theta(theta_hat.begin(), theta_hat.end());
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t rep) {
        etas[rep] = simulate_summary_with_retries(
            model, theta, static_cast<int>(n), sim_seed.child(rep), 100);
    });
    SummaryVector eta_hat_z(static_cast<std::size_t>(model.k_eta), 0.0);
    for (const auto& eta : etas) {
        for (std::size_t j = 0; j < eta_hat_z.size(); ++j) {
            eta_hat_z[j] += eta[j];
        }
    }
    for (auto& v : eta_hat_z) {
        v /= static_cast<double>(replicates);
    }

    const SummaryVector eta_obs = model.summarize(observed);
    const VarianceEstimate V0 = model.variance(observed, cfg.variance, seed.child(1));

    DiagnosticReport report;
    report.kind = DiagnosticKind::AsymptoticGof;
    report.alpha_level = cfg.alpha_level;
    report.dof = dof;
    report.variance_ridge = V0.ridge_applied;
    report.statistic = j_statistic(eta_hat_z, eta_obs, V0, n);
    report.critical_value = chi2_quantile(dof, 1.0 - cfg.alpha_level);
    report.reject = report.statistic > report.critical_value;
    report.seconds = seconds_since(start);
    return report;
}

DiagnosticReport simulated_gof(const ReferenceTable& table, int R,
                               double alpha_level, const SeedPath& seed,
                               int threads) {
    const auto start = Clock::now();
    const long N = table.N();
    if (R < 1 || static_cast<long>(R) > N) {
        throw AbcError("bad-replication-count");
    }

    const double eps_bar = table.distances.mean();

    // R distinct pseudo-observed rows, sampled without replacement.
    RngStream pick = seed.stream_at(0);
    std::vector<long> rows;
    rows.reserve(static_cast<std::size_t>(R));
    while (rows.size() < static_cast<std::size_t>(R)) {
        const long candidate = static_cast<long>(pick.next_below(static_cast<std::uint64_t>(N)));
        if (std::find(rows.begin(), rows.end(), candidate) == rows.end()) {
            rows.push_back(candidate);
        }
    }

    const long delta = static_cast<long>(
        std::ceil(table.alpha * static_cast<double>(N)));
    const Eigen::Index k_eta = table.summaries.cols();
    std::vector<double> eps_r(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
        const long row = rows[r];
        const SummaryVector eta_r(table.summaries.row(row).data(),
                                  table.summaries.row(row).data() + k_eta);

        // Distances of every table record to the pseudo-observed summaries.
        std::vector<double> dist(static_cast<std::size_t>(N));
        double total = 0.0;
        for (long i = 0; i < N; ++i) {
            double ss = 0.0;
            for (Eigen::Index j = 0; j < k_eta; ++j) {
                const double d = table.summaries(i, j) - eta_r[static_cast<std::size_t>(j)];
                ss += table.weights.empty()
                          ? d * d
                          : table.weights[static_cast<std::size_t>(j)] * d * d;
            }
            dist[static_cast<std::size_t>(i)] = std::sqrt(ss);
            total += dist[static_cast<std::size_t>(i)];
        }
        eps_r[r] = total / static_cast<double>(N);

        // Regression-corrected ABC against eta_r, reusing the table.
        std::vector<long> order(static_cast<std::size_t>(N));
        std::iota(order.begin(), order.end(), 0L);
        std::nth_element(order.begin(), order.begin() + (delta - 1), order.end(),
                         [&](long a, long b) {
                             const double da = dist[static_cast<std::size_t>(a)];
                             const double db = dist[static_cast<std::size_t>(b)];
                             return da < db || (da == db && a < b);
                         });
        AcceptedSet selected;
        selected.delta = delta;
        selected.draws.resize(delta, table.draws.cols());
        selected.summaries.resize(delta, k_eta);
        for (long i = 0; i < delta; ++i) {
            selected.draws.row(i) = table.draws.row(order[static_cast<std::size_t>(i)]);
            selected.summaries.row(i) = table.summaries.row(order[static_cast<std::size_t>(i)]);
        }
        regression_adjust(selected, eta_r);
    });

    DiagnosticReport report;
    report.kind = DiagnosticKind::SimulatedGof;
    report.alpha_level = alpha_level;
    report.statistic = eps_bar;
    report.resampled = eps_r;
    std::sort(report.resampled.begin(), report.resampled.end());
    report.upper_threshold = quantile_sorted(report.resampled, 1.0 - alpha_level);
    report.reject = eps_bar > report.upper_threshold;
    report.seconds = seconds_since(start);
    return report;
}

DiagnosticReport predictive_pvalue(const AcceptedSet& accepted, const ModelSpec& model,
                                   int scalar_index, double observed_scalar, int R,
                                   double alpha_level, int n, const SeedPath& seed,
                                   bool use_adjusted, int threads) {
    const auto start = Clock::now();
    if (accepted.delta < 1) {
        throw AbcError("empty-accepted-set");
    }
    if (scalar_index < 0 || scalar_index >= model.k_eta) {
        throw AbcError("bad-scalar-index");
    }
    if (use_adjusted && !accepted.adjusted.has_value()) {
        throw AbcError("no-adjusted-draws");
    }
    const Eigen::MatrixXd& draws = use_adjusted ? *accepted.adjusted : accepted.draws;

    std::vector<double> scalars(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
        const SeedPath r_seed = seed.child(r);
        for (int attempt = 0;; ++attempt) {
            const SeedPath attempt_seed = r_seed.child(static_cast<std::uint64_t>(attempt));
            try {
                RngStream pick = attempt_seed.stream_at(0);
                const long row = static_cast<long>(
                    pick.next_below(static_cast<std::uint64_t>(accepted.delta)));
                const Eigen::RowVectorXd theta_row = draws.row(row);
                const std::vector<double> theta(theta_row.data(),
                                                theta_row.data() + theta_row.size());
                const Dataset z = model.simulate(theta, n, attempt_seed.child(1));
                const SummaryVector eta = model.summarize(z);
                scalars[r] = eta[static_cast<std::size_t>(scalar_index)];
                return;
            } catch (const std::exception&) {
                if (attempt >= 99) {
                    throw AbcError("simulator-failed-after-retries");
                }
            }
        }
    });

    DiagnosticReport report;
    report.kind = DiagnosticKind::PredictivePvalue;
    report.alpha_level = alpha_level;
    report.statistic = observed_scalar;
    report.resampled = scalars;
    std::sort(report.resampled.begin(), report.resampled.end());
    report.lower_threshold = quantile_sorted(report.resampled, alpha_level / 2.0);
    report.upper_threshold = quantile_sorted(report.resampled, 1.0 - alpha_level / 2.0);
    report.reject = observed_scalar < report.lower_threshold ||
                    observed_scalar > report.upper_threshold;
    report.seconds = seconds_since(start);
    return report;
}

std::vector<double> squared_cubed(std::span<const double> theta) {
    std::vector<double> h;
    h.reserve(theta.size() * 2);
    for (double t : theta) h.push_back(t * t);
    for (double t : theta) h.push_back(t * t * t);
    return h;
}

namespace {

double h_gap(const AcceptedSet& with_adjusted, const HFunction& h, long n) {
    const Eigen::Index k_theta = with_adjusted.draws.cols();
    std::vector<double> h_raw;
    std::vector<double> h_adj;
    for (long i = 0; i < with_adjusted.delta; ++i) {
        const Eigen::RowVectorXd raw_row = with_adjusted.draws.row(i);
        const Eigen::RowVectorXd adj_row = with_adjusted.adjusted->row(i);
        const std::vector<double> raw(raw_row.data(), raw_row.data() + k_theta);
        const std::vector<double> adj(adj_row.data(), adj_row.data() + k_theta);
        const std::vector<double> hr = h(raw);
        const std::vector<double> ha = h(adj);
        if (h_raw.empty()) {
            h_raw.assign(hr.size(), 0.0);
            h_adj.assign(ha.size(), 0.0);
        }
        for (std::size_t j = 0; j < hr.size(); ++j) {
            h_raw[j] += hr[j];
            h_adj[j] += ha[j];
        }
    }
    double ss = 0.0;
    for (std::size_t j = 0; j < h_raw.size(); ++j) {
        const double d = (h_raw[j] - h_adj[j]) / static_cast<double>(with_adjusted.delta);
        ss += d * d;
    }
    return std::sqrt(static_cast<double>(n)) * std::sqrt(ss);
}

}  // namespace

DiagnosticReport discrepancy_diag(const AcceptedSet& accepted,
                                  const SummaryVector& eta_obs, const ModelSpec& model,
                                  const HFunction& h, std::span<const double> theta_hat,
                                  int R, const AbcOptions& inner, double alpha_level,
                                  int n, const SeedPath& seed, int threads) {
    const auto start = Clock::now();
    const AcceptedSet adjusted = regression_adjust(accepted, eta_obs);
    const double d_obs = h_gap(adjusted, h, n);

    AbcOptions inner_serial = inner;
    inner_serial.threads = 1;  // replicates are already parallel over r
    const std::vector<double> theta(theta_hat.begin(), theta_hat.end());
    std::vector<double> d_r(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
        const SeedPath r_seed = seed.child(r);
        try {
            const Dataset z = model.simulate(theta, n, r_seed.child(0));
            const SummaryVector eta_r = model.summarize(z);
            const AbcResult res =
                abc_reject(model, eta_r, inner_serial, n, r_seed.child(1));
            const AcceptedSet adj_r = regression_adjust(res.accepted, eta_r);
            d_r[r] = h_gap(adj_r, h, n);
        } catch (const std::exception& e) {
            throw AbcError("discrepancy replication " + std::to_string(r) + ": " +
                           e.what());
        }
    });

    DiagnosticReport report;
    report.kind = DiagnosticKind::Discrepancy;
    report.alpha_level = alpha_level;
    report.statistic = d_obs;
    report.resampled = d_r;
    std::sort(report.resampled.begin(), report.resampled.end());
    report.upper_threshold = quantile_sorted(report.resampled, 1.0 - alpha_level);
    report.reject = d_obs > report.upper_threshold;
    report.seconds = seconds_since(start);
    return report;
}

}  // namespace abcspec
