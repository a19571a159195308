// Four model-misspecification diagnostics for ABC:
//
//   asymptotic-gof     J statistic against its chi-square limit
//   simulated-gof      mean table distance against its resampled null
//   predictive-pvalue  a scalar summary against its posterior predictive
//   discrepancy        accept/reject vs regression-adjusted posterior
//                      functionals, calibrated by resimulation
//
// The first is a single quadratic form; the last two resimulate under the
// fitted model and the discrepancy diagnostic re-runs ABC per replicate.

#ifndef ABCSPEC_DIAGNOSTICS_HPP
#define ABCSPEC_DIAGNOSTICS_HPP

#include <nlohmann/json_fwd.hpp>

#include "abcspec/abc.hpp"

namespace abcspec {

enum class DiagnosticKind {
    AsymptoticGof,
    SimulatedGof,
    PredictivePvalue,
    Discrepancy,
};

const char* diagnostic_name(DiagnosticKind kind);
DiagnosticKind diagnostic_from_name(const std::string& name);

struct DiagnosticReport {
    DiagnosticKind kind;
    double statistic = 0.0;
    double alpha_level = 0.05;
    // Asymptotic reference.
    int dof = 0;
    double critical_value = 0.0;
    // Resampling reference (sorted), with the quantile thresholds applied.
    std::vector<double> resampled;
    double lower_threshold = 0.0;  // predictive p-value only
    double upper_threshold = 0.0;
    bool reject = false;
    double seconds = 0.0;
    double variance_ridge = 0.0;  // asymptotic GoF: ridge added to V0, if any
};

nlohmann::json report_to_json(const DiagnosticReport& report);

struct GofConfig {
    long N_n = 10000;
    double C = 1.0;
    double alpha_level = 0.05;
    VarianceConfig variance;
};

/// ceil(max(C * ln(n) * n^{q/2}, 10000)) with q = max(k_theta, 2).
long choose_Nn(long n, int k_theta, double C);

/// J = n * (eta_hat_z - eta_obs)^T V0^{-1} (eta_hat_z - eta_obs).
double j_statistic(const SummaryVector& eta_hat_z, const SummaryVector& eta_obs,
                   const VarianceEstimate& V0, long n);

/// Simulate ceil(N_n/n) pseudo-data sets of size n under theta_hat, average
/// their summaries, and compare with the observed summaries through the J
/// statistic; reject when J exceeds the chi-square (1 - alpha) quantile with
/// k_eta - k_theta degrees of freedom.
DiagnosticReport asymptotic_gof(const ModelSpec& model,
                                std::span<const double> theta_hat,
                                const Dataset& observed, const GofConfig& cfg,
                                const SeedPath& seed, int threads = 1);

/// Average table distance to eta_obs against the distribution of average
/// distances to R table summaries drawn without replacement. Each replicate
/// also runs the regression-corrected selection against its pseudo-observed
/// summaries, reusing the existing table.
DiagnosticReport simulated_gof(const ReferenceTable& table, int R,
                               double alpha_level, const SeedPath& seed,
                               int threads = 1);

/// Posterior-predictive check of the scalar summary at scalar_index: reject
/// when the observed value falls outside the [alpha/2, 1-alpha/2] band of R
/// resimulated values.
DiagnosticReport predictive_pvalue(const AcceptedSet& accepted, const ModelSpec& model,
                                   int scalar_index, double observed_scalar, int R,
                                   double alpha_level, int n, const SeedPath& seed,
                                   bool use_adjusted = false, int threads = 1);

/// Elementwise powers h(theta) = (theta^2, theta^3) stacked, as used by the
/// discrepancy diagnostic.
std::vector<double> squared_cubed(std::span<const double> theta);

using HFunction = std::function<std::vector<double>(std::span<const double>)>;

/// d = sqrt(n) * ||h_bar(accept/reject) - h_bar(adjusted)||, calibrated by R
/// resimulated datasets under theta_hat, each analysed with a fresh inner
/// accept/reject + adjustment run.
DiagnosticReport discrepancy_diag(const AcceptedSet& accepted,
                                  const SummaryVector& eta_obs, const ModelSpec& model,
                                  const HFunction& h, std::span<const double> theta_hat,
                                  int R, const AbcOptions& inner, double alpha_level,
                                  int n, const SeedPath& seed, int threads = 1);

}  // namespace abcspec

#endif  // ABCSPEC_DIAGNOSTICS_HPP
