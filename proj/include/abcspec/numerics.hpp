// Deterministic numeric primitives shared by the whole toolkit: order
// statistics, chi-square distribution functions, least squares,
// autocorrelation, and covariance estimation (plug-in and bootstrap).

#ifndef ABCSPEC_NUMERICS_HPP
#define ABCSPEC_NUMERICS_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abcspec/rng.hpp"

namespace abcspec {

/// A summary-statistic vector eta(.). Fixed length k_eta per model.
using SummaryVector = std::vector<double>;

class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Order statistic with linear interpolation at plotting positions
/// (i-1)/(n-1) (the common "type 7" estimator). Throws "empty-sample".
double quantile(std::span<const double> sample, double p);

/// Same, but the input is already sorted ascending (hot paths that need
/// several quantiles of one sample sort once and call this).
double quantile_sorted(std::span<const double> sorted, double p);

/// Regularized lower incomplete gamma P(a, x): series for x < a+1, continued
/// fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with `dof` degrees of freedom.
double chi2_cdf(int dof, double x);

/// Inverse chi-square CDF; x such that P(dof/2, x/2) = prob. Throws
/// "bad-probability" for prob outside [0, 1).
double chi2_quantile(int dof, double prob);

struct OlsFit {
    Eigen::VectorXd coef;
    double ridge_applied = 0.0;
};

/// Least squares via the normal equations with the shared ridge policy
/// (condition number > 1e12 adds 1e-8 * trace/dim to the diagonal).
/// Throws "singular-design" when rank-deficient beyond the ridge.
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct AcfValue {
    double value = 0.0;
    bool degenerate = false;  // constant series; value forced to 0
};

/// Sample autocorrelation at `lag`: autocovariance over variance, both
/// mean-removed with denominator T.
AcfValue autocorrelation(std::span<const double> series, int lag);

enum class VarianceProvenance { PlugIn, Bootstrap, Analytic };

/// Estimate of the limiting covariance of sqrt(n)-scaled summaries.
struct VarianceEstimate {
    Eigen::MatrixXd matrix;  // k_eta x k_eta, symmetric PSD after ridge
    VarianceProvenance provenance = VarianceProvenance::PlugIn;
    double ridge_applied = 0.0;
    bool degenerate = false;
};

const char* provenance_name(VarianceProvenance p);

/// Ridge policy shared by every symmetric solve in the toolkit: if the
/// condition number exceeds 1e12 (or the matrix is not PD), add
/// lambda = 1e-8 * trace/dim to the diagonal. Returns lambda (0 if none).
double apply_ridge_policy(Eigen::MatrixXd& sym);

/// Inverse of a symmetric PSD matrix after the ridge policy. Throws
/// `error_name` when singular beyond the ridge.
Eigen::MatrixXd invert_psd(const Eigen::MatrixXd& sym, double* ridge_out,
                           const char* error_name = "singular-matrix");

/// V0_hat = n^{-1} sum_i (eta_i - eta_bar)(eta_i - eta_bar)^T from an
/// n x k_eta matrix of per-observation summary contributions.
/// Throws "insufficient-data" for n < 2.
VarianceEstimate plugin_variance(const Eigen::MatrixXd& per_obs_summaries);

enum class BootstrapScheme { Iid, MovingBlock };

/// Moving-block length ceil(n^{1/3}).
std::size_t block_length(std::size_t n);

/// n times the sample covariance of summary vectors across B bootstrap
/// resamples. The resample is described by row indices into the original
/// data, so callers with multi-column data can join on the index.
VarianceEstimate bootstrap_variance_rows(
    std::size_t n, const std::function<SummaryVector(std::span<const std::size_t>)>& summary_of_rows,
    int B, BootstrapScheme scheme, const SeedPath& seed);

/// Convenience form for a single series.
VarianceEstimate bootstrap_variance(
    std::span<const double> data,
    const std::function<SummaryVector(std::span<const double>)>& summary_fn, int B,
    BootstrapScheme scheme, const SeedPath& seed);

}  // namespace abcspec

#endif  // ABCSPEC_NUMERICS_HPP
