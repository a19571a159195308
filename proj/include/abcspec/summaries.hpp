// The summary-statistic vectors attached to each benchmark model, plus
// per-observation contributions where the plug-in variance estimator needs
// them.

#ifndef ABCSPEC_SUMMARIES_HPP
#define ABCSPEC_SUMMARIES_HPP

#include <span>
#include <string>

#include <Eigen/Dense>

#include "abcspec/numerics.hpp"

namespace abcspec {

struct SummarySpec {
    std::string name;
    int k_eta = 0;
    bool per_obs_available = false;
    int scalar_pp_index = 0;  // statistic used by the predictive p-value
};

/// (sample mean, mean squared deviation with denominator n). n >= 2.
SummaryVector summaries_normal(std::span<const double> y);

/// Per-observation contributions (y_i, (y_i - ybar)^2); their column means
/// reproduce summaries_normal exactly.
Eigen::MatrixXd per_obs_summaries_normal(std::span<const double> y);

/// (slope, IQR, robust skewness, robust kurtosis) of the residuals from the
/// no-intercept fit slope = sum(x*y)/sum(x^2). Quartiles L and octiles E use
/// the shared quantile estimator. Throws "degenerate-spread" if IQR == 0.
SummaryVector summaries_gk_regression(std::span<const double> x,
                                      std::span<const double> y);

/// (acf1..acf5, b1, b2, mean, #zeros) for a series of counts. The regression
/// y_t^0.3 = b1*y_{t-1}^0.3 + b2*y_{t-1}^0.6 has no intercept and drops the
/// first observation; an all-zero design yields b = 0.
SummaryVector summaries_ricker(std::span<const double> counts);

/// (E1..E7, IQR, robust skewness, robust kurtosis, acf1, acf2) of a returns
/// series. Throws "degenerate-spread" if IQR == 0.
SummaryVector summaries_returns(std::span<const double> y);

SummarySpec normal_summary_spec();
SummarySpec gk_regression_summary_spec();
SummarySpec ricker_summary_spec();
SummarySpec returns_summary_spec();

}  // namespace abcspec

#endif  // ABCSPEC_SUMMARIES_HPP
