#include "abcspec/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace abcspec {

SummaryVector summaries_normal(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 2) {
        throw NumericsError("insufficient-data");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0;
    for (double v : y) m2 += (v - mean) * (v - mean);
    m2 /= static_cast<double>(n);
    return {mean, m2};
}

Eigen::MatrixXd per_obs_summaries_normal(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 2) {
        throw NumericsError("insufficient-data");
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        out(static_cast<Eigen::Index>(i), 0) = y[i];
        out(static_cast<Eigen::Index>(i), 1) = (y[i] - mean) * (y[i] - mean);
    }
    return out;
}

namespace {

struct RobustShape {
    double iqr;
    double skew;
    double kurt;
    std::array<double, 7> octiles;
};

// Quartile/octile shape statistics of a sample, from one sorted copy.
RobustShape robust_shape(std::span<const double> sample) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::array<double, 7> e{};
    for (int l = 1; l <= 7; ++l) {
        e[static_cast<std::size_t>(l - 1)] =
            quantile_sorted(sorted, static_cast<double>(l) / 8.0);
    }
    const double l1 = e[1];  // octiles 2, 4, 6 are the quartiles
    const double l2 = e[3];
    const double l3 = e[5];
    RobustShape s;
    s.iqr = l3 - l1;
    s.octiles = e;
    if (s.iqr == 0.0) {
        throw NumericsError("degenerate-spread");
    }
    s.skew = (l3 + l1 - 2.0 * l2) / s.iqr;
    s.kurt = (e[6] - e[4] + e[2] - e[0]) / s.iqr;
    return s;
}

}  // namespace

SummaryVector summaries_gk_regression(std::span<const double> x,
                                      std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) {
        throw NumericsError("length-mismatch");
    }
    if (n < 8) {
        throw NumericsError("insufficient-data");
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
    }
    if (sxx <= 0.0) {
        throw NumericsError("degenerate-regressor");
    }
    const double slope = sxy / sxx;
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        resid[i] = y[i] - slope * x[i];
    }
    const RobustShape s = robust_shape(resid);
    return {slope, s.iqr, s.skew, s.kurt};
}

SummaryVector summaries_ricker(std::span<const double> counts) {
    const std::size_t T = counts.size();
    if (T < 7) {
        throw NumericsError("insufficient-data");
    }

    SummaryVector eta(9, 0.0);
    for (int lag = 1; lag <= 5; ++lag) {
        eta[static_cast<std::size_t>(lag - 1)] = autocorrelation(counts, lag).value;
    }

    // y_t^0.3 on (y_{t-1}^0.3, y_{t-1}^0.6), first observation dropped.
    const Eigen::Index rows = static_cast<Eigen::Index>(T - 1);
    Eigen::MatrixXd X(rows, 2);
    Eigen::VectorXd resp(rows);
    for (std::size_t t = 1; t < T; ++t) {
        X(static_cast<Eigen::Index>(t - 1), 0) = std::pow(counts[t - 1], 0.3);
        X(static_cast<Eigen::Index>(t - 1), 1) = std::pow(counts[t - 1], 0.6);
        resp(static_cast<Eigen::Index>(t - 1)) = std::pow(counts[t], 0.3);
    }
    if ((X.transpose() * X).trace() > 0.0) {
        const OlsFit fit = ols_fit(X, resp);
        eta[5] = fit.coef(0);
        eta[6] = fit.coef(1);
    }

    double mean = 0.0;
    double zeros = 0.0;
    for (double v : counts) {
        mean += v;
        if (v == 0.0) zeros += 1.0;
    }
    eta[7] = mean / static_cast<double>(T);
    eta[8] = zeros;
    return eta;
}

SummaryVector summaries_returns(std::span<const double> y) {
    if (y.size() < 8) {
        throw NumericsError("insufficient-data");
    }
    const RobustShape s = robust_shape(y);
    SummaryVector eta;
    eta.reserve(12);
    for (double e : s.octiles) eta.push_back(e);
    eta.push_back(s.iqr);
    eta.push_back(s.skew);
    eta.push_back(s.kurt);
    eta.push_back(autocorrelation(y, 1).value);
    eta.push_back(autocorrelation(y, 2).value);
    return eta;
}

SummarySpec normal_summary_spec() { return {"normal", 2, true, 1}; }
SummarySpec gk_regression_summary_spec() { return {"gk-regression", 4, false, 0}; }
SummarySpec ricker_summary_spec() { return {"ricker", 9, false, 8}; }
SummarySpec returns_summary_spec() { return {"returns", 12, false, 10}; }

}  // namespace abcspec
