#include "abcspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abcspec {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw NumericsError("empty-sample");
    }
    const std::size_t n = sorted.size();
    if (n == 1) {
        return sorted[0];
    }
    p = std::clamp(p, 0.0, 1.0);
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) {
        return sorted[n - 1];
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> sample, double p) {
    if (sample.empty()) {
        throw NumericsError("empty-sample");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, p);
}

namespace {

// Lower incomplete gamma by power series, for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            break;
        }
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return gamma_p_series(a, x);
    }
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi2_cdf(int dof, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double prob) {
    if (dof < 1) {
        throw NumericsError("bad-dof");
    }
    if (prob < 0.0 || prob >= 1.0) {
        throw NumericsError("bad-probability");
    }
    if (prob == 0.0) {
        return 0.0;
    }
    // Bracket, then bisect. The CDF is monotone and cheap at these sizes.
    double lo = 0.0;
    double hi = std::max(8.0, dof + 10.0 * std::sqrt(2.0 * dof));
    while (chi2_cdf(dof, hi) < prob) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw NumericsError("chi2-quantile-bracket");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(dof, mid) < prob) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

double apply_ridge_policy(Eigen::MatrixXd& sym) {
    const Eigen::Index dim = sym.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const auto& ev = eig.eigenvalues();
    const double max_ev = ev.maxCoeff();
    const double min_ev = ev.minCoeff();
    const bool ill = min_ev <= 0.0 || (max_ev / min_ev) > 1e12;
    if (!ill) {
        return 0.0;
    }
    const double lambda = 1e-8 * sym.trace() / static_cast<double>(dim);
    if (lambda > 0.0) {
        sym.diagonal().array() += lambda;
    }
    return lambda;
}

Eigen::MatrixXd invert_psd(const Eigen::MatrixXd& sym, double* ridge_out,
                           const char* error_name) {
    Eigen::MatrixXd work = 0.5 * (sym + sym.transpose());
    const double lambda = apply_ridge_policy(work);
    if (ridge_out != nullptr) {
        *ridge_out = lambda;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(work);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericsError(error_name);
    }
    Eigen::MatrixXd inv =
        ldlt.solve(Eigen::MatrixXd::Identity(work.rows(), work.cols()));
    if (!inv.allFinite()) {
        throw NumericsError(error_name);
    }
    return inv;
}

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size() || X.rows() < X.cols() || X.cols() == 0) {
        throw NumericsError("bad-design");
    }
    Eigen::MatrixXd xtx = X.transpose() * X;
    if (xtx.trace() <= 0.0) {
        throw NumericsError("singular-design");
    }
    OlsFit fit;
    fit.ridge_applied = apply_ridge_policy(xtx);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success) {
        throw NumericsError("singular-design");
    }
    fit.coef = ldlt.solve(X.transpose() * y);
    if (!fit.coef.allFinite()) {
        throw NumericsError("singular-design");
    }
    return fit;
}

AcfValue autocorrelation(std::span<const double> series, int lag) {
    const std::size_t n = series.size();
    if (lag < 0 || n <= static_cast<std::size_t>(lag)) {
        throw NumericsError("bad-lag");
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (var <= 0.0) {
        return {0.0, true};
    }
    double cov = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
        cov += (series[t] - mean) * (series[t + lag] - mean);
    }
    return {cov / var, false};
}

const char* provenance_name(VarianceProvenance p) {
    switch (p) {
        case VarianceProvenance::PlugIn: return "plug-in";
        case VarianceProvenance::Bootstrap: return "bootstrap";
        case VarianceProvenance::Analytic: return "analytic";
    }
    return "unknown";
}

VarianceEstimate plugin_variance(const Eigen::MatrixXd& per_obs_summaries) {
    const Eigen::Index n = per_obs_summaries.rows();
    if (n < 2) {
        throw NumericsError("insufficient-data");
    }
    const Eigen::RowVectorXd mean = per_obs_summaries.colwise().mean();
    const Eigen::MatrixXd centered = per_obs_summaries.rowwise() - mean;
    VarianceEstimate est;
    est.matrix = (centered.transpose() * centered) / static_cast<double>(n);
    est.matrix = 0.5 * (est.matrix + est.matrix.transpose()).eval();
    est.provenance = VarianceProvenance::PlugIn;
    est.degenerate = est.matrix.cwiseAbs().maxCoeff() == 0.0;
    if (!est.degenerate) {
        est.ridge_applied = apply_ridge_policy(est.matrix);
    }
    return est;
}

std::size_t block_length(std::size_t n) {
    return static_cast<std::size_t>(
        std::ceil(std::cbrt(static_cast<double>(n))));
}

VarianceEstimate bootstrap_variance_rows(
    std::size_t n,
    const std::function<SummaryVector(std::span<const std::size_t>)>& summary_of_rows,
    int B, BootstrapScheme scheme, const SeedPath& seed) {
    if (n < 2) {
        throw NumericsError("insufficient-data");
    }
    if (B < 2) {
        throw NumericsError("bad-bootstrap-count");
    }

    const std::size_t blk = block_length(n);
    std::vector<std::size_t> idx(n);
    Eigen::MatrixXd stats;
    for (int b = 0; b < B; ++b) {
        RngStream rng = seed.stream_at(static_cast<std::uint64_t>(b));
        if (scheme == BootstrapScheme::Iid) {
            for (std::size_t i = 0; i < n; ++i) {
                idx[i] = static_cast<std::size_t>(rng.next_below(n));
            }
        } else {
            std::size_t filled = 0;
            while (filled < n) {
                const std::size_t start =
                    static_cast<std::size_t>(rng.next_below(n - blk + 1));
                for (std::size_t j = 0; j < blk && filled < n; ++j) {
                    idx[filled++] = start + j;
                }
            }
        }
        const SummaryVector s = summary_of_rows(idx);
        if (stats.size() == 0) {
            stats.resize(B, static_cast<Eigen::Index>(s.size()));
        }
        for (std::size_t j = 0; j < s.size(); ++j) {
            stats(b, static_cast<Eigen::Index>(j)) = s[j];
        }
    }

    const Eigen::RowVectorXd mean = stats.colwise().mean();
    const Eigen::MatrixXd centered = stats.rowwise() - mean;
    VarianceEstimate est;
    est.matrix = static_cast<double>(n) * (centered.transpose() * centered) /
                 static_cast<double>(B - 1);
    est.matrix = 0.5 * (est.matrix + est.matrix.transpose()).eval();
    est.provenance = VarianceProvenance::Bootstrap;
    est.degenerate = est.matrix.cwiseAbs().maxCoeff() == 0.0;
    if (!est.degenerate) {
        est.ridge_applied = apply_ridge_policy(est.matrix);
    }
    return est;
}

VarianceEstimate bootstrap_variance(
    std::span<const double> data,
    const std::function<SummaryVector(std::span<const double>)>& summary_fn, int B,
    BootstrapScheme scheme, const SeedPath& seed) {
    std::vector<double> resampled(data.size());
    auto summary_of_rows = [&](std::span<const std::size_t> rows) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            resampled[i] = data[rows[i]];
        }
        return summary_fn(resampled);
    };
    return bootstrap_variance_rows(data.size(), summary_of_rows, B, scheme, seed);
}

}  // namespace abcspec
