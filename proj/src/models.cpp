#include "abcspec/models.hpp"

#include <cmath>
#include <stdexcept>

namespace abcspec {

double gk_quantile(double z, const GkParams& p) {
    // (1 - e^{-gz}) / (1 + e^{-gz}) == tanh(gz/2)
    const double skew = std::tanh(0.5 * p.g * z);
    return p.a + p.b * (1.0 + p.c * skew) * std::pow(1.0 + z * z, p.k) * z;
}

std::vector<double> simulate_normal(double theta, double sigma, int n,
                                    const SeedPath& seed) {
    if (n < 1) {
        throw std::invalid_argument("simulate_normal: n must be >= 1");
    }
    RngStream rng = seed.stream();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (auto& v : y) {
        v = theta + sigma * rng.next_normal();
    }
    return y;
}

std::pair<std::vector<double>, std::vector<double>> simulate_gk_regression(
    const EndogGkParams& params, int n, const SeedPath& seed) {
    if (n < 1) {
        throw std::invalid_argument("simulate_gk_regression: n must be >= 1");
    }
    RngStream rng = seed.stream();
    const double rho = params.rho;
    const double mix = std::sqrt(1.0 - rho * rho);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double zx = rng.next_normal();
        const double w = rng.next_normal();
        const double zu = rho * zx + mix * w;
        const double xj = gk_quantile(zx, params.theta_x);
        const double uj = gk_quantile(zu, params.theta_u);
        x[static_cast<std::size_t>(j)] = xj;
        y[static_cast<std::size_t>(j)] = params.beta * xj + uj;
    }
    return {std::move(x), std::move(y)};
}

std::vector<double> simulate_ricker(const RickerParams& params, const SeedPath& seed) {
    if (params.T < 1 || params.N1 <= 0.0) {
        throw std::invalid_argument("simulate_ricker: bad parameters");
    }
    const int T = params.T;
    const long t1 = static_cast<long>(
        std::ceil(params.k_break * static_cast<double>(T)));

    // The latent recursion runs in log space so extreme growth rates cannot
    // overflow; sub-stream 0 drives the latent noise, sub-stream 1 holds one
    // child stream per observation for the Poisson layer.
    RngStream latent = seed.stream_at(0);
    const SeedPath obs_seed = seed.child(1);

    std::vector<double> y(static_cast<std::size_t>(T));
    const double log_r = std::log(params.r);
    double log_n = std::log(params.N1);
    double n_t = params.N1;
    for (int t = 1; t <= T; ++t) {
        RngStream obs = obs_seed.stream_at(static_cast<std::uint64_t>(t));
        y[static_cast<std::size_t>(t - 1)] =
            static_cast<double>(obs.poisson(params.phi * n_t));
        if (t < T) {
            const double sigma = (t <= t1) ? params.sigma1 : params.sigma2;
            const double u = sigma * latent.next_normal();
            log_n = log_r + log_n - n_t + u;
            n_t = std::exp(log_n);
        }
    }
    return y;
}

std::vector<double> ricker_skeleton(const RickerParams& params) {
    if (params.T < 1 || params.N1 <= 0.0) {
        throw std::invalid_argument("ricker_skeleton: bad parameters");
    }
    std::vector<double> latent(static_cast<std::size_t>(params.T));
    double n_t = params.N1;
    for (int t = 0; t < params.T; ++t) {
        latent[static_cast<std::size_t>(t)] = n_t;
        n_t = params.r * n_t * std::exp(-n_t);
    }
    return latent;
}

std::vector<double> simulate_ma1_gk(const Ma1GkParams& params, int T,
                                    const SeedPath& seed) {
    if (T < 2) {
        throw std::invalid_argument("simulate_ma1_gk: T must be >= 2");
    }
    RngStream rng = seed.stream();
    const double scale = std::sqrt(1.0 + params.theta1 * params.theta1);
    std::vector<double> y(static_cast<std::size_t>(T));
    double eps_prev = rng.next_normal();  // presample draw keeps t=1 stationary
    for (int t = 0; t < T; ++t) {
        const double eps = rng.next_normal();
        const double z = (eps + params.theta1 * eps_prev) / scale;
        y[static_cast<std::size_t>(t)] = gk_quantile(z, params.gk);
        eps_prev = eps;
    }
    return y;
}

std::vector<double> simulate_gk_iid(const GkParams& params, int n, const SeedPath& seed) {
    if (n < 1) {
        throw std::invalid_argument("simulate_gk_iid: n must be >= 1");
    }
    RngStream rng = seed.stream();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (auto& v : y) {
        v = gk_quantile(rng.next_normal(), params);
    }
    return y;
}

}  // namespace abcspec
