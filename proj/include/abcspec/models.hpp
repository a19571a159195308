// Forward simulators for every data-generating process in the benchmark
// suite: i.i.d. normal, g-and-k quantile distribution (plain and inside an
// endogenous regression), the Ricker state-space model with an optional
// heteroskedastic noise regime, and an MA(1) driven g-and-k returns model.

#ifndef ABCSPEC_MODELS_HPP
#define ABCSPEC_MODELS_HPP

#include <utility>
#include <vector>

#include "abcspec/rng.hpp"

namespace abcspec {

/// Parameters of the g-and-k quantile function. b > 0 and k > -0.5 keep the
/// map strictly increasing; c is conventionally fixed at 0.8.
struct GkParams {
    double a = 0.0;
    double b = 1.0;
    double g = 0.0;
    double k = 0.0;
    double c = 0.8;
};

/// Q(z) = a + b * [1 + c*(1-e^{-gz})/(1+e^{-gz})] * (1+z^2)^k * z evaluated
/// at a standard-normal deviate z.
double gk_quantile(double z, const GkParams& params);

/// Linear regression y = beta*x + u with g-and-k marginals for x and u and
/// correlation rho between their latent normals. rho = 0 is the exogenous
/// (assumed) model.
struct EndogGkParams {
    double beta = 0.5;
    double rho = 0.0;
    GkParams theta_x;
    GkParams theta_u;
};

/// Ricker population model. The latent noise s.d. switches from sigma1 to
/// sigma2 after t1 = ceil(k_break * T); sigma1 == sigma2 or k_break == 1
/// recover the homoskedastic (assumed) model.
struct RickerParams {
    double r = 44.7;
    double phi = 10.0;
    double sigma1 = 0.3;
    double sigma2 = 0.3;
    double k_break = 1.0;
    double N1 = 1.0;
    int T = 0;
};

/// MA(1) latent normals pushed through a g-and-k quantile function; the
/// latent series is standardised to unit marginal variance.
struct Ma1GkParams {
    double theta1 = 0.0;
    GkParams gk;
};

std::vector<double> simulate_normal(double theta, double sigma, int n,
                                    const SeedPath& seed);

std::pair<std::vector<double>, std::vector<double>> simulate_gk_regression(
    const EndogGkParams& params, int n, const SeedPath& seed);

/// Observed Poisson counts Y_t ~ P(phi * N_t), t = 1..T. Counts are stored
/// as doubles but are exact integers.
std::vector<double> simulate_ricker(const RickerParams& params, const SeedPath& seed);

/// Noise-free latent path N_1..N_T of the Ricker recursion
/// N_{t+1} = r N_t exp(-N_t). The map is chaotic at the benchmark growth
/// rate, so this is computed in plain (not log) arithmetic to stay
/// comparable with a direct evaluation of the recursion.
std::vector<double> ricker_skeleton(const RickerParams& params);

std::vector<double> simulate_ma1_gk(const Ma1GkParams& params, int T,
                                    const SeedPath& seed);

/// i.i.d. g-and-k draws (the quantile function applied to i.i.d. normals).
std::vector<double> simulate_gk_iid(const GkParams& params, int n, const SeedPath& seed);

}  // namespace abcspec

#endif  // ABCSPEC_MODELS_HPP
