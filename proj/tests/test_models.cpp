#include <doctest.h>

#include <cmath>

#include "abcspec/models.hpp"
#include "abcspec/numerics.hpp"
#include "oracles.hpp"

using namespace abcspec;

TEST_CASE("gk_quantile: closed-form spot values") {
    GkParams p;
    SUBCASE("z = 0 returns the location parameter") {
        p = {3.7, 2.0, 1.5, 0.3, 0.8};
        CHECK(gk_quantile(0.0, p) == 3.7);
    }
    SUBCASE("g = k = 0 reduces to a + b z exactly") {
        p = {0.0, 1.0, 0.0, 0.0, 0.8};
        CHECK(gk_quantile(1.0, p) == 1.0);
        p = {2.0, 3.0, 0.0, 0.0, 0.8};
        for (double z : {-2.5, -1.0, 0.25, 1.75}) {
            CHECK(gk_quantile(z, p) == 2.0 + 3.0 * z);
        }
    }
    SUBCASE("benchmark parameterisation at z = 1") {
        p = {0.0, 1.0, 2.0, 1.0, 0.8};
        CHECK(gk_quantile(1.0, p) == doctest::Approx(3.218551).epsilon(1e-6));
        // Same value via the explicit exponential form.
        const double expf = (1.0 - std::exp(-2.0)) / (1.0 + std::exp(-2.0));
        CHECK(gk_quantile(1.0, p) ==
              doctest::Approx((1.0 + 0.8 * expf) * 2.0).epsilon(1e-12));
    }
}

TEST_CASE("gk_quantile is strictly increasing on [-8, 8] for valid params") {
    for (double b : {0.5, 1.0, 2.0}) {
        for (double g : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
            for (double k : {-0.4, 0.0, 0.5, 2.0}) {
                const GkParams p{0.0, b, g, k, 0.8};
                double prev = gk_quantile(-8.0, p);
                for (double z = -7.9; z <= 8.0; z += 0.1) {
                    const double q = gk_quantile(z, p);
                    CHECK(q > prev);
                    prev = q;
                }
            }
        }
    }
}

TEST_CASE("simulate_normal: limits, moments, determinism") {
    const SeedPath seed(21);
    SUBCASE("sigma -> 0 collapses to theta") {
        const auto y = simulate_normal(0.7, 0.0, 50, seed);
        for (double v : y) CHECK(v == 0.7);
    }
    SUBCASE("standard normal moments at n = 1e5") {
        const auto y = simulate_normal(0.0, 1.0, 100000, seed);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (double v : y) {
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / static_cast<double>(y.size());
        const double sd = std::sqrt(sum_sq / static_cast<double>(y.size()) - mean * mean);
        CHECK(std::fabs(mean) < 0.02);
        CHECK(std::fabs(sd - 1.0) < 0.02);
    }
    SUBCASE("same seed, same series") {
        const auto a = simulate_normal(0.3, 1.2, 1000, seed.child(5));
        const auto b = simulate_normal(0.3, 1.2, 1000, seed.child(5));
        CHECK(a == b);
        const auto c = simulate_normal(0.3, 1.2, 1000, seed.child(6));
        CHECK(a != c);
    }
}

TEST_CASE("simulate_gk_regression: latent correlation and slope recovery") {
    EndogGkParams p;
    p.theta_x = GkParams{0.0, 1.0, 2.0, 1.0, 0.8};
    p.theta_u = p.theta_x;
    p.beta = 0.5;

    SUBCASE("rho = 1 with equal marginals gives u = x, i.e. y = (1+beta) x") {
        p.rho = 1.0;
        const auto [x, y] = simulate_gk_regression(p, 500, SeedPath(31));
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(y[i] == doctest::Approx(1.5 * x[i]).epsilon(1e-12));
        }
    }

    SUBCASE("rho = 0: OLS slope converges to beta by exogeneity") {
        p.rho = 0.0;
        const int n = 100000;
        const auto [x, y] = simulate_gk_regression(p, n, SeedPath(32));
        double sxy = 0.0;
        double sxx = 0.0;
        for (int i = 0; i < n; ++i) {
            sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        }
        CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.1));  // +- 0.05 absolute
    }

    SUBCASE("rho = 0: empirical correlation of the g-and-k pair is near zero") {
        p.rho = 0.0;
        const int n = 40000;
        const auto [x, y] = simulate_gk_regression(p, n, SeedPath(33));
        // u = y - beta x; corr(x, u) should vanish.
        double mx = 0.0;
        double mu = 0.0;
        std::vector<double> u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            u[i] = y[i] - 0.5 * x[i];
            mx += x[i];
            mu += u[i];
        }
        mx /= static_cast<double>(n);
        mu /= static_cast<double>(n);
        double sxx = 0.0;
        double suu = 0.0;
        double sxu = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            suu += (u[i] - mu) * (u[i] - mu);
            sxu += (x[i] - mx) * (u[i] - mu);
        }
        const double corr = sxu / std::sqrt(sxx * suu);
        // Heavy-tailed marginals (k = 1) inflate the correlation estimator's
        // variance well beyond the Gaussian 1/sqrt(n) rate.
        CHECK(std::fabs(corr) < 0.05);
    }
}

TEST_CASE("simulate_ricker: skeleton recursion, limits, regimes") {
    SUBCASE("deterministic skeleton matches an independent recursion") {
        RickerParams p;
        p.r = 44.7;
        p.phi = 10.0;
        p.sigma1 = 0.0;
        p.sigma2 = 0.0;
        p.N1 = 1.0;
        p.T = 50;
        p.k_break = 1.0;
        const auto skel = ricker_skeleton(p);
        REQUIRE(skel.size() == 50);
        CHECK(skel[1] == doctest::Approx(44.7 * std::exp(-1.0)).epsilon(1e-15));
        double n_t = 1.0;
        for (std::size_t t = 0; t < skel.size(); ++t) {
            CHECK(skel[t] == doctest::Approx(n_t).epsilon(1e-12).scale(n_t + 1.0));
            n_t = 44.7 * n_t * std::exp(-n_t);
        }
        // With sigma = 0 the stochastic simulator follows the same path; the
        // map is chaotic, so only the early steps are comparable across the
        // log-space and plain recursions. Counts are Poisson around phi*N_t.
        const auto y = simulate_ricker(p, SeedPath(41));
        REQUIRE(y.size() == 50);
        for (std::size_t t = 0; t < y.size(); ++t) {
            CHECK(y[t] >= 0.0);
            CHECK(y[t] == std::floor(y[t]));
            if (t < 12) {
                const double mean = 10.0 * skel[t];
                CHECK(std::fabs(y[t] - mean) < 6.0 * std::sqrt(mean + 1.0) + 1.0);
            }
        }
    }
    SUBCASE("phi -> 0 gives all-zero counts") {
        RickerParams p;
        p.r = 44.7;
        p.phi = 0.0;
        p.sigma1 = 1.3;
        p.sigma2 = 0.3;
        p.k_break = 0.6;
        p.N1 = 1.0;
        p.T = 30;
        const auto y = simulate_ricker(p, SeedPath(42));
        for (double v : y) CHECK(v == 0.0);
    }
    SUBCASE("k_break = 1 makes sigma2 irrelevant") {
        RickerParams a;
        a.r = 44.7;
        a.phi = 10.0;
        a.sigma1 = 1.3;
        a.sigma2 = 0.3;
        a.k_break = 1.0;
        a.N1 = 1.0;
        a.T = 200;
        RickerParams b = a;
        b.sigma2 = 1.3;  // the homoskedastic model with sigma = sigma1
        CHECK(simulate_ricker(a, SeedPath(43)) == simulate_ricker(b, SeedPath(43)));
    }
}

TEST_CASE("simulate_ma1_gk: standardisation and MA(1) autocorrelation") {
    // Identity g-and-k (a=0, b=1, g=0, k=0) exposes the latent series.
    Ma1GkParams p;
    p.gk = GkParams{0.0, 1.0, 0.0, 0.0, 0.8};

    SUBCASE("latent variance is 1 and acf(1) = theta1/(1+theta1^2)") {
        p.theta1 = 0.5;
        const int T = 200000;
        const auto z = simulate_ma1_gk(p, T, SeedPath(51));
        double sum = 0.0;
        double sum_sq = 0.0;
        for (double v : z) {
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / T;
        const double var = sum_sq / T - mean * mean;
        CHECK(var == doctest::Approx(1.0).epsilon(0.02));
        CHECK(autocorrelation(z, 1).value == doctest::Approx(0.4).epsilon(0.03));
    }

    SUBCASE("theta1 = 0 gives an i.i.d. sequence (acf near zero)") {
        p.theta1 = 0.0;
        const auto z = simulate_ma1_gk(p, 50000, SeedPath(52));
        CHECK(std::fabs(autocorrelation(z, 1).value) < 4.0 / std::sqrt(50000.0));
    }

    SUBCASE("deterministic per seed") {
        p.theta1 = 0.2;
        CHECK(simulate_ma1_gk(p, 100, SeedPath(53)) == simulate_ma1_gk(p, 100, SeedPath(53)));
    }
}

TEST_CASE("simulators: disjoint seed paths give uncorrelated outputs") {
    const int T = 10000;
    const auto a = simulate_normal(0.0, 1.0, T, SeedPath(61).child(0));
    const auto b = simulate_normal(0.0, 1.0, T, SeedPath(61).child(1));
    double dot = 0.0;
    for (int i = 0; i < T; ++i) {
        dot += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    CHECK(std::fabs(dot / T) < 4.0 / std::sqrt(static_cast<double>(T)));
}
