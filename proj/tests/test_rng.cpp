#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "abcspec/parallel.hpp"
#include "abcspec/rng.hpp"
#include "oracles.hpp"

using namespace abcspec;

TEST_CASE("threefry2x64-20 known-answer vectors") {
    // Reference vectors from the Random123 test suite.
    {
        const auto out = Threefry2x64::encrypt({0, 0}, {0, 0});
        CHECK(out[0] == 0xc2b6e3a8c2c69865ull);
        CHECK(out[1] == 0x6f81ed42f350084dull);
    }
    {
        const auto out = Threefry2x64::encrypt({0xffffffffffffffffull, 0xffffffffffffffffull},
                                               {0xffffffffffffffffull, 0xffffffffffffffffull});
        CHECK(out[0] == 0xe02cb7c4d95d277aull);
        CHECK(out[1] == 0xd06633d0893b8b68ull);
    }
    {
        const auto out = Threefry2x64::encrypt({0xa4093822299f31d0ull, 0x082efa98ec4e6c89ull},
                                               {0x243f6a8885a308d3ull, 0x13198a2e03707344ull});
        CHECK(out[0] == 0x263c7d30bb0f0af1ull);
        CHECK(out[1] == 0x56be8361d3311526ull);
    }
}

TEST_CASE("seed paths: identical paths give identical streams") {
    const SeedPath a = SeedPath(42).child(3).child(7);
    const SeedPath b = SeedPath(42).child(3).child(7);
    RngStream sa = a.stream();
    RngStream sb = b.stream();
    for (int i = 0; i < 100; ++i) {
        CHECK(sa.next_u64() == sb.next_u64());
    }
}

TEST_CASE("seed paths: children, siblings and prefixes differ") {
    const SeedPath root(42);
    RngStream s0 = root.child(0).stream();
    RngStream s1 = root.child(1).stream();
    RngStream s00 = root.child(0).child(0).stream();
    RngStream sroot = root.stream();
    const auto v0 = s0.next_u64();
    CHECK(v0 != s1.next_u64());
    CHECK(v0 != s00.next_u64());
    CHECK(v0 != sroot.next_u64());

    // Different master seeds diverge even on the same path.
    RngStream other = SeedPath(43).child(0).stream();
    CHECK(v0 != other.next_u64());
}

TEST_CASE("stream_at matches child().stream()") {
    const SeedPath root(9);
    RngStream via_child = root.child(5).stream();
    RngStream via_at = root.stream_at(5);
    for (int i = 0; i < 16; ++i) {
        CHECK(via_child.next_u64() == via_at.next_u64());
    }
}

TEST_CASE("uniforms live strictly inside (0,1) and have the right moments") {
    RngStream s = SeedPath(7).stream();
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("inverse_normal_cdf inverts the erfc-based CDF") {
    // Spot probabilities across the central and tail branches.
    const double probs[] = {1e-12, 1e-6, 1e-3, 0.025, 0.25, 0.5,
                            0.75,  0.975, 1.0 - 1e-3, 1.0 - 1e-6};
    for (double p : probs) {
        const double x = inverse_normal_cdf(p);
        CHECK(std::fabs(normal_cdf(x) - p) <= 1e-10 * std::max(1.0, std::fabs(p)) + 1e-14);
    }
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS(inverse_normal_cdf(0.0));
    CHECK_THROWS(inverse_normal_cdf(1.0));
}

TEST_CASE("normal draws: sample moments at 3 standard errors") {
    RngStream s = SeedPath(11).stream();
    const int n = 100000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.next_normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(sd - 1.0) < 0.02);
}

TEST_CASE("poisson: moments across the inversion/PTRD split") {
    for (double mean : {0.5, 3.0, 9.5, 12.0, 80.0, 400.0}) {
        RngStream s = SeedPath(13).child(static_cast<std::uint64_t>(mean * 10)).stream();
        const int n = 60000;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(s.poisson(mean));
            REQUIRE(k >= 0.0);
            sum += k;
            sum_sq += k * k;
        }
        const double m = sum / n;
        const double v = sum_sq / n - m * m;
        const double se_mean = std::sqrt(mean / n);
        CHECK(std::fabs(m - mean) < 4.0 * se_mean);
        // var(X) = mean; the variance estimator's own s.e. is about
        // sqrt((2*mean^2 + mean)/n).
        const double se_var = std::sqrt((2.0 * mean * mean + mean) / n);
        CHECK(std::fabs(v - mean) < 4.0 * se_var);
    }
    RngStream zero = SeedPath(1).stream();
    CHECK(zero.poisson(0.0) == 0);
    CHECK(zero.poisson(-1.0) == 0);
}

TEST_CASE("streams are reproducible under parallel interleaving") {
    // Fill a table two ways: serially and with a worker pool; identical bits.
    const SeedPath root(99);
    const std::size_t count = 64;
    std::vector<double> serial(count);
    std::vector<double> parallel(count);
    for (std::size_t i = 0; i < count; ++i) {
        RngStream s = root.child(i).stream();
        serial[i] = s.next_normal() + s.next_uniform();
    }
    parallel_for(count, 4, [&](std::size_t i) {
        RngStream s = root.child(i).stream();
        parallel[i] = s.next_normal() + s.next_uniform();
    });
    for (std::size_t i = 0; i < count; ++i) {
        CHECK(serial[i] == parallel[i]);
    }
}

TEST_CASE("disjoint streams are empirically uncorrelated") {
    RngStream a = SeedPath(5).child(0).stream();
    RngStream b = SeedPath(5).child(1).stream();
    const int n = 20000;
    double dot = 0.0;
    for (int i = 0; i < n; ++i) {
        dot += (a.next_uniform() - 0.5) * (b.next_uniform() - 0.5);
    }
    const double corr = dot / n / (1.0 / 12.0);
    CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}
