// Tiny synthetic ModelSpecs for exercising the ABC engine and diagnostics
// without the cost of the real simulators.

#ifndef ABCSPEC_TESTS_STUBS_HPP
#define ABCSPEC_TESTS_STUBS_HPP

#include "abcspec/model_spec.hpp"
#include "abcspec/models.hpp"
#include "abcspec/summaries.hpp"

namespace stubs {

// theta ~ U(0,1); data = n i.i.d. N(theta, 1) observations; summaries
// (mean, second central moment). k_eta = 2 > k_theta = 1.
inline abcspec::ModelSpec tiny_normal() {
    abcspec::ModelSpec m;
    m.name = "stub-normal";
    m.param_names = {"theta"};
    m.prior = {{0.0, 1.0}};
    m.k_eta = 2;
    m.scalar_pp_index = 0;
    m.time_series = false;
    m.simulate = [](std::span<const double> theta, int n, const abcspec::SeedPath& seed) {
        return abcspec::Dataset{{abcspec::simulate_normal(theta[0], 1.0, n, seed)}};
    };
    m.summarize = [](const abcspec::Dataset& d) {
        return abcspec::summaries_normal(d.cols[0]);
    };
    m.variance = [](const abcspec::Dataset& d, const abcspec::VarianceConfig&,
                    const abcspec::SeedPath&) {
        return abcspec::plugin_variance(abcspec::per_obs_summaries_normal(d.cols[0]));
    };
    return m;
}

// Simulator that reproduces a fixed dataset whatever theta is: the summary
// of every pseudo-data set equals the observed summary exactly.
inline abcspec::ModelSpec echo_model(const abcspec::Dataset& fixed) {
    abcspec::ModelSpec m = tiny_normal();
    m.name = "stub-echo";
    m.simulate = [fixed](std::span<const double>, int, const abcspec::SeedPath&) {
        return fixed;
    };
    return m;
}

}  // namespace stubs

#endif  // ABCSPEC_TESTS_STUBS_HPP
