// Accept/reject ABC: fill a reference table of (prior draw, summary,
// distance) records, keep the delta = ceil(alpha*N) closest, and optionally
// post-process the accepted draws with the linear regression correction.

#ifndef ABCSPEC_ABC_HPP
#define ABCSPEC_ABC_HPP

#include <iosfwd>
#include <optional>

#include "abcspec/model_spec.hpp"

namespace abcspec {

class AbcError : public std::runtime_error {
public:
    explicit AbcError(const std::string& what) : std::runtime_error(what) {}
};

/// All N records produced by the accept/reject pass. Distances are
/// recomputable bit-exactly from the stored summaries and eta_obs.
struct ReferenceTable {
    Eigen::MatrixXd draws;      // N x k_theta
    Eigen::MatrixXd summaries;  // N x k_eta
    Eigen::VectorXd distances;  // N
    SummaryVector eta_obs;
    std::vector<double> weights;  // empty = unweighted
    double alpha = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seed_path;

    long N() const { return static_cast<long>(draws.rows()); }
};

/// The delta retained draws; `adjusted` present after regression_adjust.
struct AcceptedSet {
    Eigen::MatrixXd draws;      // delta x k_theta
    Eigen::MatrixXd summaries;  // delta x k_eta
    std::optional<Eigen::MatrixXd> adjusted;
    long delta = 0;
};

/// sqrt(sum_j w_j (u_j - v_j)^2); weights default to 1.
double euclidean_distance(std::span<const double> u, std::span<const double> v,
                          std::span<const double> weights = {});

struct AbcOptions {
    long N = 0;
    double alpha = 0.0;
    std::vector<double> weights;  // optional per-component distance weights
    int threads = 1;
    int max_retries = 100;  // resimulation budget per table slot
};

struct AbcResult {
    ReferenceTable table;
    AcceptedSet accepted;
    long resimulated = 0;  // slots that needed a fresh sub-seed
};

/// Algorithm: draw theta^i from the prior, simulate pseudo-data of size n,
/// summarize, record the distance to eta_obs; accept the ceil(alpha*N)
/// smallest distances (ties broken by draw index). Bit-identical for any
/// thread count.
AbcResult abc_reject(const ModelSpec& model, const SummaryVector& eta_obs,
                     const AbcOptions& opts, int n, const SeedPath& seed);

/// Column means of the raw (or adjusted) accepted draws.
std::vector<double> posterior_mean(const AcceptedSet& accepted, bool use_adjusted);

/// Linear regression correction: beta_hat solves the summary-on-parameter
/// least squares over the accepted set, and each draw is shifted by
/// beta_hat^T (eta_obs - eta(z^i)). Originals are retained.
AcceptedSet regression_adjust(const AcceptedSet& accepted, const SummaryVector& eta_obs);

/// Columnar CSV: theta_1..theta_kt, eta_1..eta_ke, dist.
void write_reference_table_csv(const ReferenceTable& table, std::ostream& out);

/// Binary cache: magic "ABCRT\0\0\1", then little-endian u64 dimensions and
/// row-major little-endian f64 payload.
void write_reference_table_binary(const ReferenceTable& table, std::ostream& out);
ReferenceTable read_reference_table_binary(std::istream& in);

}  // namespace abcspec

#endif  // ABCSPEC_ABC_HPP
