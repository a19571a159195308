#include "abcspec/abc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>

#include "abcspec/parallel.hpp"

namespace abcspec {

double euclidean_distance(std::span<const double> u, std::span<const double> v,
                          std::span<const double> weights) {
    if (u.size() != v.size() || (!weights.empty() && weights.size() != u.size())) {
        throw AbcError("length-mismatch");
    }
    double ss = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        ss += weights.empty() ? d * d : weights[j] * d * d;
    }
    return std::sqrt(ss);
}

AbcResult abc_reject(const ModelSpec& model, const SummaryVector& eta_obs,
                     const AbcOptions& opts, int n, const SeedPath& seed) {
    if (opts.N < 1 || opts.alpha <= 0.0 || opts.alpha > 1.0) {
        throw AbcError("bad-abc-options");
    }
    if (static_cast<double>(opts.N) < 1.0 / opts.alpha) {
        throw AbcError("table-too-small-for-alpha");
    }
    if (static_cast<int>(eta_obs.size()) != model.k_eta) {
        throw AbcError("length-mismatch");
    }

    const long N = opts.N;
    const int k_theta = model.k_theta();
    const int k_eta = model.k_eta;

    AbcResult result;
    result.table.draws.resize(N, k_theta);
    result.table.summaries.resize(N, k_eta);
    result.table.distances.resize(N);
    result.table.eta_obs = eta_obs;
    result.table.weights = opts.weights;
    result.table.alpha = opts.alpha;
    result.table.master_seed = seed.master_seed();
    result.table.seed_path = seed.path();

    std::atomic<long> resim_count{0};
    auto fill_row = [&](std::size_t i) {
        const SeedPath row_seed = seed.child(static_cast<std::uint64_t>(i));
        for (int attempt = 0;; ++attempt) {
            const SeedPath attempt_seed = row_seed.child(static_cast<std::uint64_t>(attempt));
            try {
                RngStream prior_rng = attempt_seed.stream_at(0);
                const std::vector<double> theta = model.sample_prior(prior_rng);
                const Dataset z = model.simulate(theta, n, attempt_seed.child(1));
                const SummaryVector eta_z = model.summarize(z);
                for (int j = 0; j < k_theta; ++j) {
                    result.table.draws(static_cast<Eigen::Index>(i), j) = theta[static_cast<std::size_t>(j)];
                }
                for (int j = 0; j < k_eta; ++j) {
                    result.table.summaries(static_cast<Eigen::Index>(i), j) =
                        eta_z[static_cast<std::size_t>(j)];
                }
                result.table.distances(static_cast<Eigen::Index>(i)) =
                    euclidean_distance(eta_z, eta_obs, opts.weights);
                if (attempt > 0) {
                    resim_count.fetch_add(attempt, std::memory_order_relaxed);
                }
                return;
            } catch (const std::exception&) {
                if (attempt + 1 >= opts.max_retries) {
                    throw AbcError("simulator-failed-after-retries");
                }
            }
        }
    };
    parallel_for(static_cast<std::size_t>(N), opts.threads, fill_row);
    result.resimulated = resim_count.load();

    // Rank records by (distance, index): the index part makes ties, and
    // therefore the whole accepted set, deterministic.
    const long delta = static_cast<long>(
        std::ceil(opts.alpha * static_cast<double>(N)));
    std::vector<long> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0L);
    std::nth_element(order.begin(), order.begin() + (delta - 1), order.end(),
                     [&](long a, long b) {
                         const double da = result.table.distances(a);
                         const double db = result.table.distances(b);
                         return da < db || (da == db && a < b);
                     });
    std::sort(order.begin(), order.begin() + delta, [&](long a, long b) {
        const double da = result.table.distances(a);
        const double db = result.table.distances(b);
        return da < db || (da == db && a < b);
    });

    result.accepted.delta = delta;
    result.accepted.draws.resize(delta, k_theta);
    result.accepted.summaries.resize(delta, k_eta);
    for (long i = 0; i < delta; ++i) {
        result.accepted.draws.row(i) = result.table.draws.row(order[static_cast<std::size_t>(i)]);
        result.accepted.summaries.row(i) =
            result.table.summaries.row(order[static_cast<std::size_t>(i)]);
    }
    return result;
}

std::vector<double> posterior_mean(const AcceptedSet& accepted, bool use_adjusted) {
    if (accepted.delta < 1) {
        throw AbcError("empty-accepted-set");
    }
    if (use_adjusted && !accepted.adjusted.has_value()) {
        throw AbcError("no-adjusted-draws");
    }
    const Eigen::MatrixXd& draws =
        use_adjusted ? *accepted.adjusted : accepted.draws;
    const Eigen::RowVectorXd mean = draws.colwise().mean();
    return std::vector<double>(mean.data(), mean.data() + mean.size());
}

AcceptedSet regression_adjust(const AcceptedSet& accepted, const SummaryVector& eta_obs) {
    const long delta = accepted.delta;
    const Eigen::Index k_eta = accepted.summaries.cols();
    if (delta <= k_eta + 1) {
        throw AbcError("too-few-draws-for-adjustment");
    }
    const Eigen::RowVectorXd eta_bar = accepted.summaries.colwise().mean();
    const Eigen::RowVectorXd theta_bar = accepted.draws.colwise().mean();
    const Eigen::MatrixXd eta_c = accepted.summaries.rowwise() - eta_bar;
    const Eigen::MatrixXd theta_c = accepted.draws.rowwise() - theta_bar;

    const double inv_delta = 1.0 / static_cast<double>(delta);
    const Eigen::MatrixXd S = inv_delta * (eta_c.transpose() * eta_c);
    const Eigen::MatrixXd C = inv_delta * (eta_c.transpose() * theta_c);
    double ridge = 0.0;
    Eigen::MatrixXd S_inv;
    try {
        S_inv = invert_psd(S, &ridge, "singular-summary-covariance");
    } catch (const NumericsError& e) {
        throw AbcError(e.what());
    }
    const Eigen::MatrixXd beta_hat = S_inv * C;  // k_eta x k_theta

    Eigen::Map<const Eigen::RowVectorXd> eta_y(eta_obs.data(),
                                               static_cast<Eigen::Index>(eta_obs.size()));
    AcceptedSet out = accepted;
    // theta~^i = theta^i + beta^T (eta(y) - eta(z^i))
    out.adjusted = accepted.draws +
                   (eta_y.replicate(delta, 1) - accepted.summaries) * beta_hat;
    return out;
}

namespace {

constexpr char kMagic[8] = {'A', 'B', 'C', 'R', 'T', '\0', '\0', '\1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(buf, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    }
    return v;
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_csv_value(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

void write_reference_table_csv(const ReferenceTable& table, std::ostream& out) {
    const Eigen::Index k_theta = table.draws.cols();
    const Eigen::Index k_eta = table.summaries.cols();
    for (Eigen::Index j = 0; j < k_theta; ++j) {
        out << "theta_" << (j + 1) << ",";
    }
    for (Eigen::Index j = 0; j < k_eta; ++j) {
        out << "eta_" << (j + 1) << ",";
    }
    out << "dist\n";
    for (Eigen::Index i = 0; i < table.draws.rows(); ++i) {
        for (Eigen::Index j = 0; j < k_theta; ++j) {
            write_csv_value(out, table.draws(i, j));
            out << ",";
        }
        for (Eigen::Index j = 0; j < k_eta; ++j) {
            write_csv_value(out, table.summaries(i, j));
            out << ",";
        }
        write_csv_value(out, table.distances(i));
        out << "\n";
    }
}

void write_reference_table_binary(const ReferenceTable& table, std::ostream& out) {
    out.write(kMagic, 8);
    const std::uint64_t n = static_cast<std::uint64_t>(table.draws.rows());
    const std::uint64_t k_theta = static_cast<std::uint64_t>(table.draws.cols());
    const std::uint64_t k_eta = static_cast<std::uint64_t>(table.summaries.cols());
    put_u64(out, n);
    put_u64(out, k_theta);
    put_u64(out, k_eta);
    put_u64(out, table.master_seed);
    put_u64(out, static_cast<std::uint64_t>(table.seed_path.size()));
    for (std::uint64_t e : table.seed_path) {
        put_u64(out, e);
    }
    put_f64(out, table.alpha);
    for (double v : table.eta_obs) {
        put_f64(out, v);
    }
    put_u64(out, static_cast<std::uint64_t>(table.weights.size()));
    for (double w : table.weights) {
        put_f64(out, w);
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < k_theta; ++j) {
            put_f64(out, table.draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        for (std::uint64_t j = 0; j < k_eta; ++j) {
            put_f64(out, table.summaries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        put_f64(out, table.distances(static_cast<Eigen::Index>(i)));
    }
}

ReferenceTable read_reference_table_binary(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw AbcError("bad-table-magic");
    }
    ReferenceTable table;
    const std::uint64_t n = get_u64(in);
    const std::uint64_t k_theta = get_u64(in);
    const std::uint64_t k_eta = get_u64(in);
    table.master_seed = get_u64(in);
    const std::uint64_t path_len = get_u64(in);
    table.seed_path.resize(path_len);
    for (auto& e : table.seed_path) {
        e = get_u64(in);
    }
    table.alpha = get_f64(in);
    table.eta_obs.resize(k_eta);
    for (auto& v : table.eta_obs) {
        v = get_f64(in);
    }
    const std::uint64_t w_len = get_u64(in);
    table.weights.resize(w_len);
    for (auto& w : table.weights) {
        w = get_f64(in);
    }
    table.draws.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_theta));
    table.summaries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_eta));
    table.distances.resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < k_theta; ++j) {
            table.draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = get_f64(in);
        }
        for (std::uint64_t j = 0; j < k_eta; ++j) {
            table.summaries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = get_f64(in);
        }
        table.distances(static_cast<Eigen::Index>(i)) = get_f64(in);
    }
    if (!in) {
        throw AbcError("truncated-table");
    }
    return table;
}

}  // namespace abcspec
