// Counter-based random number streams keyed by hierarchical seed paths.
//
// Every random quantity in the toolkit is drawn from a stream addressed by
// (master_seed, path), where the path is a list of non-negative integers
// (experiment, replication, draw, ...). Streams with distinct paths are
// statistically independent, and a given path produces the same sequence
// no matter how work is split across threads.

#ifndef ABCSPEC_RNG_HPP
#define ABCSPEC_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace abcspec {

/// Threefry-2x64 block function, 20 rounds (Salmon et al., SC'11).
struct Threefry2x64 {
    using Block = std::array<std::uint64_t, 2>;

    static constexpr std::uint64_t kKeyParity = 0x1BD11BDAA9FC1A22ull;

    static Block encrypt(const Block& key, const Block& ctr) noexcept {
        constexpr int rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
        const std::uint64_t ks[3] = {key[0], key[1], kKeyParity ^ key[0] ^ key[1]};
        std::uint64_t x0 = ctr[0] + ks[0];
        std::uint64_t x1 = ctr[1] + ks[1];
        for (int round = 0; round < 20; ++round) {
            x0 += x1;
            x1 = rotl(x1, rot[round & 7]);
            x1 ^= x0;
            if ((round & 3) == 3) {
                const std::uint64_t s = static_cast<std::uint64_t>(round / 4) + 1;
                x0 += ks[s % 3];
                x1 += ks[(s + 1) % 3] + s;
            }
        }
        return {x0, x1};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int r) noexcept {
        return (x << r) | (x >> (64 - r));
    }
};

/// Inverse of the standard normal CDF (Wichura's PPND16, AS 241).
/// Relative accuracy about 1e-15 on p in (0,1).
double inverse_normal_cdf(double p);

/// Standard normal CDF, for test oracles and diagnostics.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

class RngStream;

/// Address of an independent random stream: a master seed plus a path of
/// child indices. Appending an element yields a stream independent of the
/// parent and of all siblings.
class SeedPath {
public:
    SeedPath() : key_{0, Threefry2x64::kKeyParity} {}

    explicit SeedPath(std::uint64_t master_seed) : master_(master_seed) {
        key_ = fold({master_seed, kMasterTag}, {0, Threefry2x64::kKeyParity});
    }

    SeedPath child(std::uint64_t element) const {
        SeedPath c(*this);
        c.key_ = fold({element, kChildTag}, key_);
        c.path_.push_back(element);
        return c;
    }

    std::uint64_t master_seed() const { return master_; }
    const std::vector<std::uint64_t>& path() const { return path_; }

    RngStream stream() const;
    /// Stream of child(element) without materialising the child path.
    /// Used in hot loops (one sub-stream per observation).
    RngStream stream_at(std::uint64_t element) const;

private:
    static constexpr std::uint64_t kMasterTag = 0x4d53544552ull;  // stream-domain tags
    static constexpr std::uint64_t kChildTag = 0x434849ull;

    static Threefry2x64::Block fold(const Threefry2x64::Block& ctr,
                                    const Threefry2x64::Block& key) {
        return Threefry2x64::encrypt(key, ctr);
    }

    std::uint64_t master_ = 0;
    std::vector<std::uint64_t> path_;
    Threefry2x64::Block key_{};

    friend class RngStream;
};

/// A deterministic stream of uniforms/normals/Poisson draws produced by
/// running Threefry in counter mode under a fixed key.
class RngStream {
public:
    explicit RngStream(Threefry2x64::Block key) : key_(key) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto block = Threefry2x64::encrypt(key_, {counter_++, kStreamTag});
        spare_ = block[1];
        have_spare_ = true;
        return block[0];
    }

    /// Uniform on the open interval (0,1); never returns an endpoint, so it
    /// is safe to feed through inverse CDFs.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    /// Standard normal via the inverse-CDF transform (no rejection, so the
    /// stream position per draw is fixed).
    double next_normal() { return inverse_normal_cdf(next_uniform()); }

    /// Unbiased-enough integer in [0, bound): multiply-shift of one u64.
    std::uint64_t next_below(std::uint64_t bound) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * bound) >> 64);
    }

    /// Poisson draw: cumulative inversion for mean <= 10, Hormann's PTRD
    /// transformed rejection above.
    long poisson(double mean);

private:
    static constexpr std::uint64_t kStreamTag = 0x53545245414dull;

    Threefry2x64::Block key_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

inline RngStream SeedPath::stream() const { return RngStream(key_); }

inline RngStream SeedPath::stream_at(std::uint64_t element) const {
    return RngStream(fold({element, kChildTag}, key_));
}

}  // namespace abcspec

#endif  // ABCSPEC_RNG_HPP
