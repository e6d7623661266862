#pragma once

#include <cstdint>
#include <random>

namespace macsim {

/// splitmix64 step; used to derive independent per-replication seed streams
/// from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

/// mt19937_64 with hand-rolled distributions. std::uniform_*_distribution is
/// not pinned by the standard; these are, so event logs diff identically
/// across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection-free multiply-shift would bias by
    /// < 2^-64; the simple rejection loop keeps it exact.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    std::int64_t next_range(std::int64_t lo, std::int64_t hi_exclusive) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi_exclusive - lo)));
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace macsim
