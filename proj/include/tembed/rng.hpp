#pragma once

// Counter-based random streams. Each stream is derived from (seed, stream id)
// so trajectories are reproducible regardless of scheduling or thread count.

#include <cmath>
#include <cstdint>

namespace tembed {

namespace detail {
inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream_id = 0) {
        uint64_t x = seed ^ (0x5851f42d4c957f2dULL * (stream_id + 1));
        s0_ = detail::splitmix64(x);
        s1_ = detail::splitmix64(x);
        if (s0_ == 0 && s1_ == 0) s1_ = 1;
    }

    uint64_t next_u64() {  // xoroshiro128+
        uint64_t a = s0_, b = s1_;
        uint64_t r = a + b;
        b ^= a;
        s0_ = ((a << 55) | (a >> 9)) ^ b ^ (b << 14);
        s1_ = (b << 36) | (b >> 28);
        return r;
    }

    /// Uniform in [0,1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0,1], safe for log().
    double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    /// Index in [0,n) with probability weights w (need not be normalized).
    template <class Vec>
    size_t pick_weighted(const Vec& w, double total) {
        double u = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            acc += w[i];
            if (u < acc) return i;
        }
        return w.size() - 1;
    }

  private:
    uint64_t s0_, s1_;
};

}  // namespace tembed
