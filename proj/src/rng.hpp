#ifndef DTOTSIM_RNG_H
#define DTOTSIM_RNG_H

#include <cstdint>

namespace dtotsim {

// splitmix64 finalizer; used to spread user seeds and derive stream ids.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// PCG32 (XSH-RR): small, fast, reproducible across platforms. Every
// (seed, stream) pair is an independent sequence, so simulation code can
// hand out one stream per (road, purpose) without draw-order coupling.
class Pcg32 {
  public:
    Pcg32() : Pcg32(0, 0) {}
    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (mix64(stream) << 1u) | 1u;
        state_ = 0u;
        next();
        state_ += mix64(seed);
        next();
    }

    std::uint32_t next() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // uniform in [0, 1) with 32-bit resolution
    double uniform() { return next() * (1.0 / 4294967296.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

// Named purposes for the per-road substreams.
enum class RngPurpose : std::uint64_t {
    kSpawn = 1,  // per-second arrival draws
    kRoute = 2,  // left/straight/right choice
    kSpeed = 3,  // initial speed fraction
};

// One independent stream per (scenario seed, road, purpose).
inline Pcg32 makeStream(std::uint64_t seed, int road, RngPurpose purpose) {
    std::uint64_t stream =
        mix64(static_cast<std::uint64_t>(road) * 0x100 + static_cast<std::uint64_t>(purpose));
    return Pcg32(seed, stream);
}

}  // namespace dtotsim

#endif
