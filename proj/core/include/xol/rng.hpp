#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace xol {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic 64-bit engine. Uniform variates are built from the top 53
// bits of the engine output, so streams are identical across standard
// libraries (std::uniform_real_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Independent substream keyed by (seed, k0, k1, ...). Used so that
    // replication r draws the same numbers regardless of thread scheduling.
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t h = splitmix64(seed);
        for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
        return Rng(h);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace xol
