#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace fresco {

// SplitMix64 finalizer. Used for seed derivation so that independent
// streams (per client, per round, per day) never collide by accident.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives a child seed from a master seed and a path of indices.
// Adding elements to the end of the path never perturbs seeds derived
// from shorter or different paths.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t v : path) {
        h = splitmix64(h ^ splitmix64(v + 0x9E3779B97F4A7C15ULL));
    }
    return h;
}

// Seeded random source. mt19937_64 is fully specified by the standard,
// so sequences are identical across platforms. Gaussians come from the
// Box-Muller transform rather than std::normal_distribution, whose
// algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Box-Muller; consumes exactly two uniform draws per call.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        // Avoid log(0); 1-u1 lies in (0, 1].
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        double z = r * std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fresco
