#pragma once

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <vector>

namespace odstop {

// Seeded 64-bit generator (splitmix64). All randomness in the toolkit flows
// through this type so that runs are bit-reproducible for a fixed seed,
// independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller. Draws a fresh pair per call (the spare
    // is discarded) so the generator state never depends on call history
    // beyond the number of calls.
    double normal() {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Uniform index in [0, n). Modulo bias is ~n * 2^-64, irrelevant here.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = below(i + 1);
            T tmp = v[i];
            v[i] = v[j];
            v[j] = tmp;
        }
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream index
// (used e.g. to reshuffle batches per epoch).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return r.next_u64();
}

}  // namespace odstop
