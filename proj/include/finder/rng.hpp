#pragma once

#include <cstdint>
#include <span>

namespace finder {

/// Deterministic splitmix64 generator. All simulation randomness flows through
/// this so results are reproducible across platforms and standard libraries
/// (std:: distributions are implementation-defined and would break the
/// byte-identical-output guarantee).
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Uniform double in [0, 1).
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Index sampled proportionally to nonnegative weights. Zero total weight
    /// falls back to index 0.
    size_t weighted_index(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) return 0;
        double r = uniform_real() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    uint64_t state_;
};

/// Stable seed derivation for independent streams (episode index, policy id,
/// spawn sampling, ...). Mixes through splitmix64 twice so low-entropy inputs
/// still produce uncorrelated streams.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
    Rng r(master ^ (0xd1b54a32d192ed03ULL * (stream + 0x632be59bd9b4e019ULL)));
    r.next_u64();
    return r.next_u64();
}

inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

}  // namespace finder
