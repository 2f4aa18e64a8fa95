#ifndef SWARMSIM_RNG_HPP
#define SWARMSIM_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace swarmsim {

// Deterministic RNG: mt19937_64 core with hand-rolled draws. The std
// distribution classes are implementation-defined, so traces produced through
// them would not replay across standard libraries; these draws are pinned.
class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). Modulo bias is negligible for simulation-scale n.
    uint64_t bounded(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    // Uniform double in [0, 1) with 53 bits of randomness.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derives an independent stream seed, e.g. one per (seed index, algo) cell.
    static uint64_t derive_seed(uint64_t base, uint64_t index) {
        uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace swarmsim

#endif  // SWARMSIM_RNG_HPP
