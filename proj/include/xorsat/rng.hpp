#pragma once

#include <cstdint>
#include <vector>

namespace xorsat {

// splitmix64 generator. The standard <random> distributions and std::shuffle
// are implementation-defined, so every seeded choice in this library goes
// through this class to keep runs reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n); n == 0 yields 0. Modulo bias is negligible for the
    // small ranges used here.
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    // Uniform in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin(double p) { return unit() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::uint64_t state_;
};

// Decorrelates per-call seeds derived from one user-facing seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0xa0761d6478bd642fULL * (stream + 1)));
    return r.next();
}

}  // namespace xorsat
