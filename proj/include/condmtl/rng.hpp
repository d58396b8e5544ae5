#ifndef CONDMTL_RNG_HPP
#define CONDMTL_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace condmtl {

/// Seeded generator with hand-rolled draw helpers. mt19937_64 output is fully
/// specified by the standard, and we avoid std::uniform_*_distribution whose
/// results vary between standard library implementations, so identical seeds
/// give identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-limit, limit).
    double uniform_symmetric(double limit) { return (2.0 * uniform() - 1.0) * limit; }

    /// Uniform index in [0, bound); bound must be > 0.
    std::size_t below(std::size_t bound) {
        const auto wide = static_cast<unsigned __int128>(engine_());
        return static_cast<std::size_t>((wide * bound) >> 64);
    }

    /// Fisher-Yates shuffle of an index vector.
    void shuffle(std::vector<std::size_t>& indices) {
        for (std::size_t i = indices.size(); i > 1; --i) {
            std::swap(indices[i - 1], indices[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace condmtl

#endif  // CONDMTL_RNG_HPP
