#ifndef EDKIT_RNG_HPP
#define EDKIT_RNG_HPP

#include <cstdint>
#include <random>

namespace edkit {

/// Seedable random source shared by the stochastic solvers.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard,
/// and converts draws to doubles with a 53-bit shift instead of
/// std::uniform_real_distribution (whose draw sequence is
/// implementation-defined). Identical seeds therefore produce
/// bit-identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in {0, ..., n-1}; n must be positive.
    std::size_t uniform_index(std::size_t n)
    {
        return static_cast<std::size_t>(engine_() % n);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace edkit

#endif  // EDKIT_RNG_HPP
