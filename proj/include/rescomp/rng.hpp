#pragma once

#include <cmath>
#include <cstdint>

namespace rescomp {

// Counter-based 64-bit generator (SplitMix64 finalizer applied to
// seed + counter).  Every draw is addressed by an explicit counter, so
// streams are reproducible bit-for-bit and safe to evaluate in any order
// or from any thread.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    /// Raw 64 bits for a given counter.
    [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const {
        return finalize(seed_ + (counter + 1) * kGamma);
    }

    /// Uniform double in [0, 1).
    [[nodiscard]] double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; never returns 0 (safe for log()).
    [[nodiscard]] double uniform_open(std::uint64_t counter) const {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform double in [-1, 1).
    [[nodiscard]] double uniform_symmetric(std::uint64_t counter) const {
        return 2.0 * uniform(counter) - 1.0;
    }

    /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    [[nodiscard]] double gaussian(std::uint64_t counter) const {
        const double u1 = uniform_open(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Derive an independent stream for a tagged sub-purpose.
    [[nodiscard]] CounterRng substream(std::uint64_t tag) const {
        return CounterRng(finalize(seed_ ^ finalize(tag + 0x517cc1b727220a95ULL)));
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace rescomp
