#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace stclust {

/// Seedable random generator with a fully documented stream, so datasets are
/// reproducible across platforms. All draws derive from std::mt19937_64
/// (whose output sequence the standard pins down):
///   - uniform():     (u64() >> 11) * 2^-53, in [0, 1)
///   - normal_pair(): Box-Muller on (1 - uniform(), uniform()); two uniforms
///                    per pair, consumed in that order
///   - below(n):      unbiased rejection sampling on u64()
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t u64() { return gen_(); }

    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    std::pair<double, double> normal_pair() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = u64();
        while (x >= limit) x = u64();
        return x % n;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace stclust
