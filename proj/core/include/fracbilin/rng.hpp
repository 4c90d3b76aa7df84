#pragma once

#include <cstdint>
#include <random>

namespace fracbilin {

// Seeded generator used for every randomized draw in the project.  The
// uniform mapping is spelled out here (rather than going through
// std::uniform_real_distribution) so that streams are reproducible across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform in {0, 1, ..., n-1}; n must be positive
    std::uint64_t index(std::uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
};

} // namespace fracbilin
