#include "fracbilin/special.hpp"

#include "fracbilin/errors.hpp"

#include <cmath>
#include <numbers>

namespace fracbilin {

namespace {

// Lanczos, g = 7, 9 coefficients.
constexpr double kG = 7.0;
constexpr double kC[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double lanczos_positive(double z) {
    // valid for z >= 0.5
    z -= 1.0;
    double x = kC[0];
    for (int i = 1; i < 9; ++i) x += kC[i] / (z + i);
    const double t = z + kG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

bool is_nonpositive_integer(double z) {
    return z <= 0.0 && z == std::floor(z);
}

} // namespace

double gamma_fn(double z) {
    if (!std::isfinite(z)) throw DomainError("gamma_fn: argument not finite");
    if (is_nonpositive_integer(z)) throw DomainError("gamma_fn: pole at non-positive integer");
    if (z < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::numbers::pi / (std::sin(std::numbers::pi * z) * lanczos_positive(1.0 - z));
    }
    return lanczos_positive(z);
}

double log_abs_gamma(double z) {
    if (!std::isfinite(z)) throw DomainError("log_abs_gamma: argument not finite");
    if (is_nonpositive_integer(z)) throw DomainError("log_abs_gamma: pole at non-positive integer");
    if (z < 0.5) {
        return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * z))) -
               log_abs_gamma(1.0 - z);
    }
    const double zz = z - 1.0;
    double x = kC[0];
    for (int i = 1; i < 9; ++i) x += kC[i] / (zz + i);
    const double t = zz + kG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (zz + 0.5) * std::log(t) - t + std::log(std::abs(x));
}

} // namespace fracbilin
