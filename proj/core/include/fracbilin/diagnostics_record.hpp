#pragma once

#include <cstdint>
#include <string>

namespace fracbilin {

// One verified inequality or identity.  `margin` is the absolute slack
// rhs - lhs (or a check-specific signed distance when noted); failures are
// recorded, not thrown.
struct CheckEntry {
    std::string name;
    std::string anchor; // short tag tying the check to its derivation
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    double margin = 0.0;
    std::uint64_t seed = 0;
};

} // namespace fracbilin
