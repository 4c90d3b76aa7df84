#pragma once

#include "fracbilin/adjoint.hpp"
#include "fracbilin/diagnostics_record.hpp"
#include "fracbilin/fracop.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracbilin {

enum class Suite { None, MaxPrinciple, Estimates, Lipschitz, Derivatives, Adjointness, All };

/// Accepts maxprinciple | estimates | lipschitz | derivatives | adjointness
/// | all | none.  Throws ParseError otherwise.
Suite parse_suite(const std::string& name);
std::string suite_name(Suite s);

struct DiagnosticsReport {
    std::vector<CheckEntry> entries; // sorted by name, independent of run order
    int n_pass = 0;
    int n_fail = 0;
};

/// Runs the named property suite at the given discretization.  Failures
/// become failing entries, never exceptions; the report is
/// bitwise-deterministic for a fixed config and seed.
DiagnosticsReport run_suite(const ProblemSpec& spec, const Discretization& disc, Suite suite,
                            std::uint64_t seed);

struct LipschitzReport {
    int n_pairs = 0;
    std::uint64_t seed = 0;
    std::vector<double> ratios;   // squared state-difference over control-difference
    double max_ratio = 0.0;       // at the given resolution
    double max_ratio_fine = 0.0;  // at (h/2, dt/2), same continuous pairs
    bool stable = false;          // the two maxima agree within factor 2
};

/// Seeded pairs of smooth admissible controls; the pairs are functions of
/// (t,x) sampled on whichever grid is in play, so the refined run probes
/// the same continuous pairs.  Degenerate draws are redrawn, at most 10
/// times, then DegeneratePair is thrown.
LipschitzReport lipschitz_probe(const ProblemSpec& spec, const Discretization& disc,
                                int n_pairs, std::uint64_t seed);

/// Smooth, resolution-independent admissible control: a four-coefficient
/// trigonometric profile mapped onto [m, M].
ControlField smooth_admissible(const ProblemSpec& spec, const Grid& grid, const TimeGrid& tg,
                               Rng& rng);

/// Stacked dense matrix of the linear step recursion on rows 1..K (the map
/// whose inverse run_forward applies to the sources).  Row-major blocks of
/// size n; intended for small instances only.
Eigen::MatrixXd dense_stacked_operator(const StepEngine& eng);

std::string report_json(const DiagnosticsReport& rep);
std::string report_table(const DiagnosticsReport& rep);

} // namespace fracbilin
