#pragma once

#include "fracbilin/grid.hpp"
#include "fracbilin/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracbilin {

// Spatial profile, one of the named built-ins.  Arbitrary expressions are
// deliberately not supported; every case must be reproducible from the
// config text alone.
struct SpaceFunc {
    enum class Kind { Constant, Gaussian, Polynomial };
    Kind kind = Kind::Constant;
    double value = 0.0;                    // Constant
    double amp = 0.0, center = 0.0, width = 1.0; // Gaussian: amp*exp(-((x-c)/w)^2)
    std::vector<double> coeffs;            // Polynomial: sum c_j x^j

    double operator()(double x) const;
};

struct TimeFunc {
    enum class Kind { One, Constant, Exp, Sine };
    Kind kind = Kind::One;
    double value = 1.0; // Constant
    double rate = 0.0;  // Exp: exp(rate*t)
    double freq = 0.0, phase = 0.0; // Sine: sin(freq*t + phase)

    double operator()(double t) const;
};

// Separable (t,x) data function; y0 and yd carry the trivial time factor.
struct DataFunc {
    SpaceFunc space;
    TimeFunc time;

    double operator()(double t, double x) const { return time(t) * space(x); }
};

struct KernelSpec {
    enum class Kind { Constant, ExpDecay, Gaussian };
    Kind kind = Kind::Constant;
    double value = 0.0;             // Constant
    double amp = 0.0, rate = 0.0;   // ExpDecay: amp*exp(-rate*(t-tau))
    double center = 0.0, width = 1.0; // Gaussian in x: amp*exp(-((x-c)/w)^2)
    double sup_bound = 0.0;         // declared sup norm, validated by sampling

    double operator()(double t, double tau, double x) const;
};

struct ProblemSpec {
    double domain_lo = -1.0, domain_hi = 1.0;
    double omega_lo = -0.5, omega_hi = 0.5;
    double T = 1.0;
    double s = 0.5;
    double alpha = 1.0;
    double m = 0.0, M = 1.0;
    DataFunc y0, yd, f;
    KernelSpec kappa;
};

struct DiscParams {
    int n_interior = 0;
    int n_steps = 0;
};

struct OptimizerConfig {
    double tol = 1e-8;
    int max_iters = 500;
    double step0 = 1.0;
    std::uint64_t seed = 0;
    double armijo_c = 0.1;
    double armijo_shrink = 0.5;
    double large_alpha = 10.0; // alpha at or above this engages the uniqueness assertion
};

// One parsed config file.
struct CaseConfig {
    ProblemSpec spec;
    DiscParams disc;
    OptimizerConfig opt;
};

CaseConfig parse_case(const std::string& text);
CaseConfig load_case(const std::string& path);

// Deterministic re-serialization: fixed section/key order, 17 significant
// digits.  parse_case(canonical_serialize(c)) reproduces c field for field.
std::string canonical_serialize(const CaseConfig& c);

// Semantic checks behind load_case/parse_case, callable on programmatically
// built configs.  Throws ValidationError naming the offending field, or
// NonFiniteSample.  Includes the kernel sign/sup_bound sampling sweep over
// all (t_k, t_j, x_i) triples of the declared discretization.
void validate_case(const CaseConfig& c);

// Grid for the problem domain, with omega_mask filled from (omega_lo, omega_hi).
Grid make_grid(const ProblemSpec& spec, int n_interior);

inline TimeGrid make_time_grid(const ProblemSpec& spec, int n_steps) {
    return TimeGrid::make(spec.T, n_steps);
}

Field sample_field(const DataFunc& func, const Grid& grid, const TimeGrid& tg);
Eigen::VectorXd sample_space(const DataFunc& func, const Grid& grid, double t);

// clamp to [m,M] on omega nodes, zero elsewhere; idempotent
ControlField project_control(const Field& raw, const ProblemSpec& spec, const Grid& grid);

// uniform draw in [m,M] on omega nodes (all time levels), zero off omega
ControlField random_control(const ProblemSpec& spec, const Grid& grid, const TimeGrid& tg, Rng& rng);

// discrete sup norms used in the estimate constants
double sup_abs(const Field& f);
double sup_abs_space(const DataFunc& f, const Grid& grid); // at t = 0
double sup_abs_spacetime(const DataFunc& f, const Grid& grid, const TimeGrid& tg);

} // namespace fracbilin
