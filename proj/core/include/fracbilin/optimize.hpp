#pragma once

#include "fracbilin/sensitivity.hpp"

#include <cstdint>
#include <vector>

namespace fracbilin {

struct OptResult {
    ControlField u_opt;
    Field y_opt;
    AdjointField q_opt;
    std::vector<double> J_history;        // initial cost, then one entry per accepted step
    std::vector<double> residual_history; // optimality residual at the same points
    int iterations = 0;
    bool converged = false;
};

// Strongly active nodes: |alpha u + y q[k-1]| > tau on the control region,
// levels 1..K (level 0 carries no quadrature weight and is never active).
struct ActiveSet {
    double tau = 0.0;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;
};

// Direction obeying the sign structure of the critical cone: zero on the
// strongly active nodes, nonnegative where u sits at the lower bound,
// nonpositive at the upper bound.
struct ConeSample {
    DirectionField v;
};

struct UniquenessReport {
    int n_starts = 0;
    double alpha = 0.0;
    double sigma = 0.0;   // max(|m|, |M|)
    double c_emp = 0.0;   // alpha^2 / (|y0|_inf^2 + |yd|_inf^2 + |f|_inf^2)^2
    std::vector<double> pairwise; // distances d(i,j), i<j, ordered by (i,j)
    double max_distance = 0.0;
    std::vector<int> iterations;  // per start
    bool asserted = false;        // alpha reached the configured large-alpha regime
    bool passed = false;          // when asserted: max_distance <= 1e-6
};

struct SoscReport {
    double tau = 0.0;
    int n_samples = 0;
    int n_active = 0;        // strongly active control nodes
    int n_control_nodes = 0; // control nodes carrying quadrature weight
    bool cone_trivial = false;
    double min_quadratic = 0.0;
    double min_normalized = 0.0; // min over samples of J''[v,v] / |v|^2
    bool necessary_ok = false;   // min_normalized >= -1e-10 (or cone trivial)
    double beta_fit = 0.0;       // min of 2 (J(v)-J(u)) / |v-u|^2 over nearby admissible v
    bool beta_positive = false;
};

/// Pointwise stationarity map: min(max(m, -yq/alpha), M).  `raw` is the
/// current value at the node; the projection target does not depend on it,
/// the argument exists so call sites read as an update of that value.
double project_box(double raw, double alpha, double m, double M, double yq);

/// Distance |u - P_U(-y q / alpha)| in the h dt control norm; zero exactly
/// when the pointwise stationarity trichotomy holds at every control node.
double optimality_residual(const ControlField& u, const Field& y, const AdjointField& q,
                           const ProblemSpec& spec, const Discretization& disc);

/// Projected gradient with Armijo backtracking on the discrete cost.
/// Throws LineSearchStall if the step underflows 1e-16.
OptResult solve_pgd(const ProblemSpec& spec, const Discretization& disc,
                    const OptimizerConfig& cfg, const ControlField& u_init);

/// Multi-start distance experiment.  Start i is seeded from cfg.seed and i
/// only, so an alpha sweep at fixed cfg.seed reuses the same draws.
/// Throws NotConverged if any start misses the tolerance.
UniquenessReport uniqueness_experiment(const ProblemSpec& spec, const Discretization& disc,
                                       const OptimizerConfig& cfg, int n_starts);

ActiveSet active_set(const ControlField& u, const Field& y, const AdjointField& q,
                     const ProblemSpec& spec, const Discretization& disc, double tau);

/// Random direction folded onto the cone: the generator is consumed once
/// per control node regardless of the activity pattern, so draws are
/// reproducible across different active sets.
ConeSample cone_sample(const ControlField& u, const Field& y, const AdjointField& q,
                       const ProblemSpec& spec, const Discretization& disc, double tau, Rng& rng);

/// Curvature scan over cone samples plus a local quadratic-growth fit.
SoscReport sosc_check(const ControlField& u, const Field& y, const AdjointField& q,
                      const ProblemSpec& spec, const Discretization& disc, double tau,
                      int n_samples, std::uint64_t seed);

/// min over draws v in U of <alpha u + y q, v - u> / |v - u|; at a
/// converged point this stays above -tol.
double variational_inequality_min(const ProblemSpec& spec, const Discretization& disc,
                                  const ControlField& u, const Field& y, const AdjointField& q,
                                  int n_draws, Rng& rng);

} // namespace fracbilin
