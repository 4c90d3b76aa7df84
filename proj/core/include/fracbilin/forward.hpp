#pragma once

#include "fracbilin/diagnostics_record.hpp"
#include "fracbilin/fracop.hpp"
#include "fracbilin/grid.hpp"
#include "fracbilin/problem.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fracbilin {

// Fixed scheme: implicit Euler, trapezoid memory rule.  Only the
// transformation rate varies.
struct StepperConfig {
    double r = 0.0;
};

// View of the time levels computed so far; rows 0..length-1 of *hist are valid.
struct MemoryBuffer {
    const Field* hist = nullptr;
    int length = 0;
};

/// Composite-trapezoid value of int_0^{t_k} e^{r(tau-t_k)} kappa(t_k,tau,x)
/// y(tau,x) dtau per interior node, using history rows 0..t_index.
/// Zero vector for t_index = 0.
Eigen::VectorXd memory_integral(const MemoryBuffer& buffer, const KernelSpec& kernel,
                                int t_index, const Grid& grid, const TimeGrid& tg, double r);

// Step matrices B_k = I + dt (A + r I) - dt diag(v_k chi_omega), factored
// once per control and shared by the forward, linearized, second-order, and
// transpose sweeps.  B_k is symmetric, so the same factors serve the
// transpose solves.
struct StepEngine {
    const ProblemSpec* spec = nullptr;
    const Discretization* disc = nullptr;
    double r = 0.0;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu; // index k-1 holds step k
    std::vector<Eigen::MatrixXd> B;                       // kept for residual checks
};

StepEngine make_engine(const ProblemSpec& spec, const Discretization& disc,
                       const ControlField& v, double r);

/// Runs the implicit sweep k = 1..K with the given initial row and per-step
/// additive sources g_k (rows 1..K of `g`; the dt factor must already be
/// included by the caller).  The memory term is lagged: trapezoid over
/// history rows 0..k-1 with the unknown endpoint omitted.
Field run_forward(const StepEngine& eng, const Eigen::VectorXd& y0row, const Field& g);

/// Exact transpose of run_forward's linear action on the sources: returns
/// lambda rows 1..K (row 0 is zero) with lambda_{K+1} = 0 and
/// B_k lambda_k = lambda_{k+1} + w_k - dt^2 sum_{l>k} e^{r(t_k-t_l)}
/// kappa(t_l,t_k,x) lambda_l.
Field run_transpose(const StepEngine& eng, const Field& w);

/// Forward sweep fed by the problem data: initial row sampled from y0,
/// sources dt e^{-r t_k} f(t_k, x) with the engine's rate r.
Field run_forward_with_data(const StepEngine& eng);

Field solve_forward(const ProblemSpec& spec, const Discretization& disc, const ControlField& v);

/// The r-shifted twin system: reaction + r z, source e^{-r t} f, memory
/// kernel factor e^{r(tau-t)}.  r = 0 is the same code path as
/// solve_forward and reproduces it bitwise.
Field solve_transformed(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, double r);

/// Discrete tracking-plus-Tikhonov cost of a state/control pair:
/// 0.5 h |y_K - yd|^2 + 0.5 alpha h dt sum_{k=1..K, omega} v^2.
double discrete_cost(const ProblemSpec& spec, const Discretization& disc,
                     const ControlField& v, const Field& y);

/// Convenience: solve then evaluate the cost.
double objective(const ProblemSpec& spec, const Discretization& disc, const ControlField& v);

/// Energy and sup-norm estimate records for a computed state:
/// the energy bound with constant 2 e^{2(|v|+|kappa|+1)T}, the sup bound
/// with factor e^{|v| T} (asserted only when f >= 0 on the sample grid),
/// and the relaxed sup bound with factor e^{(|v|+|kappa|+1)T} which is
/// recorded for signed sources as well.
std::vector<CheckEntry> check_estimates(const ProblemSpec& spec, const Discretization& disc,
                                        const ControlField& v, const Field& y);

/// Analogous records for the transformed system at r = |v|+|kappa|+1:
/// sup_k |z_k|^2 and sum_k dt |z_k|_V^2, each against |f|^2_{L2 V*} + |y0|^2.
std::vector<CheckEntry> check_transformed_estimates(const ProblemSpec& spec,
                                                    const Discretization& disc,
                                                    const ControlField& v);

// discrete norms shared by the estimate checks and the optimizer ----------

double sup_norm_control(const ControlField& v, const Grid& grid);
double l2_space(const Eigen::VectorXd& u, double h);
// h dt weighted over levels 1..K, all nodes
double l2_spacetime(const Field& y, const Grid& grid, const TimeGrid& tg);
// h dt weighted over levels 1..K, omega nodes only
double l2_control(const Field& w, const Grid& grid, const TimeGrid& tg);

} // namespace fracbilin
