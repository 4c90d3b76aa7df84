#pragma once

#include "fracbilin/adjoint.hpp"

namespace fracbilin {

/// First variation of the control-to-state map in direction w at (v, y):
/// same step matrices as the state solve, source (w_k y_k) on the control
/// nodes, zero initial data.
Field solve_linearized(const StepEngine& eng, const Field& y, const DirectionField& w);
Field solve_linearized(const ProblemSpec& spec, const Discretization& disc,
                       const ControlField& v, const Field& y, const DirectionField& w);

/// Mixed second variation in directions (w, h): source
/// (h_k rho_w,k + w_k rho_h,k) on the control nodes, zero initial data.
/// Symmetric in (w, rho_w) <-> (h, rho_h) by construction.
Field solve_second(const StepEngine& eng, const DirectionField& w, const Field& rho_w,
                   const DirectionField& h, const Field& rho_h);
Field solve_second(const ProblemSpec& spec, const Discretization& disc, const ControlField& v,
                   const Field& y, const DirectionField& w, const DirectionField& h);

/// Cost gradient in the h dt control inner product: rows 1..K hold
/// alpha v_k + y_k q[k-1] on the control nodes, zero elsewhere and on row 0
/// (no step sees that level, so its weight is zero).
DirectionField gradient(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, const Field& y, const AdjointField& q);
/// Convenience: solves the state and costate itself.
DirectionField gradient_at(const ProblemSpec& spec, const Discretization& disc,
                           const ControlField& v);

/// Weighted pairing h dt sum over control nodes, levels 1..K.
double control_inner(const Field& a, const Field& b, const Grid& grid, const TimeGrid& tg);

/// Second derivative of the discrete cost along w, exact by the chain rule:
/// 2 h dt sum w rho q[k-1]  +  h |rho_K|^2  +  alpha h dt sum w^2.
double hessian_quadratic(const ProblemSpec& spec, const Discretization& disc,
                         const ControlField& v, const Field& y, const AdjointField& q,
                         const DirectionField& w, const Field& rho_w);
double hessian_quadratic(const ProblemSpec& spec, const Discretization& disc,
                         const ControlField& v, const Field& y, const AdjointField& q,
                         const DirectionField& w);

/// Polarized bilinear form; hessian_bilinear(..., w, rho_w, w, rho_w)
/// equals hessian_quadratic.
double hessian_bilinear(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, const Field& y, const AdjointField& q,
                        const DirectionField& w, const Field& rho_w, const DirectionField& h,
                        const Field& rho_h);

/// Variant with the cross term integrated over all of space-time instead of
/// the terminal slice: 2 h dt sum w rho q[k-1] + h dt sum_Q rho^2 +
/// alpha h dt sum w^2.  Reported as a diagnostic; it is not the second
/// derivative of the terminal-observation cost.
double hessian_quadratic_q_variant(const ProblemSpec& spec, const Discretization& disc,
                                   const ControlField& v, const Field& y, const AdjointField& q,
                                   const DirectionField& w, const Field& rho_w);

/// Uniform draw in [-1,1] on the control nodes, levels 1..K, zero elsewhere.
DirectionField random_direction(const ProblemSpec& spec, const Grid& grid, const TimeGrid& tg,
                                Rng& rng);

} // namespace fracbilin
