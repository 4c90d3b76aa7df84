#pragma once

#include "fracbilin/forward.hpp"

namespace fracbilin {

/// Costate of the discrete cost: the exact transpose of the implicit sweep
/// driven by the terminal mismatch y_K - yd.  Multiplier storage: row k-1
/// holds the multiplier of step k, row K is identically zero, so the
/// gradient pairing at level k reads y_k * q[k-1].  Gradients assembled
/// from this field match divided differences of the discrete cost to
/// rounding.
AdjointField solve_adjoint_discrete(const StepEngine& eng, const Field& y);
AdjointField solve_adjoint_discrete(const ProblemSpec& spec, const Discretization& disc,
                                    const ControlField& v, const Field& y);

/// Transpose sweep with caller-supplied per-level sources (rows 1..K of w),
/// returned in the same multiplier storage.  Dual counterpart of
/// run_forward with zero initial row.
AdjointField adjoint_linear_solve(const StepEngine& eng, const Field& w);

/// Backward Euler applied to the continuous costate system
///   -q_t + A q + int_t^T kappa(tau,t,x) q(tau) dtau = v q chi_omega,
/// terminal value = mismatch.  Row k uses the level-k control; the future
/// memory is a trapezoid over stored rows.  Same storage shape as the
/// transpose (terminal row zero, mismatch enters the first backward step);
/// differs from it by O(dt), and coincides with it bitwise when the kernel
/// vanishes and the control is constant in time.
AdjointField solve_adjoint_continuous(const ProblemSpec& spec, const Discretization& disc,
                                      const ControlField& v, const Field& y);

/// Ratio record for the costate energy: (|q|_inf^2 + sum dt |q_k|_V^2)
/// against |y0|_inf^2 + |f|_inf^2 + |yd|_inf^2.  Asserts finiteness only;
/// margin carries the observed ratio so a seeded suite can report the
/// fitted constant as the running maximum.
CheckEntry adjoint_estimate_check(const ProblemSpec& spec, const Discretization& disc,
                                  const ControlField& v, const AdjointField& q);

} // namespace fracbilin
