#pragma once

namespace fracbilin {

/// Gamma function on the real line, poles excluded.
///
/// Lanczos approximation (g = 7, nine coefficients) with the reflection
/// formula for arguments below 1/2.  Relative error is below 1e-13 over the
/// argument range this project needs (|z| <= ~35, away from poles), which is
/// checked in the tests against the C library implementation.
double gamma_fn(double z);

/// log |Gamma(z)| companion, used where products of Gamma values would
/// overflow.  Same approximation family.
double log_abs_gamma(double z);

} // namespace fracbilin
