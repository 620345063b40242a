#pragma once

#include "pir/potentials.hpp"

namespace pir {

/// log of the imaginary-time harmonic propagator <q| e^{-beta H^a} |q~> in d
/// dimensions,
///   (a / (2 pi sinh(a beta)))^{d/2}
///     exp(-(a/sinh(a beta)) (cosh(a beta) (|q|^2+|q~|^2)/2 - q.q~)).
/// Computed in log space; requires a > 0, beta > 0.
double log_mehler_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta, double a);

/// exp(log_mehler_kernel); may underflow to 0 for very distant arguments.
double mehler_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta, double a);

/// Free-particle kernel <q| e^{-beta H^0} |q~> = (2 pi beta)^{-d/2}
///   exp(-|q - q~|^2 / (2 beta)); the a -> 0 limit of the propagator above.
double log_heat_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta);
double heat_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta);

}  // namespace pir
