#include "pir/mehler.hpp"

#include <cmath>
#include <stdexcept>

#include "pir/numerics.hpp"

namespace pir {

double log_mehler_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta, double a) {
  if (beta <= 0.0 || a <= 0.0)
    throw std::invalid_argument("mehler_kernel: beta and a must be positive");
  if (q.size() != q_tilde.size()) throw std::invalid_argument("mehler_kernel: dimension mismatch");
  const double d = static_cast<double>(q.size());
  const double ab = a * beta;
  const double log_pref = 0.5 * d * (std::log(a) - std::log(2.0 * M_PI) - log_sinh(ab));
  const double s = 0.5 * (q.squaredNorm() + q_tilde.squaredNorm());
  const double p = q.dot(q_tilde);
  // a cosh/sinh = a coth stays finite for large a beta; a/sinh underflows
  // gracefully through the exp of the log form.
  const double a_coth = a * coth(ab);
  const double a_csch = a * std::exp(-log_sinh(ab));
  return log_pref - a_coth * s + a_csch * p;
}

double mehler_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta, double a) {
  return std::exp(log_mehler_kernel(q, q_tilde, beta, a));
}

double log_heat_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("heat_kernel: beta must be positive");
  if (q.size() != q_tilde.size()) throw std::invalid_argument("heat_kernel: dimension mismatch");
  const double d = static_cast<double>(q.size());
  return -0.5 * d * std::log(2.0 * M_PI * beta) - (q - q_tilde).squaredNorm() / (2.0 * beta);
}

double heat_kernel(ConstVecRef q, ConstVecRef q_tilde, double beta) {
  return std::exp(log_heat_kernel(q, q_tilde, beta));
}

}  // namespace pir
