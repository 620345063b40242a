#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace pir {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;
using VecRef = Eigen::Ref<Eigen::VectorXd>;

/// Potential V on R^d together with the splitting parameter a and the
/// declared growth constant M1 for the shifted potential
/// V^a(q) = V(q) - a^2 |q|^2 / 2.
///
/// eval/grad must be pure; instances are immutable after construction and
/// safe to share across threads.
struct PotentialSpec {
  std::string name;
  int dim = 1;
  double a = 1.0;
  double M1 = 1.0;
  std::function<double(ConstVecRef)> eval;
  std::function<void(ConstVecRef, VecRef)> grad;
};

/// Observable O on R^d with declared bound M2 >= max{|O|, |grad O|}.
struct ObservableSpec {
  std::string name;
  int dim = 1;
  double M2 = 1.0;
  std::function<double(ConstVecRef)> eval;
  std::function<void(ConstVecRef, VecRef)> grad;
};

/// V^a(q) = V(q) - a^2 |q|^2 / 2 and its gradient.
double va_eval(const PotentialSpec& p, ConstVecRef q);
void va_grad(const PotentialSpec& p, ConstVecRef q, VecRef out);

/// Worst-case margins of the declared growth assumptions over sampled probe
/// points. Each margin is (bound - observed); the check passes iff every
/// margin is nonnegative. Probabilistic, not a proof.
struct CheckReport {
  bool pass = false;
  int n_probe = 0;
  double radius = 0.0;
  double margin_va_at_zero = 0.0;   // M1 - |V^a(0)|
  double margin_va_lower = 0.0;     // min over probes of V^a(q) + M1
  double margin_grad_bound = 0.0;   // min of M1 (1 + |q|) - |grad V^a(q)|
  double margin_va_upper = 0.0;     // min of 3/2 M1 + M1 |q|^2 - V^a(q)
  double margin_observable = 0.0;   // min of M2 - max{|O(q)|, |grad O(q)|}
};

/// Samples n_probe points uniformly in the ball of the given radius and
/// evaluates every inequality margin. Deterministic for a fixed seed.
CheckReport check_assumptions(const PotentialSpec& p, const ObservableSpec& o,
                              double radius, int n_probe, std::uint64_t seed = 0x5eed);

/// Built-in potentials, selectable by name:
///   harmonic          V = omega^2 |q|^2 / 2              params: omega
///   bumped_harmonic   V = omega^2 |q|^2 / 2 + c cos(k q1)  params: omega, bump_c, bump_k
///   quartic           V = |q|^4   (violates the growth assumption; for negative tests)
PotentialSpec make_potential(const std::string& name, int dim, double a, double M1,
                             const std::map<std::string, double>& params = {});

/// Built-in observables, selectable by name:
///   one        O = 1
///   coord      O = q1
///   coord_sq   O = q1^2
///   norm_sq    O = |q|^2
///   tanh       O = tanh(q1)
///   tanh_sq    O = tanh(q1)^2
ObservableSpec make_observable(const std::string& name, int dim, double M2);

}  // namespace pir
