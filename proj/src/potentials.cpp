#include "pir/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include "pir/rng.hpp"

namespace pir {

namespace {

void require_dim(int want, ConstVecRef q, const char* who) {
  if (q.size() != want) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

double va_eval(const PotentialSpec& p, ConstVecRef q) {
  require_dim(p.dim, q, "va_eval");
  return p.eval(q) - 0.5 * p.a * p.a * q.squaredNorm();
}

void va_grad(const PotentialSpec& p, ConstVecRef q, VecRef out) {
  require_dim(p.dim, q, "va_grad");
  p.grad(q, out);
  out -= p.a * p.a * q;
}

CheckReport check_assumptions(const PotentialSpec& p, const ObservableSpec& o,
                              double radius, int n_probe, std::uint64_t seed) {
  if (radius <= 0.0) throw std::invalid_argument("check_assumptions: radius must be positive");
  if (n_probe < 100) throw std::invalid_argument("check_assumptions: n_probe must be >= 100");
  if (p.dim != o.dim) throw std::invalid_argument("check_assumptions: dimension mismatch");

  CheckReport rep;
  rep.n_probe = n_probe;
  rep.radius = radius;

  const int d = p.dim;
  Vec zero = Vec::Zero(d);
  rep.margin_va_at_zero = p.M1 - std::abs(va_eval(p, zero));

  const double inf = std::numeric_limits<double>::infinity();
  rep.margin_va_lower = inf;
  rep.margin_grad_bound = inf;
  rep.margin_va_upper = inf;
  rep.margin_observable = inf;

  CounterStream stream(seed, /*stream_id=*/0);
  Vec q(d), g(d);
  std::vector<double> gauss(static_cast<std::size_t>(d));
  for (int i = 0; i < n_probe; ++i) {
    // Uniform in the ball: gaussian direction, radius ~ R U^{1/d}.
    stream.fill_gaussians(static_cast<std::uint64_t>(i), gauss);
    for (int t = 0; t < d; ++t) q[t] = gauss[static_cast<std::size_t>(t)];
    const double norm = q.norm();
    const double u = stream.uniform(static_cast<std::uint64_t>(i), 1u << 20);
    const double r = radius * std::pow(u, 1.0 / d);
    q = (norm > 0.0) ? Vec(q * (r / norm)) : Vec::Zero(d).eval();

    const double va = va_eval(p, q);
    va_grad(p, q, g);
    const double qn = q.norm();
    rep.margin_va_lower = std::min(rep.margin_va_lower, va + p.M1);
    rep.margin_grad_bound = std::min(rep.margin_grad_bound, p.M1 * (1.0 + qn) - g.norm());
    rep.margin_va_upper = std::min(rep.margin_va_upper, 1.5 * p.M1 + p.M1 * qn * qn - va);

    const double ov = std::abs(o.eval(q));
    o.grad(q, g);
    rep.margin_observable = std::min(rep.margin_observable, o.M2 - std::max(ov, g.norm()));
  }

  rep.pass = rep.margin_va_at_zero >= 0.0 && rep.margin_va_lower >= 0.0 &&
             rep.margin_grad_bound >= 0.0 && rep.margin_va_upper >= 0.0 &&
             rep.margin_observable >= 0.0;
  return rep;
}

PotentialSpec make_potential(const std::string& name, int dim, double a, double M1,
                             const std::map<std::string, double>& params) {
  if (dim < 1) throw std::invalid_argument("make_potential: dim must be positive");
  if (a <= 0.0) throw std::invalid_argument("make_potential: a must be positive");
  if (M1 <= 0.0) throw std::invalid_argument("make_potential: M1 must be positive");

  PotentialSpec p;
  p.name = name;
  p.dim = dim;
  p.a = a;
  p.M1 = M1;

  if (name == "harmonic") {
    const double omega = get_param(params, "omega", 1.0);
    p.eval = [omega](ConstVecRef q) { return 0.5 * omega * omega * q.squaredNorm(); };
    p.grad = [omega](ConstVecRef q, VecRef out) { out = omega * omega * q; };
  } else if (name == "bumped_harmonic") {
    const double omega = get_param(params, "omega", 1.0);
    const double c = get_param(params, "bump_c", 0.2);
    const double k = get_param(params, "bump_k", 2.0);
    p.eval = [omega, c, k](ConstVecRef q) {
      return 0.5 * omega * omega * q.squaredNorm() + c * std::cos(k * q[0]);
    };
    p.grad = [omega, c, k](ConstVecRef q, VecRef out) {
      out = omega * omega * q;
      out[0] -= c * k * std::sin(k * q[0]);
    };
  } else if (name == "quartic") {
    p.eval = [](ConstVecRef q) {
      const double s = q.squaredNorm();
      return s * s;
    };
    p.grad = [](ConstVecRef q, VecRef out) { out = 4.0 * q.squaredNorm() * q; };
  } else {
    throw std::invalid_argument("make_potential: unknown potential '" + name + "'");
  }
  return p;
}

ObservableSpec make_observable(const std::string& name, int dim, double M2) {
  if (dim < 1) throw std::invalid_argument("make_observable: dim must be positive");
  if (M2 <= 0.0) throw std::invalid_argument("make_observable: M2 must be positive");

  ObservableSpec o;
  o.name = name;
  o.dim = dim;
  o.M2 = M2;

  if (name == "one") {
    o.eval = [](ConstVecRef) { return 1.0; };
    o.grad = [](ConstVecRef q, VecRef out) {
      out.setZero();
      (void)q;
    };
  } else if (name == "coord") {
    o.eval = [](ConstVecRef q) { return q[0]; };
    o.grad = [](ConstVecRef, VecRef out) {
      out.setZero();
      out[0] = 1.0;
    };
  } else if (name == "coord_sq") {
    o.eval = [](ConstVecRef q) { return q[0] * q[0]; };
    o.grad = [](ConstVecRef q, VecRef out) {
      out.setZero();
      out[0] = 2.0 * q[0];
    };
  } else if (name == "norm_sq") {
    o.eval = [](ConstVecRef q) { return q.squaredNorm(); };
    o.grad = [](ConstVecRef q, VecRef out) { out = 2.0 * q; };
  } else if (name == "tanh") {
    o.eval = [](ConstVecRef q) { return std::tanh(q[0]); };
    o.grad = [](ConstVecRef q, VecRef out) {
      out.setZero();
      const double t = std::tanh(q[0]);
      out[0] = 1.0 - t * t;
    };
  } else if (name == "tanh_sq") {
    o.eval = [](ConstVecRef q) {
      const double t = std::tanh(q[0]);
      return t * t;
    };
    o.grad = [](ConstVecRef q, VecRef out) {
      out.setZero();
      const double t = std::tanh(q[0]);
      out[0] = 2.0 * t * (1.0 - t * t);
    };
  } else {
    throw std::invalid_argument("make_observable: unknown observable '" + name + "'");
  }
  return o;
}

}  // namespace pir
