#include "fracwell/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace fracwell {

Potential Potential::build(double c0, double delta0) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw std::invalid_argument("C0 must be positive");
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw std::invalid_argument("delta0 must lie in (0, 1)");
  Potential w{Raw{}};
  w.c0_ = c0;
  w.delta0_ = delta0;
  const double tau = 1.0 - delta0;
  // p'' (tau) = 1/C0 and p'(tau) = -delta0/C0 fix b and c; p(tau) fixes a.
  w.c_ = 1.0 / (8.0 * c0 * tau * tau * tau);
  w.b_ = 0.5 * (1.0 / c0 - 12.0 * w.c_ * tau * tau);
  w.a_ = delta0 * delta0 / (2.0 * c0) - w.b_ * tau * tau - w.c_ * tau * tau * tau * tau;

  // strict decrease on (0, 1]: sample the slope densely
  constexpr int samples = 4096;
  for (int k = 1; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    if (!(w.slope(t) < 0.0 || t == 1.0))
      throw std::invalid_argument("double-well bridge is not strictly decreasing on [0, 1]");
  }
  if (!(w.value(0.0) > 0.0)) throw std::invalid_argument("double-well bridge must be positive at 0");
  return w;
}

double Potential::value(double t) const {
  const double u = std::abs(t);
  if (u >= bridge_edge()) return (u - 1.0) * (u - 1.0) / (2.0 * c0_);
  const double u2 = u * u;
  return a_ + u2 * (b_ + c_ * u2);
}

double Potential::slope(double t) const {
  const double u = std::abs(t);
  const double sign = t < 0.0 ? -1.0 : 1.0;
  if (u >= bridge_edge()) return sign * (u - 1.0) / c0_;
  return t * (2.0 * b_ + 4.0 * c_ * t * t);
}

double Potential::curvature(double t) const {
  const double u = std::abs(t);
  if (u >= bridge_edge()) return 1.0 / c0_;
  return 2.0 * b_ + 12.0 * c_ * u * u;
}

double Potential::increment(double t, double dt) const {
  const double s = t + dt;
  const double edge = bridge_edge();
  const double u = std::abs(t);
  const double v = std::abs(s);
  const bool outer_t = u >= edge;
  const bool outer_s = v >= edge;
  if (outer_t && outer_s && ((t >= 0.0) == (s >= 0.0))) {
    // same quadratic branch
    const double sign = t < 0.0 ? -1.0 : 1.0;
    return dt * (sign * (u - 1.0) / c0_ + 0.5 * dt / c0_);
  }
  if (!outer_t && !outer_s) {
    // quartic Taylor expansion is exact
    const double d1 = t * (2.0 * b_ + 4.0 * c_ * t * t);
    const double d2 = 2.0 * b_ + 12.0 * c_ * t * t;
    const double d3 = 24.0 * c_ * t;
    const double d4 = 24.0 * c_;
    return dt * (d1 + dt * (d2 / 2.0 + dt * (d3 / 6.0 + dt * d4 / 24.0)));
  }
  return value(s) - value(t);
}

}  // namespace fracwell
