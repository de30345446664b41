#pragma once

namespace fracwell {

/**
 * Even C^2 double well vanishing exactly at +-1.
 *
 * For |t| >= 1 - delta0 the well is exactly (|t| - 1)^2 / (2 C0); inside
 * that region it is an even quartic a + b t^2 + c t^4 matching value, slope
 * and curvature at |t| = 1 - delta0.
 */
class Potential {
 public:
  Potential() : Potential(build(1.0, 0.5)) {}

  static Potential build(double c0, double delta0);

  double c0() const { return c0_; }
  double delta0() const { return delta0_; }
  /// |t| below which the quartic bridge is used.
  double bridge_edge() const { return 1.0 - delta0_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  double value(double t) const;
  double slope(double t) const;
  double curvature(double t) const;
  /// Upper bound of W'' over the real line.
  double max_curvature() const { return 1.0 / c0_; }

  /// W(t + dt) - W(t) without cancellation when both ends share a piece.
  double increment(double t, double dt) const;

 private:
  struct Raw {};
  explicit Potential(Raw) {}

  double c0_ = 1.0;
  double delta0_ = 0.5;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
};

}  // namespace fracwell
