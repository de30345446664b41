#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracwell/kernel.hpp"

using namespace fracwell;

namespace {

std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// closed form of the one-dimensional exterior integral
double weight_1d(double a, double x, double s) {
  return (std::pow(a - x, -2.0 * s) + std::pow(a + x, -2.0 * s)) / (2.0 * s);
}

// int_0^{2pi} rho(phi)^{-2s} dphi / (2s) with rho the distance to the square boundary along phi
double weight_2d_trapezoid(double a, const Point& x, double s) {
  const int steps = 400000;
  double acc = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double phi = (k + 0.5) * 2.0 * std::numbers::pi / steps;
    const double c = std::cos(phi), sn = std::sin(phi);
    double rho = INFINITY;
    if (c > 0) rho = std::min(rho, (a - x[0]) / c);
    if (c < 0) rho = std::min(rho, (-a - x[0]) / c);
    if (sn > 0) rho = std::min(rho, (a - x[1]) / sn);
    if (sn < 0) rho = std::min(rho, (-a - x[1]) / sn);
    acc += std::pow(rho, -2.0 * s);
  }
  return acc * 2.0 * std::numbers::pi / steps / (2.0 * s);
}

}  // namespace

TEST_CASE("kernel table weights") {
  const KernelTable t1(1, 0.25, 1, 8);
  CHECK(t1.weight(3) == doctest::Approx(std::pow(3.0, -1.5)));
  const KernelTable t2(2, 0.5, 2, 8);
  // h^{2d} / |h D|^{d+2s} with h = 1/2, D = (1, 1)
  CHECK(t2.weight(1, 1) == doctest::Approx(std::pow(0.5, 4) / std::pow(std::sqrt(0.5), 3)));
}

TEST_CASE("dense and fft pair operators agree") {
  for (int d : {1, 2}) {
    const Grid g = d == 1 ? Grid::make(1, 96, 1) : Grid::make(2, 12, 2);
    for (double s : {0.25, 0.75}) {
      const PairOperator dense(g, s, KernelBackend::dense), fft(g, s, KernelBackend::fft);
      const auto v = random_field(g.size(), 4);
      std::vector<double> a(g.size()), b(g.size());
      dense.apply(v, a);
      fft.apply(v, b);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("pair operator annihilates constants and matches its quadratic form") {
  const Grid g = Grid::make(1, 10, 1);
  const PairOperator op(g, 0.5, KernelBackend::dense);
  std::vector<double> ones(g.size(), 1.7), out(g.size());
  op.apply(ones, out);
  for (double x : out) CHECK(std::abs(x) < 1e-14);

  const auto v = random_field(g.size(), 9);
  op.apply(v, out);
  double quad = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) quad += v[i] * out[i];
  const Region all = full_region(g);
  // sum over ordered pairs of K (v_i - v_j)^2 equals 2 v^T L v
  CHECK(op.pair_sum(v, all, v, all) == doctest::Approx(2.0 * quad).epsilon(1e-12));
}

TEST_CASE("hand-computed pair sum") {
  // points +-1/2, s = 1/2: one offset with K = 1
  const Grid g = Grid::make(1, 2, 1);
  const PairOperator op(g, 0.5, KernelBackend::dense);
  const std::vector<double> v{1.0, 0.0};
  const Region all = full_region(g);
  CHECK(op.pair_sum(v, all, v, all) == doctest::Approx(2.0));
}

TEST_CASE("one-dimensional exterior weight closed form") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-0.999, 0.999), us(0.05, 0.95);
  for (int k = 0; k < 100; ++k) {
    const double a = 3.0, x = a * ux(rng), s = us(rng);
    const double ref = weight_1d(a, x, s);
    CHECK(exterior_weight(1, a, {x, 0.0}, s) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(exterior_weight_quadrature(1, a, {x, 0.0}, s) == doctest::Approx(ref).epsilon(1e-8));
  }
  // x = 0, a = 1, s = 1/2: two half-lines each contributing 1
  CHECK(exterior_weight(1, 1.0, {0.0, 0.0}, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("two-dimensional exterior weight against a polar trapezoid") {
  const std::vector<Point> pts{{0.0, 0.0}, {0.4, -0.2}, {-0.9, 0.85}, {0.97, 0.1}};
  for (double s : {0.25, 0.5, 0.75})
    for (const Point& x : pts) {
      const double ref = weight_2d_trapezoid(1.0, x, s);
      CHECK(exterior_weight(2, 1.0, x, s) == doctest::Approx(ref).epsilon(1e-6));
      CHECK(exterior_weight_quadrature(2, 1.0, x, s) == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("exterior weights cover the grid") {
  const Grid g = Grid::make(1, 4, 2);
  const auto w = exterior_weights(g, 0.3);
  REQUIRE(w.size() == g.size());
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(weight_1d(2.0, g.point(i)[0], 0.3)));
}
