#include <cmath>
#include <random>

#include "doctest.h"
#include "fracwell/energy.hpp"

using namespace fracwell;

namespace {

Model make_model(double s, double theta) {
  Model m;
  m.s = s;
  m.theta = theta;
  m.potential = Potential::build(1.0, 0.5);
  return m;
}

Functional make(int d, int n, int m, double s, double theta, const Exterior& ext, std::uint64_t seed) {
  const Grid g = Grid::make(d, n, m);
  return Functional(g, make_model(s, theta),
                    Disorder::sample(SiteBox::covering(g.padded(4)), DisorderDistribution::uniform_unit(), seed), ext);
}

std::vector<double> random_field(std::size_t n, std::mt19937_64& rng, double amp = 2.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("hand-computed two-point energy") {
  const Grid g = Grid::make(1, 2, 1);
  const auto law = DisorderDistribution::uniform_unit();
  const Disorder dis = Disorder::from_values(SiteBox::covering(g), law, 0, {0.5, -1.0});
  const std::vector<double> v{1.0, 0.0};

  const Functional f0(g, make_model(0.5, 0.0), dis, Exterior::constant(0.0));
  const auto e = f0.breakdown(v);
  CHECK(e.gagliardo == doctest::Approx(2.0));
  CHECK(e.potential == doctest::Approx(5.0 / 16.0));
  CHECK(e.disorder == 0.0);
  // w(+-1/2) = 2 + 2/3 for the box (-1, 1); only the point at -1/2 differs from the tail
  CHECK(e.exterior == doctest::Approx(2.0 * 8.0 / 3.0));
  CHECK(e.total == doctest::Approx(2.0 + 5.0 / 16.0 + 16.0 / 3.0));

  const Functional f1(g, make_model(0.5, 1.0), dis, Exterior::constant(0.0));
  CHECK(f1.breakdown(v).disorder == doctest::Approx(-0.5));
}

TEST_CASE("constant field in a well with matching exterior has zero energy") {
  for (int d : {1, 2}) {
    const auto f = make(d, 6, 1, 0.4, 0.0, Exterior::constant(-1.0), 1);
    const std::vector<double> v(f.domain().size(), -1.0);
    CHECK(f.energy(v) == doctest::Approx(0.0));
    CHECK(f.residual(v) < 1e-14);
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(7);
  for (int d : {1, 2})
    for (double s : {0.25, 0.5, 0.75}) {
      const auto f = make(d, d == 1 ? 12 : 4, 2, s, 1.0, Exterior::constant(0.7), rng());
      const auto v = random_field(f.domain().size(), rng);
      const auto grad = f.gradient(v);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto p = v, m = v;
        p[i] += 1e-5;
        m[i] -= 1e-5;
        const double fd = (f.energy(p) - f.energy(m)) / 2e-5;
        num = std::max(num, std::abs(fd - grad[i]));
        den = std::max(den, std::abs(grad[i]));
      }
      CHECK(num / den < 1e-6);
    }
}

TEST_CASE("window exterior energy matches a direct assembly") {
  const double s = 0.6, theta = 1.0, tail = -0.3;
  const Grid dom = Grid::make(1, 8, 1);
  const Grid win = dom.padded(6);
  const Disorder g = Disorder::sample(SiteBox::covering(win), DisorderDistribution::uniform_unit(), 3);
  std::mt19937_64 rng(2);
  const auto outside = random_field(win.size(), rng);
  const Functional f(dom, make_model(s, theta), g, Exterior::grid_window(win, outside, tail));
  const auto v = random_field(dom.size(), rng);

  const Potential w = Potential::build(1.0, 0.5);
  auto kernel = [&](double x, double y) { return std::pow(std::abs(x - y), -(1.0 + 2.0 * s)); };
  double ref = 0.0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double xi = dom.point(i)[0];
    for (std::size_t j = 0; j < dom.size(); ++j)
      if (j != i) ref += kernel(xi, dom.point(j)[0]) * (v[i] - v[j]) * (v[i] - v[j]);
    ref += w.value(v[i]) - theta * g.lift(dom.point(i)) * v[i];
    for (std::size_t j = 0; j < win.size(); ++j) {
      const double xj = win.point(j)[0];
      if (std::abs(xj) < 0.5 * dom.side()) continue;
      ref += 2.0 * kernel(xi, xj) * (v[i] - outside[j]) * (v[i] - outside[j]);
    }
    const double a = 0.5 * win.side();
    const double wi = (std::pow(a - xi, -2.0 * s) + std::pow(a + xi, -2.0 * s)) / (2.0 * s);
    ref += 2.0 * wi * (v[i] - tail) * (v[i] - tail);
  }
  CHECK(f.energy(v) == doctest::Approx(ref).epsilon(1e-12));

  const auto grad = f.gradient(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto p = v, m = v;
    p[i] += 1e-5;
    m[i] -= 1e-5;
    CHECK(grad[i] == doctest::Approx((f.energy(p) - f.energy(m)) / 2e-5).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("region breakdown on the whole domain is the energy") {
  const auto f = make(2, 6, 1, 0.5, 1.0, Exterior::constant(1.3), 4);
  std::mt19937_64 rng(5);
  const auto v = random_field(f.domain().size(), rng);
  const auto full = f.embed(v);
  CHECK(f.region_breakdown(full, full_region(f.work_grid())).total == doctest::Approx(f.energy(v)).epsilon(1e-12));
}

TEST_CASE("energy entry points agree") {
  const auto f = make(1, 10, 1, 0.3, 0.5, Exterior::constant(-0.2), 8);
  std::mt19937_64 rng(6);
  const auto v = random_field(f.domain().size(), rng);
  const auto e = total_energy(f, v);
  CHECK(interior_energy(f, v) == doctest::Approx(e.interior()));
  CHECK(exterior_interaction(f, v) == doctest::Approx(e.exterior));
  CHECK(el_residual(f, v) == doctest::Approx(f.residual(v)));
}

TEST_CASE("with_disorder and with_exterior keep the geometry") {
  const auto f = make(1, 10, 1, 0.3, 1.0, Exterior::constant(1.0), 8);
  const auto g = Disorder::sample(SiteBox::covering(f.domain()), DisorderDistribution::uniform_unit(), 77);
  const Functional direct(f.domain(), f.model(), g, Exterior::constant(-2.0));
  const Functional derived = f.with_disorder(g).with_exterior(Exterior::constant(-2.0));
  std::mt19937_64 rng(1);
  const auto v = random_field(f.domain().size(), rng);
  CHECK(derived.energy(v) == doctest::Approx(direct.energy(v)).epsilon(1e-13));
}
