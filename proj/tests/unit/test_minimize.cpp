#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fracwell/minimize.hpp"

using namespace fracwell;

namespace {

Model make_model(double s, double theta) {
  Model m;
  m.s = s;
  m.theta = theta;
  m.potential = Potential::build(1.0, 0.5);
  return m;
}

Functional make(int d, int n, double s, double theta, double ext, std::uint64_t seed) {
  const Grid g = Grid::make(d, n, 1);
  return Functional(g, make_model(s, theta),
                    Disorder::sample(SiteBox::covering(g), DisorderDistribution::uniform_unit(), seed),
                    Exterior::constant(ext));
}

double kstar(double theta) { return 1.0 + theta * DisorderDistribution::uniform_unit().bound(); }

// fixed-step gradient descent, no line search and no preconditioner
std::vector<double> plain_descent(const Functional& f, std::vector<double> v, double step) {
  for (int it = 0; it < 2000000; ++it) {
    const auto g = f.gradient(v);
    double gmax = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= step * g[i];
      gmax = std::max(gmax, std::abs(g[i]));
    }
    if (gmax < 1e-12) break;
  }
  return v;
}

}  // namespace

TEST_CASE("constant minimizer without disorder") {
  const auto f = make(1, 16, 0.5, 0.0, 1.0, 1);
  SolverConfig cfg;
  const auto r = minimize(f, cfg);
  CHECK(r.converged);
  CHECK(r.energy.total == doctest::Approx(0.0).scale(1.0));
  for (double x : r.values) CHECK(x == doctest::Approx(1.0));
}

TEST_CASE("extremal pair matches a fixed-step descent oracle") {
  for (double s : {0.25, 0.75}) {
    const double k = kstar(1.0);
    const auto base = make(1, 8, s, 1.0, k, 31);
    const auto e = extremal_pair(k, base, SolverConfig{});
    REQUIRE(e.plus.converged);
    REQUIRE(e.minus.converged);
    const auto fp = base.with_exterior(Exterior::constant(k));
    const auto fm = base.with_exterior(Exterior::constant(-k));
    const auto op = plain_descent(fp, std::vector<double>(8, k), 0.01);
    const auto om = plain_descent(fm, std::vector<double>(8, -k), 0.01);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(e.plus.values[i] == doctest::Approx(op[i]).epsilon(1e-7).scale(1.0));
      CHECK(e.minus.values[i] == doctest::Approx(om[i]).epsilon(1e-7).scale(1.0));
    }
    CHECK(e.ordering_violation == 0.0);
  }
}

TEST_CASE("brute-force multistart stays between the extremal states") {
  const double k = kstar(1.0);
  const auto base = make(1, 8, 0.5, 1.0, k, 5);
  const auto e = extremal_pair(k, base, SolverConfig{});
  for (double sign : {1.0, -1.0}) {
    const auto f = base.with_exterior(Exterior::constant(sign * k));
    const auto& top = sign > 0 ? e.plus : e.minus;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-k, k);
    double best = INFINITY;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> start(8);
      for (auto& x : start) x = u(rng);
      const auto r = descend(f, SolverConfig{}, start, "brute");
      REQUIRE(r.converged);
      best = std::min(best, r.energy.total);
      if (sign > 0)
        for (std::size_t i = 0; i < 8; ++i) CHECK(r.values[i] <= top.values[i] + 1e-7);
      else
        for (std::size_t i = 0; i < 8; ++i) CHECK(r.values[i] >= top.values[i] - 1e-7);
    }
    CHECK(top.energy.total <= best + 1e-9);
  }
}

TEST_CASE("extremal pair rejects a low barrier") {
  const auto base = make(1, 8, 0.5, 1.0, 0.0, 5);
  CHECK_THROWS_AS(extremal_pair(1.5, base, SolverConfig{}), std::invalid_argument);
}

TEST_CASE("negated disorder swaps the extremal states") {
  const double k = kstar(1.0);
  const auto base = make(2, 6, 0.75, 1.0, k, 9);
  const Grid g = base.domain();
  const auto dis = Disorder::sample(SiteBox::covering(g), DisorderDistribution::uniform_unit(), 9);
  const auto a = extremal_pair(k, base.with_disorder(dis), SolverConfig{});
  const auto b = extremal_pair(k, base.with_disorder(dis.negated()), SolverConfig{});
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(a.plus.values[i] + b.minus.values[i]) < 1e-6);
}

TEST_CASE("minimizers respect the truncation level") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = make(1, 24, 0.5, 1.0, 0.0, rng());
    SolverConfig cfg;
    cfg.initial = InitialPolicy::random;
    cfg.multistart = 3;
    cfg.seed = rng();
    const auto r = minimize(f, cfg);
    for (double x : r.values) CHECK(std::abs(x) <= kstar(1.0) + 1e-6);
  }
}

TEST_CASE("truncate and lattice operations") {
  const Grid g = Grid::make(1, 4, 1);
  const ScalarField u{g, {3.0, -0.5, 0.2, -4.0}, Exterior::constant(2.5)};
  const ScalarField v{g, {1.0, 0.5, -0.2, 0.0}, Exterior::constant(2.5)};
  const auto t = truncate(u, 2.0);
  CHECK(t.values == std::vector<double>{2.0, -0.5, 0.2, -2.0});
  CHECK(t.exterior.tail == 2.0);
  const auto [hi, lo] = lattice_min_max(u, v);
  CHECK(hi.values == std::vector<double>{3.0, 0.5, 0.2, 0.0});
  CHECK(lo.values == std::vector<double>{1.0, -0.5, -0.2, -4.0});
}

TEST_CASE("glued field bookkeeping is exact") {
  const double k = kstar(1.0);
  const auto base = make(1, 32, 0.75, 1.0, k, 12);
  const auto e = extremal_pair(k, base, SolverConfig{});
  const auto fp = base.with_exterior(Exterior::constant(k));
  const auto fm = base.with_exterior(Exterior::constant(-k));
  const auto rep = glue_report(fp, e.plus.values, fm, e.minus.values, 2.0);
  CHECK(rep.identity_defect < 1e-9 * std::max(1.0, std::abs(rep.energy_glued)));
  CHECK(rep.chain_slack >= -1e-9);
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff(0.0) == 0.0);
  CHECK(cutoff(0.5) == doctest::Approx(0.5));
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(3.0, 2.0) == 1.0);
}

TEST_CASE("solver names round-trip") {
  for (auto m : {SolverMethod::descent, SolverMethod::accelerated}) CHECK(solver_method_from_name(to_string(m)) == m);
  for (auto p : {InitialPolicy::plus_k, InitialPolicy::minus_k, InitialPolicy::random})
    CHECK(initial_policy_from_name(to_string(p)) == p);
  CHECK_THROWS(solver_method_from_name("newton"));
}

TEST_CASE("plain descent method reaches the same state") {
  const double k = kstar(1.0);
  const auto base = make(1, 32, 0.5, 1.0, k, 4);
  SolverConfig a, b;
  b.method = SolverMethod::descent;
  const auto ea = extremal_pair(k, base, a), eb = extremal_pair(k, base, b);
  REQUIRE(eb.plus.converged);
  for (std::size_t i = 0; i < ea.plus.values.size(); ++i)
    CHECK(eb.plus.values[i] == doctest::Approx(ea.plus.values[i]).epsilon(1e-7).scale(1.0));
}
