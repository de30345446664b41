#include <cmath>

#include "doctest.h"
#include "fracwell/lattice.hpp"

using namespace fracwell;

TEST_CASE("grid points sit at cell midpoints") {
  const Grid g = Grid::make(1, 4, 1);
  REQUIRE(g.size() == 4);
  CHECK(g.point(0)[0] == doctest::Approx(-1.5));
  CHECK(g.point(3)[0] == doctest::Approx(1.5));
  CHECK(g.cell_volume() == 1.0);

  const Grid r = Grid::make(1, 2, 2);
  REQUIRE(r.size() == 4);
  CHECK(r.point(0)[0] == doctest::Approx(-0.75));
  CHECK(r.point(3)[0] == doctest::Approx(0.75));
  CHECK(r.cell_volume() == doctest::Approx(0.5));
}

TEST_CASE("two-dimensional flattening runs the first axis fastest") {
  const Grid g = Grid::make(2, 2, 2);
  REQUIRE(g.size() == 16);
  const Point p = g.point(g.flat(1, 2));
  CHECK(p[0] == doctest::Approx(-0.25));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(g.axis_index(g.flat(3, 1)) == std::array<int, 2>{3, 1});
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.diameter() == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("boundary distance and padding") {
  const Grid g = Grid::make(1, 4, 1);
  CHECK(g.boundary_distance(0) == doctest::Approx(0.5));
  CHECK(g.boundary_distance(1) == doctest::Approx(1.5));
  const Grid p = g.padded(3);
  CHECK(p.side() == 10);
  CHECK(region_count(inner_region(p, 4)) == 4);
  CHECK(region_count(inner_region(Grid::make(2, 8, 2), 4)) == 64);
}

TEST_CASE("half-open cells") {
  CHECK(cell_of(0.0) == 0);
  CHECK(cell_of(0.49) == 0);
  CHECK(cell_of(0.5) == 1);
  CHECK(cell_of(-0.5) == 0);
  CHECK(cell_of(-0.51) == -1);
  CHECK(site_of({-1.2, 2.5}, 2) == Site{-1, 3});
  const SiteBox b = SiteBox::covering(Grid::make(1, 4, 2));
  CHECK(b.lo[0] == -2);
  CHECK(b.hi[0] == 2);
}

TEST_CASE("disorder draws are a function of seed and site") {
  const auto law = DisorderDistribution::uniform_unit();
  const Grid small = Grid::make(2, 4, 1), big = Grid::make(2, 10, 1);
  const Disorder a = Disorder::sample(SiteBox::covering(small), law, 11);
  const Disorder b = Disorder::sample(SiteBox::covering(big), law, 11);
  const Disorder c = Disorder::sample(SiteBox::covering(small), law, 12);
  bool differs = false;
  for (std::size_t i = 0; i < a.box().size(); ++i) {
    const Site z = a.box().site(i);
    CHECK(a.at(z) == b.at(z));
    differs = differs || a.at(z) != c.at(z);
    CHECK(std::abs(a.at(z)) <= law.bound());
  }
  CHECK(differs);
  CHECK(derive_seed(5, 1) == derive_seed(5, 1));
  CHECK(derive_seed(5, 1) != derive_seed(5, 2));
}

TEST_CASE("single-site laws have unit variance") {
  for (const auto& law : {DisorderDistribution::uniform_unit(), DisorderDistribution::triangular_unit()}) {
    CHECK(law.variance() == doctest::Approx(1.0).epsilon(1e-12));
    const Grid g = Grid::make(1, 200000, 1);
    const Disorder d = Disorder::sample(SiteBox::covering(g), law, 3);
    double m = 0.0, m2 = 0.0;
    for (double x : d.values()) {
      m += x;
      m2 += x * x;
    }
    m /= d.values().size();
    m2 /= d.values().size();
    CHECK(std::abs(m) < 0.01);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(law.quantile(0.5) == doctest::Approx(0.0));
    CHECK(DisorderDistribution::from_name(law.name()).law == law.law);
  }
}

TEST_CASE("disorder transforms") {
  const auto law = DisorderDistribution::triangular_unit();
  const SiteBox box = SiteBox::covering(Grid::make(1, 8, 1));
  const Disorder g = Disorder::sample(box, law, 21);
  const Disorder t = g.translated({2, 0});
  CHECK(t.at({-3, 0}) == g.at({-1, 0}));
  CHECK(g.negated().at({1, 0}) == -g.at({1, 0}));
  CHECK(g.lift({0.7, 0.0}) == g.at({1, 0}));

  SiteBox keep = box;
  keep.lo = {-1, 0};
  keep.hi = {1, 0};
  const Disorder r = g.resampled_outside(keep, 99);
  for (int z = -3; z <= 4; ++z) {
    if (keep.contains({z, 0}))
      CHECK(r.at({z, 0}) == g.at({z, 0}));
    else
      CHECK(r.at({z, 0}) != g.at({z, 0}));
  }
}

TEST_CASE("lift to a refined grid repeats the site value") {
  const Grid g = Grid::make(1, 4, 3);
  const Disorder d = Disorder::sample(SiteBox::covering(g), DisorderDistribution::uniform_unit(), 1);
  const auto lifted = lift_to_grid(d, g);
  REQUIRE(lifted.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(lifted[i] == d.at(site_of(g.point(i), 1)));
}
