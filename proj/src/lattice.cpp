#include "fracwell/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracwell {

Grid Grid::make(int dim, int side, int refine) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (side < 2 || side % 2 != 0) throw std::invalid_argument("grid side must be even and >= 2");
  if (refine < 1) throw std::invalid_argument("grid refinement must be >= 1");
  Grid g;
  g.dim_ = dim;
  g.side_ = side;
  g.refine_ = refine;
  return g;
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

std::size_t Grid::size() const {
  const auto l = static_cast<std::size_t>(axis_points());
  return dim_ == 1 ? l : l * l;
}

double Grid::volume() const { return std::pow(static_cast<double>(side_), dim_); }

double Grid::diameter() const { return side_ * std::sqrt(static_cast<double>(dim_)); }

std::array<int, 2> Grid::axis_index(std::size_t i) const {
  const auto l = static_cast<std::size_t>(axis_points());
  if (dim_ == 1) return {static_cast<int>(i), 0};
  return {static_cast<int>(i % l), static_cast<int>(i / l)};
}

Point Grid::point(std::size_t i) const {
  const auto k = axis_index(i);
  return {axis_coord(k[0]), dim_ == 2 ? axis_coord(k[1]) : 0.0};
}

double Grid::boundary_distance(std::size_t i) const {
  const auto x = point(i);
  double d = upper() - std::abs(x[0]);
  if (dim_ == 2) d = std::min(d, upper() - std::abs(x[1]));
  return d;
}

Grid Grid::padded(int pad) const {
  if (pad < 0) throw std::invalid_argument("padding must be non-negative");
  return make(dim_, side_ + 2 * pad, refine_);
}

Region full_region(const Grid& g) { return Region(g.size(), 1); }

Region box_region(const Grid& g, std::array<int, 2> lo, std::array<int, 2> hi) {
  Region r(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.axis_index(i);
    bool in = k[0] >= lo[0] && k[0] < hi[0];
    if (g.dim() == 2) in = in && k[1] >= lo[1] && k[1] < hi[1];
    r[i] = in ? 1 : 0;
  }
  return r;
}

Region inner_region(const Grid& outer, int inner_side) {
  if (inner_side > outer.side() || (outer.side() - inner_side) % 2 != 0)
    throw std::invalid_argument("inner box must be concentric and no larger than the outer box");
  const int off = (outer.side() - inner_side) / 2 * outer.refine();
  const int len = inner_side * outer.refine();
  return box_region(outer, {off, off}, {off + len, off + len});
}

Region region_union(const Region& a, const Region& b) {
  if (a.size() != b.size()) throw std::invalid_argument("region size mismatch");
  Region r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] || b[i]) ? 1 : 0;
  return r;
}

std::size_t region_count(const Region& r) {
  return static_cast<std::size_t>(std::count(r.begin(), r.end(), 1));
}

std::size_t SiteBox::size() const {
  std::size_t n = static_cast<std::size_t>(hi[0] - lo[0] + 1);
  if (dim == 2) n *= static_cast<std::size_t>(hi[1] - lo[1] + 1);
  return n;
}

bool SiteBox::contains(const Site& z) const {
  bool in = z[0] >= lo[0] && z[0] <= hi[0];
  if (dim == 2) in = in && z[1] >= lo[1] && z[1] <= hi[1];
  return in;
}

std::size_t SiteBox::index(const Site& z) const {
  const auto w = static_cast<std::size_t>(hi[0] - lo[0] + 1);
  std::size_t i = static_cast<std::size_t>(z[0] - lo[0]);
  if (dim == 2) i += w * static_cast<std::size_t>(z[1] - lo[1]);
  return i;
}

Site SiteBox::site(std::size_t i) const {
  const auto w = static_cast<std::size_t>(hi[0] - lo[0] + 1);
  if (dim == 1) return {lo[0] + static_cast<int>(i), 0};
  return {lo[0] + static_cast<int>(i % w), lo[1] + static_cast<int>(i / w)};
}

SiteBox SiteBox::covering(const Grid& g) {
  const int a = cell_of(g.axis_coord(0));
  const int b = cell_of(g.axis_coord(g.axis_points() - 1));
  SiteBox box;
  box.dim = g.dim();
  box.lo = {a, g.dim() == 2 ? a : 0};
  box.hi = {b, g.dim() == 2 ? b : 0};
  return box;
}

double DisorderDistribution::variance() const {
  switch (law) {
    case DisorderLaw::uniform: return half_width * half_width / 3.0;
    case DisorderLaw::triangular: return half_width * half_width / 6.0;
  }
  return 0.0;
}

void DisorderDistribution::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("disorder half-width must be positive and finite");
  if (std::abs(variance() - 1.0) > 1e-12)
    throw std::invalid_argument("disorder distribution must have unit variance");
}

double DisorderDistribution::quantile(double u) const {
  switch (law) {
    case DisorderLaw::uniform: return half_width * (2.0 * u - 1.0);
    case DisorderLaw::triangular:
      if (u < 0.5) return half_width * (std::sqrt(2.0 * u) - 1.0);
      return half_width * (1.0 - std::sqrt(2.0 * (1.0 - u)));
  }
  return 0.0;
}

std::string DisorderDistribution::name() const {
  return law == DisorderLaw::uniform ? "uniform" : "triangular";
}

DisorderDistribution DisorderDistribution::from_name(const std::string& name) {
  if (name == "uniform") return uniform_unit();
  if (name == "triangular") return triangular_unit();
  throw std::invalid_argument("unknown disorder distribution '" + name + "'");
}

DisorderDistribution DisorderDistribution::uniform_unit() {
  return {DisorderLaw::uniform, std::sqrt(3.0)};
}

DisorderDistribution DisorderDistribution::triangular_unit() {
  return {DisorderLaw::triangular, std::sqrt(6.0)};
}

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double site_uniform(std::uint64_t seed, const Site& z) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(z[0])));
  h = mix(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(z[1])) * 0xd1b54a32d192ed03ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix(mix(base) ^ mix(index + 0x632be59bd9b4e019ULL));
}

Disorder Disorder::sample(const SiteBox& box, const DisorderDistribution& dist, std::uint64_t seed) {
  dist.validate();
  Disorder g;
  g.box_ = box;
  g.dist_ = dist;
  g.seed_ = seed;
  g.values_.resize(box.size());
  for (std::size_t i = 0; i < g.values_.size(); ++i)
    g.values_[i] = dist.quantile(site_uniform(seed, box.site(i)));
  return g;
}

Disorder Disorder::from_values(const SiteBox& box, const DisorderDistribution& dist,
                               std::uint64_t seed, std::vector<double> values) {
  dist.validate();
  if (values.size() != box.size()) throw std::invalid_argument("disorder value count does not match box");
  Disorder g;
  g.box_ = box;
  g.dist_ = dist;
  g.seed_ = seed;
  g.values_ = std::move(values);
  return g;
}

double Disorder::at(const Site& z) const {
  if (!box_.contains(z)) throw std::out_of_range("site outside disorder support");
  return values_[box_.index(z)];
}

void Disorder::set(const Site& z, double value) {
  if (!box_.contains(z)) throw std::out_of_range("site outside disorder support");
  values_[box_.index(z)] = value;
}

double Disorder::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

int cell_of(double x) { return static_cast<int>(std::floor(x + 0.5)); }

Site site_of(const Point& x, int dim) {
  return {cell_of(x[0]), dim == 2 ? cell_of(x[1]) : 0};
}

double Disorder::lift(const Point& x) const { return at(site_of(x, box_.dim)); }

Disorder Disorder::translated(const Site& y) const {
  Disorder t = *this;
  t.box_.lo = {box_.lo[0] - y[0], box_.lo[1] - (box_.dim == 2 ? y[1] : 0)};
  t.box_.hi = {box_.hi[0] - y[0], box_.hi[1] - (box_.dim == 2 ? y[1] : 0)};
  return t;
}

Disorder Disorder::negated() const {
  Disorder t = *this;
  for (double& v : t.values_) v = -v;
  return t;
}

Disorder Disorder::resampled_outside(const SiteBox& keep, std::uint64_t seed) const {
  Disorder t = *this;
  for (std::size_t i = 0; i < t.values_.size(); ++i) {
    const Site z = box_.site(i);
    if (!keep.contains(z)) t.values_[i] = dist_.quantile(site_uniform(seed, z));
  }
  return t;
}

std::vector<double> lift_to_grid(const Disorder& g, const Grid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = g.lift(grid.point(i));
  return out;
}

std::vector<std::size_t> site_indices(const Disorder& g, const Grid& grid) {
  std::vector<std::size_t> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Site z = site_of(grid.point(i), grid.dim());
    if (!g.box().contains(z)) throw std::out_of_range("grid point outside disorder support");
    out[i] = g.box().index(z);
  }
  return out;
}

}  // namespace fracwell
