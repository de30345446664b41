#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fracwell {

using Point = std::array<double, 2>;
using Site = std::array<int, 2>;

/**
 * Collocation lattice on the centered box (-n/2, n/2)^d.
 *
 * Each unit of length carries `refine` points per axis (spacing h = 1/m).
 * Along an axis the k-th point sits at -n/2 + (k + 1/2) h, so every point
 * lies strictly inside the box. Points are flattened with the first axis
 * running fastest: index = k0 + L * k1, L = n m.
 */
class Grid {
 public:
  Grid() = default;

  static Grid make(int dim, int side, int refine);

  int dim() const { return dim_; }
  int side() const { return side_; }
  int refine() const { return refine_; }
  double spacing() const { return 1.0 / refine_; }
  double cell_volume() const;
  /// points per axis, n m
  int axis_points() const { return side_ * refine_; }
  std::size_t size() const;

  double lower() const { return -0.5 * side_; }
  double upper() const { return 0.5 * side_; }
  double volume() const;
  double diameter() const;

  double axis_coord(int k) const { return lower() + (k + 0.5) * spacing(); }
  Point point(std::size_t i) const;
  std::array<int, 2> axis_index(std::size_t i) const;
  std::size_t flat(int k0, int k1 = 0) const {
    return static_cast<std::size_t>(k0) + static_cast<std::size_t>(axis_points()) * k1;
  }

  /// Distance from point i to the boundary of the box.
  double boundary_distance(std::size_t i) const;

  /// Grid with the same d and m on a box enlarged by `pad` cells on every side.
  Grid padded(int pad) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && side_ == o.side_ && refine_ == o.refine_;
  }

 private:
  int dim_ = 1;
  int side_ = 2;
  int refine_ = 1;
};

/// Boolean membership of grid points; used for sub-box energies.
using Region = std::vector<char>;

Region full_region(const Grid& g);
/// Points whose axis indices fall in [lo, hi) on every axis.
Region box_region(const Grid& g, std::array<int, 2> lo, std::array<int, 2> hi);
/// The points of `outer` lying inside the concentric box of `inner.side()`.
Region inner_region(const Grid& outer, int inner_side);
Region region_union(const Region& a, const Region& b);
std::size_t region_count(const Region& r);

/// Inclusive range of integer lattice sites.
struct SiteBox {
  int dim = 1;
  Site lo{0, 0};
  Site hi{0, 0};

  std::size_t size() const;
  bool contains(const Site& z) const;
  std::size_t index(const Site& z) const;
  Site site(std::size_t i) const;
  bool operator==(const SiteBox& o) const { return dim == o.dim && lo == o.lo && hi == o.hi; }

  /// Smallest box containing every site referenced by the grid's points.
  static SiteBox covering(const Grid& g);
};

enum class DisorderLaw { uniform, triangular };

/**
 * Single-site law of the random field. Both supported laws are symmetric,
 * absolutely continuous and bounded; `half_width` is the bound A.
 */
struct DisorderDistribution {
  DisorderLaw law = DisorderLaw::uniform;
  double half_width = 1.7320508075688772;

  double variance() const;
  double bound() const { return half_width; }
  /// Throws when the law does not have unit variance.
  void validate() const;
  /// Quantile function on u in [0, 1).
  double quantile(double u) const;

  std::string name() const;
  static DisorderDistribution from_name(const std::string& name);
  static DisorderDistribution uniform_unit();
  static DisorderDistribution triangular_unit();
};

/// Stream seed for realization `index`, a pure function of both inputs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/**
 * Per-site values g(z, omega) on a box of lattice sites.
 *
 * Sampled values are a pure function of (seed, z): two boxes sampled with
 * the same seed agree on their overlap, independent of box shape or order.
 */
class Disorder {
 public:
  Disorder() = default;

  static Disorder sample(const SiteBox& box, const DisorderDistribution& dist,
                         std::uint64_t seed);
  static Disorder from_values(const SiteBox& box, const DisorderDistribution& dist,
                              std::uint64_t seed, std::vector<double> values);

  const SiteBox& box() const { return box_; }
  const DisorderDistribution& distribution() const { return dist_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& values() const { return values_; }

  double at(const Site& z) const;
  void set(const Site& z, double value);
  double sup_norm() const;

  /// g1(x): value of the site whose half-open cell z + [-1/2, 1/2)^d holds x.
  double lift(const Point& x) const;

  /// (T_y omega)(z) = omega(z + y); the support box moves by -y.
  Disorder translated(const Site& y) const;
  Disorder negated() const;
  /// Keeps the sites of `keep` and redraws all others from `seed`.
  Disorder resampled_outside(const SiteBox& keep, std::uint64_t seed) const;

 private:
  SiteBox box_;
  DisorderDistribution dist_;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
};

/// Site of the half-open unit cell holding coordinate x.
int cell_of(double x);
Site site_of(const Point& x, int dim);

/// g1 evaluated at every grid point.
std::vector<double> lift_to_grid(const Disorder& g, const Grid& grid);
/// Site index (into the disorder box) for every grid point.
std::vector<std::size_t> site_indices(const Disorder& g, const Grid& grid);

}  // namespace fracwell
