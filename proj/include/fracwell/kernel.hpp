#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fracwell/lattice.hpp"

namespace fracwell {

/**
 * Collocation weights K(D) = h^{2d} / |h D|^{d+2s} for integer offsets D != 0.
 *
 * Only one weight per offset is stored; the table covers offsets with
 * components in [0, axis_len).
 */
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(int dim, double s, int refine, int axis_len);

  int dim() const { return dim_; }
  double s() const { return s_; }
  int axis_len() const { return len_; }
  double weight(int d0, int d1 = 0) const;
  const std::vector<double>& data() const { return w_; }

 private:
  int dim_ = 1;
  double s_ = 0.5;
  int len_ = 0;
  std::vector<double> w_;
};

enum class KernelBackend { automatic, dense, fft };

/**
 * Translation-invariant pair operator on one grid:
 *   (L v)_i = sum_{j != i} K(i - j) (v_i - v_j).
 * The dense path sums pairs directly; the fft path embeds the block-Toeplitz
 * kernel in a circulant of twice the size.
 */
class PairOperator {
 public:
  PairOperator(const Grid& grid, double s, KernelBackend backend = KernelBackend::automatic);
  ~PairOperator();
  PairOperator(const PairOperator&);
  PairOperator& operator=(const PairOperator&);
  PairOperator(PairOperator&&) noexcept;
  PairOperator& operator=(PairOperator&&) noexcept;

  const Grid& grid() const { return grid_; }
  const KernelTable& table() const { return table_; }
  KernelBackend backend() const { return backend_; }
  const std::vector<double>& row_sums() const { return row_sums_; }
  double max_row_sum() const;

  void apply(std::span<const double> v, std::span<double> out) const;
  void apply_dense(std::span<const double> v, std::span<double> out) const;
  void apply_fft(std::span<const double> v, std::span<double> out) const;

  /**
   * sum_{i in a} sum_{j in b, j != i} K(i - j) (u_i - w_j)^2 for fields u, w
   * on this grid. Ordered pairs; a and b may overlap.
   */
  double pair_sum(std::span<const double> u, const Region& a, std::span<const double> w,
                  const Region& b) const;

 private:
  struct FftPlan;

  Grid grid_;
  KernelTable table_;
  KernelBackend backend_ = KernelBackend::dense;
  std::vector<double> row_sums_;
  std::shared_ptr<const FftPlan> fft_;
};

/// Zeroth exterior moment int_{box^c} |x - y|^{-(d+2s)} dy for the box (-a, a)^d.
double exterior_weight(int dim, double half_side, const Point& x, double s);
/// Same integral by direct numerical quadrature (independent route).
double exterior_weight_quadrature(int dim, double half_side, const Point& x, double s);

/// w_i for every point of the grid's own box.
std::vector<double> exterior_weights(const Grid& grid, double s);

}  // namespace fracwell
