#pragma once

#include <span>
#include <string>
#include <vector>

#include "fracwell/kernel.hpp"
#include "fracwell/lattice.hpp"
#include "fracwell/potential.hpp"

namespace fracwell {

enum class ExteriorKind { constant, window };

/**
 * Values of the field on the complement of the domain.
 *
 * constant: v = tail on all of the complement.
 * window:   v is given on a larger concentric grid (entries inside the
 *           domain are ignored) and equals `tail` beyond it.
 */
struct Exterior {
  ExteriorKind kind = ExteriorKind::constant;
  double tail = 0.0;
  Grid window;
  std::vector<double> window_values;

  static Exterior constant(double value);
  static Exterior grid_window(const Grid& window, std::vector<double> values, double tail);

  /// sup of |v| over the complement
  double sup_norm(const Grid& domain) const;
  /// Pointwise negation of the exterior values.
  Exterior negated() const;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;
  Exterior exterior;

  static ScalarField constant(const Grid& grid, double value, const Exterior& ext);
  double sup_norm() const;
};

struct Model {
  double s = 0.5;
  double theta = 0.0;
  Potential potential;

  void validate() const;
};

/**
 * Parts of G1^{v0}: the interior Gagliardo double sum, the well term, the
 * disorder term (the three together form K1) and the interaction with the
 * complement.
 */
struct EnergyBreakdown {
  double gagliardo = 0.0;
  double potential = 0.0;
  double disorder = 0.0;
  double exterior = 0.0;
  double total = 0.0;

  double interior() const { return gagliardo + potential + disorder; }
};

/**
 * The discrete functional G1^{v0}(., omega, Lambda) for one domain, disorder
 * realization and exterior.
 *
 * Everything is evaluated on a working grid: the domain itself for a
 * constant exterior, or the exterior window otherwise. Pair terms use the
 * ordered-pair convention: the interior double sum visits (i, j) and (j, i),
 * and the interaction with the complement carries the factor 2, so
 *
 *   G = sum_{i != j in D} K (v_i - v_j)^2 + h^d sum_D W(v_i) - theta h^d sum_D g_i v_i
 *     + 2 sum_{i in D, j in work \ D} K (v_i - v_j)^2 + 2 h^d sum_D w_i (v_i - tail)^2
 *
 * with w_i the exterior moment of the working box.
 */
class Functional {
 public:
  Functional(const Grid& domain, const Model& model, const Disorder& disorder, const Exterior& exterior,
             KernelBackend backend = KernelBackend::automatic);

  const Grid& domain() const { return domain_; }
  const Grid& work_grid() const { return op_.grid(); }
  const Model& model() const { return model_; }
  const Exterior& exterior() const { return exterior_; }
  const PairOperator& op() const { return op_; }
  double tail() const { return exterior_.tail; }
  const std::vector<double>& exterior_weights() const { return weights_; }
  const std::vector<double>& field_disorder() const { return lifted_; }
  const Region& free_region() const { return free_; }
  /// Same domain and working grid with a different exterior; reuses the kernel tables.
  Functional with_exterior(const Exterior& exterior) const;
  /// Same setup with a different disorder realization.
  Functional with_disorder(const Disorder& disorder) const;

  const std::vector<std::size_t>& free_indices() const { return free_idx_; }

  /// Working-grid vector: exterior window values with the domain values inserted.
  std::vector<double> embed(std::span<const double> interior) const;
  std::vector<double> restrict_to_domain(std::span<const double> full) const;
  ScalarField field(std::span<const double> interior) const;

  EnergyBreakdown breakdown(std::span<const double> interior) const;
  double energy(std::span<const double> interior) const { return breakdown(interior).total; }

  /**
   * G1 of a working-grid field on an arbitrary region: the region plays the
   * role of the domain and the rest of the working grid plus the tail is
   * its complement.
   */
  EnergyBreakdown region_breakdown(std::span<const double> full, const Region& region) const;

  std::vector<double> gradient(std::span<const double> interior) const;
  /// Gradient from a working-grid field and its pair operator image L v.
  void gradient_from(std::span<const double> full, std::span<const double> lv, std::span<double> grad) const;
  /// max_i |grad_i| / (2 h^d)
  double residual(std::span<const double> interior) const;

  /// Diagonal bound of the Hessian used as preconditioner.
  std::vector<double> diagonal_bound() const;

 private:
  void bind_exterior();

  Grid domain_;
  Model model_;
  Exterior exterior_;
  PairOperator op_;
  std::vector<double> weights_;
  std::vector<double> lifted_;
  std::vector<double> fixed_;
  Region free_;
  std::vector<std::size_t> free_idx_;
};

// Operation-level entry points.

/// K1(v, omega, Lambda): interior double sum + well + disorder.
double interior_energy(const Functional& f, std::span<const double> interior);
/// Interaction of the domain values with the exterior descriptor.
double exterior_interaction(const Functional& f, std::span<const double> interior);
EnergyBreakdown total_energy(const Functional& f, std::span<const double> interior);
/// Residual of the discrete Euler-Lagrange equation (-Delta)^s v + (W'(v) - theta g1) / 2.
double el_residual(const Functional& f, std::span<const double> interior);

std::string to_json(const EnergyBreakdown& e);

}  // namespace fracwell
