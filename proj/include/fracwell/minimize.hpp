#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracwell/energy.hpp"

namespace fracwell {

enum class SolverMethod { descent, accelerated };
enum class InitialPolicy { plus_k, minus_k, random, given };

struct SolverConfig {
  SolverMethod method = SolverMethod::accelerated;
  /// bound on the Euler-Lagrange residual
  double tolerance = 1e-9;
  int max_iter = 50000;
  int multistart = 1;
  InitialPolicy initial = InitialPolicy::plus_k;
  /// level of the constant starts; 0 selects the exterior sup norm or 1 + C0 theta A
  double start_level = 0.0;
  std::vector<double> given;
  std::uint64_t seed = 0;
  double armijo = 1e-4;
  /// residual below which the quasi-Newton polish takes over
  double switch_residual = 1e-5;
  int memory = 8;
  /// energies closer than this count as ties between multistarts
  double tie_tolerance = 1e-8;
  bool record_history = false;

  void validate() const;
};

std::string to_string(SolverMethod m);
std::string to_string(InitialPolicy p);
SolverMethod solver_method_from_name(const std::string& name);
InitialPolicy initial_policy_from_name(const std::string& name);

struct MinimizeResult {
  std::vector<double> values;
  EnergyBreakdown energy;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string initial_id;
  /// energies of accepted iterates when recording is on
  std::vector<double> history;
};

/**
 * Stationary point of the functional reached by descent.
 *
 * Phase one is a Jacobi-preconditioned gradient step with Armijo
 * backtracking. With unit step the map v -> v - D^{-1} grad is order
 * preserving, so a start above every stationary point descends onto the
 * largest one (and symmetrically from below). Once the residual drops below
 * `switch_residual` the accelerated method polishes with preconditioned
 * L-BFGS.
 */
MinimizeResult minimize(const Functional& f, const SolverConfig& cfg);
/// Single descent from a given start.
MinimizeResult descend(const Functional& f, const SolverConfig& cfg, std::vector<double> start,
                       const std::string& id);

/// Pointwise clamp to [-t, t]; the exterior is clamped the same way.
ScalarField truncate(const ScalarField& v, double t);
/// (u v v, u ^ v) pointwise.
std::pair<ScalarField, ScalarField> lattice_min_max(const ScalarField& u, const ScalarField& v);

/// 1 + C0 theta A
double truncation_level(const Model& model, double disorder_bound);

struct ExtremalStates {
  double k = 0.0;
  MinimizeResult plus;
  MinimizeResult minus;
  /// max(0, max_i (v-_i - v+_i))
  double ordering_violation = 0.0;
  /// ||v^{+,K} - v^{+,2K}||, ||v^{-,K} - v^{-,2K}||; empty unless requested
  std::optional<std::pair<double, double>> sensitivity;
};

/**
 * v+ from the constant start +K with constant exterior +K and v- from -K.
 * `base` supplies domain, model and disorder; its exterior is replaced.
 */
ExtremalStates extremal_pair(double k, const Functional& base, const SolverConfig& cfg,
                             bool sensitivity = false);
ExtremalStates extremal_pair(double k, const Disorder& g, const Model& model, const Grid& grid,
                             const SolverConfig& cfg, bool sensitivity = false);

/// Cubic smoothstep of the distance to the boundary over `width`: 0 on the boundary, 1 beyond.
double cutoff(double distance, double width = 1.0);
/// Psi v+ + (1 - Psi) v-; the exterior is that of v-.
ScalarField glue_cutoff(const ScalarField& plus, const ScalarField& minus, double width = 1.0);

/**
 * Energy bookkeeping of the glued field. With E the boundary strip of
 * the domain (distance <= width), B the rest of the domain and u the glued
 * field,
 *   r1 = K1(u, E) - K1(v+, E)
 *   r2 = W((v+, B), (u, E)) - W((v+, B), (v+, E))
 *   r3 = W((u, D), (v-, D^c)) - W((v+, D), (v+, D^c))
 * and G^{v-}(u) = G^{v+}(v+) + r1 + r2 + r3 exactly.
 */
struct GlueReport {
  double energy_plus = 0.0;
  double energy_minus = 0.0;
  double energy_glued = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  /// |G^{v-}(u) - G^{v+}(v+) - r1 - r2 - r3|
  double identity_defect = 0.0;
  /// G^{v-}(u) - G^{v-}(v-), nonnegative when v- is a minimizer
  double chain_slack = 0.0;
};

/// `plus` and `minus` are functionals on the same domain and working grid.
GlueReport glue_report(const Functional& plus, std::span<const double> v_plus, const Functional& minus,
                       std::span<const double> v_minus, double width = 1.0);

/// max_{i != j} |v_i - v_j| / |x_i - x_j|^alpha; qualitative smoothness diagnostic.
double holder_quotient(const Grid& grid, std::span<const double> v, double alpha);

std::string to_json(const MinimizeResult& r, bool with_values = false);
std::string to_json(const ExtremalStates& e, bool with_values = false);

}  // namespace fracwell
