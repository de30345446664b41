#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fracwell/io.hpp"
#include "fracwell/minimize.hpp"
#include "fracwell/stats.hpp"

namespace fracwell {

/// Parameters shared by every experiment.
struct ExperimentSetup {
  int dim = 1;
  double s = 0.75;
  double theta = 1.0;
  double c0 = 1.0;
  double delta0 = 0.5;
  int refine = 1;
  DisorderDistribution dist;
  /// barrier level; 0 selects 1 + C0 theta A
  double k = 0.0;
  SolverConfig solver;
  std::uint64_t seed = 0;
  int jobs = 1;
  KernelBackend backend = KernelBackend::automatic;

  Model model() const;
  double k_level() const;
  void validate() const;
};

/// Numeric table; every aggregate is recomputable from the realization rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::size_t index(const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
  CsvTable csv() const;
};

struct FitRecord {
  std::string name;
  double expected = 0.0;
  LinearFit fit;
};

struct SweepRecord {
  std::string experiment;
  ExperimentSetup setup;
  Table realizations;
  Table aggregates;
  std::vector<FitRecord> fits;
  std::map<std::string, double> checks;
  std::size_t solves = 0;
  std::size_t failures = 0;

  double failure_rate() const { return solves ? static_cast<double>(failures) / solves : 0.0; }
};

/// Exponent of the boundary energy in |Lambda|: (d - 2s)/d, (d - 1)/d, or (d - 1)/d with a log at s = 1/2.
double expected_volume_exponent(int dim, double s);

/**
 * For each (s, n): the exterior-weight mass h^d sum_i w_i of Lambda_n and,
 * when realizations > 0, the extremal-pair energy difference
 * G(v+) - G(v-). Log-log slopes are fitted against |Lambda|.
 */
SweepRecord boundary_scaling_sweep(const ExperimentSetup& setup, const std::vector<double>& s_list,
                                   const std::vector<int>& n_list, int realizations);

struct FnEstimate {
  int n = 0;
  int pad = 0;
  int resamples = 0;
  std::uint64_t interior_seed = 0;
  /// G(v+, Lambda_n) - G(v-, Lambda_n) per successful resample
  std::vector<double> delta;
  double mean = 0.0;
  double std_error = 0.0;
  int failures = 0;
  /// omega at the origin site
  double site0 = 0.0;
  /// volume averages of v+ and v- over Lambda_n, averaged over resamples
  double mean_plus = 0.0;
  double mean_minus = 0.0;
};

/**
 * F_n = E[G(v+) - G(v-) | disorder in Lambda_n], estimated by holding the
 * disorder of Lambda_n fixed and redrawing it on Lambda_{n+2P} \ Lambda_n.
 */
FnEstimate estimate_Fn(const ExperimentSetup& setup, int n, int pad, int resamples, std::uint64_t interior_seed,
                       std::uint64_t resample_seed);

struct PaddingCheck {
  int n = 0;
  int pad = 0;
  double mean_small = 0.0;
  double mean_large = 0.0;
  /// mean over seeds of F(P) - F(2P) and its standard error
  double bias = 0.0;
  double bias_se = 0.0;
};

PaddingCheck fn_padding_check(const ExperimentSetup& setup, int n, int pad, int resamples, int seeds);

/**
 * Var(F_n)/n^d, the ceiling 4 theta^2 (1 + C0 theta A)^2, the single-site
 * conditional variance D^2 from quantile bins of omega(0), an
 * Anderson-Darling test on standardized F_n and the ergodic means of the
 * same solves. pad = 0 selects n/2.
 */
SweepRecord variance_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations,
                           int resamples, int pad = 0, int bins = 8);

struct EnvelopeRow {
  double h = 0.0;
  double delta_energy = 0.0;
  /// theta h int_Q v+(omega) and theta h int_Q v+(omega - h e_i)
  double upper = 0.0;
  double lower = 0.0;
  bool sandwich = false;
  /// |dG/h - theta int_Q v+| / max(1, |theta int_Q v+|)
  double derivative_error = 0.0;
};

struct EnvelopeReport {
  Site site{0, 0};
  double cell_integral = 0.0;
  std::vector<EnvelopeRow> rows;
  /// cell integrals at increasing omega(i); monotone when nondecreasing
  std::vector<double> levels;
  std::vector<double> level_integrals;
  bool monotone = true;
  bool converged = true;
};

EnvelopeReport envelope_derivative_check(const ExperimentSetup& setup, int n, const Site& site,
                                         const std::vector<double>& h_list, std::uint64_t seed,
                                         int monotone_levels = 5, double sandwich_tol = 1e-10);

struct ErgodicReport {
  int n = 0;
  int realizations = 0;
  Summary plus;
  Summary minus;
  /// statistics of m+ + m- per realization
  Summary defect;
};

ErgodicReport ergodic_means(const ExperimentSetup& setup, int n, int realizations, int pad = 0);
ErgodicReport ergodic_from(int n, std::span<const double> plus, std::span<const double> minus);

/**
 * Central-window gap max_{Lambda_{n/2}} (v+ - v-), the global ordering
 * margin, and for three bounded non-constant exteriors the distance of the
 * resulting stationary point w outside [v-, v+].
 */
SweepRecord uniqueness_gap_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations);

/// max_i |v+(omega)_i + v-(-omega)_i| over realizations.
SweepRecord symmetry_sweep(const ExperimentSetup& setup, int n, int realizations);

struct CutoffRow {
  int side = 0;
  double volume = 0.0;
  double interaction = 0.0;
  double ratio = 0.0;
};

struct CutoffReport {
  std::vector<CutoffRow> rows;
  bool decreasing = true;
};

/**
 * W(v, Delta)/|Delta| on centered cubes of the given sides. The field is
 * sampled on a window of side `window`; beyond it, d = 1 uses the values at
 * the two window edges and d = 2 the mean and mean square on the window rim.
 */
CutoffReport cutoff_diagnostic(int dim, double s, int refine, const std::function<double(const Point&)>& v,
                               int window, const std::vector<int>& sides);

/**
 * I / (K ||u - w||_{C^{0,alpha}} |D| diam(D)^d) with I the difference of the
 * two Gagliardo double sums and K the sum of the Holder norms.
 */
double convest_constant(const Grid& grid, std::span<const double> u, std::span<const double> w, double s,
                        double alpha);

/// One solve per n from the start policy of the solver, constant exterior v0 (NaN selects K).
SweepRecord minimize_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, double v0);
SweepRecord extremal_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations,
                           bool sensitivity = false);
/// F_n per realization at padding P and 2P; pad = 0 selects n/2.
SweepRecord fn_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations, int resamples,
                     int pad = 0);
SweepRecord ergodic_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations,
                          int pad = 0);

struct DiagnosticsOptions {
  int n = 32;
  int realizations = 4;
  int sites = 4;
  std::vector<double> h_list{1e-2, 1e-3};
  int window = 1024;
  std::vector<int> sides{16, 32, 64, 128, 256};
};

/// Symmetry defect, envelope derivative rows and the cutoff ratio of a smoothstep profile.
SweepRecord diagnostics_sweep(const ExperimentSetup& setup, const DiagnosticsOptions& opt);

std::string to_json(const SweepRecord& r);

}  // namespace fracwell
