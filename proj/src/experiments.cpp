#include "fracwell/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fracwell/parallel.hpp"
#include "json.hpp"

namespace fracwell {

Model ExperimentSetup::model() const {
  Model m;
  m.s = s;
  m.theta = theta;
  m.potential = Potential::build(c0, delta0);
  return m;
}

double ExperimentSetup::k_level() const { return k > 0.0 ? k : truncation_level(model(), dist.bound()); }

void ExperimentSetup::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (refine < 1) throw std::invalid_argument("refinement must be at least 1");
  model().validate();
  dist.validate();
  solver.validate();
  if (k > 0.0 && k < truncation_level(model(), dist.bound()))
    throw std::invalid_argument("K must be at least 1 + C0 theta A");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width does not match columns");
  rows.push_back(std::move(row));
}

std::size_t Table::index(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw std::out_of_range("no column " + column);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t c = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable Table::csv() const {
  CsvTable t(columns);
  for (const auto& r : rows) {
    t.row();
    for (double x : r) t.add(x);
  }
  return t;
}

double expected_volume_exponent(int dim, double s) {
  if (s < 0.5) return (dim - 2.0 * s) / dim;
  return (dim - 1.0) / dim;
}

namespace {

Disorder sample_for(const Grid& grid, const ExperimentSetup& setup, std::uint64_t seed) {
  return Disorder::sample(SiteBox::covering(grid), setup.dist, seed);
}

double region_mean(const std::vector<double>& full, const Region& region) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < full.size(); ++i)
    if (region[i]) {
      acc += full[i];
      ++count;
    }
  return count ? acc / static_cast<double>(count) : 0.0;
}

double volume(int dim, int n) { return std::pow(static_cast<double>(n), dim); }

void require_fit_points(const std::vector<int>& n_list) {
  if (n_list.size() < 3) throw std::invalid_argument("a scaling fit needs at least three n values");
}

}  // namespace

SweepRecord boundary_scaling_sweep(const ExperimentSetup& setup, const std::vector<double>& s_list,
                                   const std::vector<int>& n_list, int realizations) {
  setup.validate();
  require_fit_points(n_list);
  if (s_list.empty()) throw std::invalid_argument("s list is empty");
  SweepRecord rec;
  rec.experiment = "scaling";
  rec.setup = setup;
  rec.realizations.columns = {"s", "n", "realization", "delta_energy", "converged"};
  rec.aggregates.columns = {"s", "n", "volume", "weight_mass", "mean_abs_delta", "max_abs_delta"};

  for (double s : s_list) {
    ExperimentSetup local = setup;
    local.s = s;
    const Model model = local.model();
    std::vector<double> logv, logmass, logmax;
    for (int n : n_list) {
      const Grid grid = Grid::make(setup.dim, n, setup.refine);
      const auto w = exterior_weights(grid, s);
      double mass = 0.0;
      for (double x : w) mass += x;
      mass *= grid.cell_volume();

      std::vector<double> delta(static_cast<std::size_t>(std::max(realizations, 0)));
      std::vector<char> conv(delta.size(), 0);
      if (realizations > 0) {
        const double k = local.k_level();
        const Disorder proto = sample_for(grid, local, local.seed);
        const Functional base(grid, model, proto, Exterior::constant(k), local.backend);
        parallel_for(delta.size(), local.jobs, [&](std::size_t r) {
          const Functional f = base.with_disorder(sample_for(grid, local, derive_seed(local.seed, r)));
          const auto e = extremal_pair(k, f, local.solver);
          delta[r] = e.plus.energy.total - e.minus.energy.total;
          conv[r] = e.plus.converged && e.minus.converged;
        });
      }
      double mean_abs = 0.0, max_abs = 0.0;
      for (std::size_t r = 0; r < delta.size(); ++r) {
        rec.realizations.add({s, static_cast<double>(n), static_cast<double>(r), delta[r], conv[r] ? 1.0 : 0.0});
        rec.solves += 2;
        rec.failures += conv[r] ? 0 : 2;
        mean_abs += std::abs(delta[r]);
        max_abs = std::max(max_abs, std::abs(delta[r]));
      }
      if (!delta.empty()) mean_abs /= static_cast<double>(delta.size());
      rec.aggregates.add({s, static_cast<double>(n), volume(setup.dim, n), mass, mean_abs, max_abs});
      logv.push_back(std::log(volume(setup.dim, n)));
      logmass.push_back(std::log(mass));
      logmax.push_back(std::log(std::max(max_abs, 1e-300)));
    }
    const std::string tag = "s" + format_double(s);
    rec.fits.push_back({"weight_mass_" + tag, expected_volume_exponent(setup.dim, s), fit_line(logv, logmass)});
    if (realizations > 0)
      rec.fits.push_back({"max_abs_delta_" + tag, expected_volume_exponent(setup.dim, s), fit_line(logv, logmax)});
    if (n_list.size() >= 4) {
      // log-corrected alternative: log S = a + b log|V| + c log log|V|
      std::vector<double> one(logv.size(), 1.0), loglog(logv.size());
      for (std::size_t i = 0; i < logv.size(); ++i) loglog[i] = std::log(logv[i]);
      double rss_plain = 0.0, rss_log = 0.0;
      least_squares({one, logv}, logmass, &rss_plain);
      least_squares({one, logv, loglog}, logmass, &rss_log);
      rec.checks["log_rss_ratio_" + tag] = rss_log > 0.0 ? rss_plain / rss_log : INFINITY;
    }
  }
  return rec;
}

FnEstimate estimate_Fn(const ExperimentSetup& setup, int n, int pad, int resamples, std::uint64_t interior_seed,
                       std::uint64_t resample_seed) {
  setup.validate();
  if (resamples < 2) throw std::invalid_argument("F_n needs at least two exterior resamples");
  if (pad < 0) throw std::invalid_argument("padding must be non-negative");
  const Grid inner = Grid::make(setup.dim, n, setup.refine);
  const Grid big = Grid::make(setup.dim, n + 2 * pad, setup.refine);
  const SiteBox keep = SiteBox::covering(inner);
  const Disorder base_disorder = sample_for(big, setup, interior_seed);
  const Model model = setup.model();
  const double k = setup.k_level();
  const Functional base(big, model, base_disorder, Exterior::constant(k), setup.backend);
  const Region region = inner_region(big, n);

  FnEstimate est;
  est.n = n;
  est.pad = pad;
  est.resamples = resamples;
  est.interior_seed = interior_seed;
  est.site0 = base_disorder.at({0, 0});
  double mp = 0.0, mm = 0.0;
  for (int j = 0; j < resamples; ++j) {
    const Disorder g = base_disorder.resampled_outside(keep, derive_seed(resample_seed, static_cast<std::uint64_t>(j)));
    const Functional f = base.with_disorder(g);
    const auto e = extremal_pair(k, f, setup.solver);
    if (!e.plus.converged || !e.minus.converged) {
      ++est.failures;
      continue;
    }
    const Functional fp = f.with_exterior(Exterior::constant(k));
    const Functional fm = f.with_exterior(Exterior::constant(-k));
    const auto up = fp.embed(e.plus.values);
    const auto um = fm.embed(e.minus.values);
    est.delta.push_back(fp.region_breakdown(up, region).total - fm.region_breakdown(um, region).total);
    mp += region_mean(up, region);
    mm += region_mean(um, region);
  }
  const auto sum = summarize(est.delta);
  est.mean = sum.mean;
  est.std_error = sum.std_error;
  if (!est.delta.empty()) {
    est.mean_plus = mp / static_cast<double>(est.delta.size());
    est.mean_minus = mm / static_cast<double>(est.delta.size());
  }
  return est;
}

PaddingCheck fn_padding_check(const ExperimentSetup& setup, int n, int pad, int resamples, int seeds) {
  if (seeds < 2) throw std::invalid_argument("padding check needs at least two seeds");
  std::vector<double> small(static_cast<std::size_t>(seeds)), large(small.size());
  ExperimentSetup inner = setup;
  inner.jobs = 1;
  parallel_for(small.size(), setup.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(setup.seed, r);
    const std::uint64_t rs = derive_seed(seed, 1);
    small[r] = estimate_Fn(inner, n, pad, resamples, seed, rs).mean;
    large[r] = estimate_Fn(inner, n, 2 * pad, resamples, seed, rs).mean;
  });
  std::vector<double> diff(small.size());
  for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = small[r] - large[r];
  PaddingCheck c;
  c.n = n;
  c.pad = pad;
  c.mean_small = summarize(small).mean;
  c.mean_large = summarize(large).mean;
  const auto d = summarize(diff);
  c.bias = d.mean;
  c.bias_se = d.std_error;
  return c;
}

ErgodicReport ergodic_from(int n, std::span<const double> plus, std::span<const double> minus) {
  if (plus.size() != minus.size()) throw std::invalid_argument("ergodic means need paired samples");
  ErgodicReport r;
  r.n = n;
  r.realizations = static_cast<int>(plus.size());
  r.plus = summarize(plus);
  r.minus = summarize(minus);
  std::vector<double> d(plus.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = plus[i] + minus[i];
  r.defect = summarize(d);
  return r;
}

SweepRecord variance_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations,
                           int resamples, int pad, int bins) {
  setup.validate();
  if (realizations < 30) throw std::invalid_argument("variance sweep needs at least 30 realizations");
  if (n_list.empty()) throw std::invalid_argument("n list is empty");
  SweepRecord rec;
  rec.experiment = "variance";
  rec.setup = setup;
  rec.realizations.columns = {"n", "realization", "site0", "Fn", "Fn_se", "resamples_used", "mean_plus", "mean_minus"};
  rec.aggregates.columns = {"n",       "realizations", "pad",      "mean_Fn",   "se_mean_Fn", "var_Fn",
                            "mc_var",  "var_per_volume", "ceiling", "D2",        "D2_se",      "ad_statistic",
                            "ad_p",    "m_plus",       "m_plus_se", "m_minus",  "m_minus_se", "antisymmetry",
                            "antisymmetry_se"};
  const double k = setup.k_level();
  const double ceiling = 4.0 * setup.theta * setup.theta * k * k;
  ExperimentSetup inner = setup;
  inner.jobs = 1;

  for (int n : n_list) {
    const int p = pad > 0 ? pad : std::max(1, n / 2);
    const std::uint64_t nseed = derive_seed(setup.seed, static_cast<std::uint64_t>(n));
    std::vector<FnEstimate> est(static_cast<std::size_t>(realizations));
    parallel_for(est.size(), setup.jobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(nseed, r);
      est[r] = estimate_Fn(inner, n, p, resamples, seed, derive_seed(seed, 0x5eedULL));
    });
    std::vector<double> fn, key, mplus, mminus, se2;
    for (std::size_t r = 0; r < est.size(); ++r) {
      const auto& e = est[r];
      rec.solves += 2 * static_cast<std::size_t>(resamples);
      rec.failures += 2 * static_cast<std::size_t>(e.failures);
      rec.realizations.add({static_cast<double>(n), static_cast<double>(r), e.site0, e.mean, e.std_error,
                            static_cast<double>(e.delta.size()), e.mean_plus, e.mean_minus});
      if (e.delta.size() < 2) continue;
      fn.push_back(e.mean);
      key.push_back(e.site0);
      mplus.push_back(e.mean_plus);
      mminus.push_back(e.mean_minus);
      se2.push_back(e.std_error * e.std_error);
    }
    const std::string tag = "_n" + std::to_string(n);
    if (fn.size() < 2 * static_cast<std::size_t>(bins)) {
      std::vector<double> row(rec.aggregates.columns.size(), NAN);
      row[0] = static_cast<double>(n);
      row[1] = static_cast<double>(fn.size());
      row[2] = static_cast<double>(p);
      row[8] = ceiling;
      rec.aggregates.add(std::move(row));
      for (const char* name : {"mean_within_3se", "ceiling", "D2_within_2se", "antisymmetry_within_2se",
                               "ergodic_zero_within_3se"})
        rec.checks[name + tag] = 0.0;
      continue;
    }
    const auto s = summarize(fn);
    const double vol = volume(setup.dim, n);
    const auto d2 = binned_variance(key, fn, static_cast<std::size_t>(bins), 400, derive_seed(nseed, 0xb1b5ULL));
    NormalityTest ad;
    if (fn.size() >= 8) ad = anderson_darling(fn);
    const auto erg = ergodic_from(n, mplus, mminus);
    rec.aggregates.add({static_cast<double>(n), static_cast<double>(fn.size()), static_cast<double>(p), s.mean,
                        s.std_error, s.variance, summarize(se2).mean, s.variance / vol, ceiling, d2.estimate,
                        d2.std_error, ad.statistic, ad.p_value, erg.plus.mean, erg.plus.std_error, erg.minus.mean,
                        erg.minus.std_error, erg.defect.mean, erg.defect.std_error});
    rec.checks["mean_within_3se" + tag] = std::abs(s.mean) <= 3.0 * s.std_error;
    rec.checks["ceiling" + tag] = s.variance / vol <= ceiling;
    rec.checks["D2_within_2se" + tag] = std::abs(d2.estimate) <= 2.0 * d2.std_error;
    rec.checks["antisymmetry_within_2se" + tag] = std::abs(erg.defect.mean) <= 2.0 * erg.defect.std_error;
    rec.checks["ergodic_zero_within_3se" + tag] = std::abs(erg.plus.mean) <= 3.0 * erg.plus.std_error &&
                                                  std::abs(erg.minus.mean) <= 3.0 * erg.minus.std_error;
  }
  return rec;
}

namespace {

double cell_integral(const Functional& f, const Site& z, std::span<const double> v) {
  const Grid& grid = f.work_grid();
  const auto& idx = f.free_indices();
  double acc = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (site_of(grid.point(idx[k]), grid.dim()) == z) acc += v[k];
  return acc * grid.cell_volume();
}

}  // namespace

EnvelopeReport envelope_derivative_check(const ExperimentSetup& setup, int n, const Site& site,
                                         const std::vector<double>& h_list, std::uint64_t seed,
                                         int monotone_levels, double sandwich_tol) {
  setup.validate();
  const Grid grid = Grid::make(setup.dim, n, setup.refine);
  const SiteBox sites = SiteBox::covering(grid);
  if (!sites.contains(site)) throw std::out_of_range("site outside the domain");
  const Model model = setup.model();
  const Disorder g = sample_for(grid, setup, seed);
  double hmax = 0.0;
  for (double h : h_list) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    hmax = std::max(hmax, h);
  }
  const double k = setup.k_level() + model.potential.c0() * setup.theta * hmax;
  const Functional f(grid, model, g, Exterior::constant(k), setup.backend);
  SolverConfig cfg = setup.solver;
  cfg.initial = InitialPolicy::plus_k;
  cfg.start_level = k;

  EnvelopeReport rep;
  rep.site = site;
  const auto base = minimize(f, cfg);
  rep.converged = base.converged;
  const double i0 = cell_integral(f, site, base.values);
  rep.cell_integral = i0;
  const double theta = setup.theta;
  for (double h : h_list) {
    Disorder g2 = g;
    g2.set(site, g.at(site) - h);
    const Functional f2 = f.with_disorder(g2);
    const auto r2 = minimize(f2, cfg);
    rep.converged = rep.converged && r2.converged;
    EnvelopeRow row;
    row.h = h;
    row.delta_energy = r2.energy.total - base.energy.total;
    row.upper = theta * h * i0;
    row.lower = theta * h * cell_integral(f2, site, r2.values);
    const double tol = sandwich_tol + 1e-14 * std::abs(base.energy.total);
    row.sandwich = row.delta_energy <= row.upper + tol && row.delta_energy >= row.lower - tol;
    row.derivative_error = std::abs(row.delta_energy / h - theta * i0) / std::max(1.0, std::abs(theta * i0));
    rep.rows.push_back(row);
  }
  const double a = setup.dist.bound();
  for (int l = 0; l < monotone_levels; ++l) {
    const double level = -a + (l + 0.5) * 2.0 * a / monotone_levels;
    Disorder g3 = g;
    g3.set(site, level);
    const Functional f3 = f.with_disorder(g3);
    const auto r3 = minimize(f3, cfg);
    rep.converged = rep.converged && r3.converged;
    rep.levels.push_back(level);
    rep.level_integrals.push_back(cell_integral(f3, site, r3.values));
    if (rep.level_integrals.size() > 1 &&
        rep.level_integrals.back() < rep.level_integrals[rep.level_integrals.size() - 2] - 1e-9)
      rep.monotone = false;
  }
  return rep;
}

ErgodicReport ergodic_means(const ExperimentSetup& setup, int n, int realizations, int pad) {
  setup.validate();
  if (realizations < 30) throw std::invalid_argument("ergodic means need at least 30 realizations");
  const int p = pad > 0 ? pad : std::max(1, n / 2);
  const Grid big = Grid::make(setup.dim, n + 2 * p, setup.refine);
  const Region region = inner_region(big, n);
  const Model model = setup.model();
  const double k = setup.k_level();
  const Functional base(big, model, sample_for(big, setup, setup.seed), Exterior::constant(k), setup.backend);
  std::vector<double> mp(static_cast<std::size_t>(realizations)), mm(mp.size());
  parallel_for(mp.size(), setup.jobs, [&](std::size_t r) {
    const Functional f = base.with_disorder(sample_for(big, setup, derive_seed(setup.seed, r)));
    const auto e = extremal_pair(k, f, setup.solver);
    mp[r] = region_mean(f.embed(e.plus.values), region);
    mm[r] = region_mean(f.embed(e.minus.values), region);
  });
  return ergodic_from(n, mp, mm);
}

namespace {

std::vector<double> boundary_values(const Grid& window, int kind, double k, std::uint64_t seed) {
  std::vector<double> v(window.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-k, k);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point x = window.point(i);
    const double t = window.dim() == 1 ? x[0] : x[0] + x[1];
    switch (kind) {
      case 0: v[i] = k * std::cos(2.0 * std::numbers::pi * t / 7.0); break;
      case 1: v[i] = u(rng); break;
      default: v[i] = x[0] > 0.0 ? k : -k; break;
    }
  }
  return v;
}

constexpr double kBoundaryTails[3] = {0.0, 0.5, -0.25};

}  // namespace

SweepRecord uniqueness_gap_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations) {
  setup.validate();
  if (n_list.empty() || realizations < 1) throw std::invalid_argument("gap sweep needs n values and realizations");
  SweepRecord rec;
  rec.experiment = "gap";
  rec.setup = setup;
  rec.realizations.columns = {"n",          "realization", "gap",       "ordering_margin", "below_minus",
                              "above_plus", "bc_distance_plus", "bc_distance_minus", "converged"};
  rec.aggregates.columns = {"n", "median_gap", "mean_gap", "min_ordering_margin", "max_sandwich_violation"};
  const Model model = setup.model();
  const double k = setup.k_level();
  std::vector<double> medians;
  double worst_violation = 0.0, worst_margin = INFINITY;
  for (int n : n_list) {
    const Grid grid = Grid::make(setup.dim, n, setup.refine);
    const Grid window = grid.padded(std::max(2, n / 8));
    const Region central = inner_region(grid, std::max(2, n / 2 - (n / 2) % 2));
    const Functional base(grid, model, sample_for(window, setup, setup.seed), Exterior::constant(k), setup.backend);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
    parallel_for(rows.size(), setup.jobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(setup.seed, r);
      const Disorder g = sample_for(window, setup, seed);
      const Functional f = base.with_disorder(g);
      const auto e = extremal_pair(k, f, setup.solver);
      bool conv = e.plus.converged && e.minus.converged;
      double gap = -INFINITY, margin = INFINITY;
      for (std::size_t i = 0; i < e.plus.values.size(); ++i) {
        const double d = e.plus.values[i] - e.minus.values[i];
        margin = std::min(margin, d);
        if (central[i]) gap = std::max(gap, d);
      }
      double below = 0.0, above = 0.0, dplus = 0.0, dminus = 0.0;
      for (int kind = 0; kind < 3; ++kind) {
        const auto vals = boundary_values(window, kind, k, derive_seed(seed, 17 + kind));
        const Functional fw(grid, model, g, Exterior::grid_window(window, vals, kBoundaryTails[kind]), setup.backend);
        SolverConfig cfg = setup.solver;
        cfg.initial = InitialPolicy::given;
        cfg.given.assign(grid.size(), 0.0);
        const auto w = minimize(fw, cfg);
        conv = conv && w.converged;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
          below = std::max(below, e.minus.values[i] - w.values[i]);
          above = std::max(above, w.values[i] - e.plus.values[i]);
          if (central[i]) {
            dplus = std::max(dplus, std::abs(w.values[i] - e.plus.values[i]));
            dminus = std::max(dminus, std::abs(w.values[i] - e.minus.values[i]));
          }
        }
      }
      rows[r] = {static_cast<double>(n), static_cast<double>(r), gap, margin, below, above, dplus, dminus,
                 conv ? 1.0 : 0.0};
    });
    std::vector<double> gaps;
    double margin = INFINITY, violation = 0.0;
    for (auto& row : rows) {
      rec.solves += 5;
      if (row[8] == 0.0) ++rec.failures;
      gaps.push_back(row[2]);
      margin = std::min(margin, row[3]);
      violation = std::max({violation, row[4], row[5]});
      rec.realizations.add(std::move(row));
    }
    const double med = median(gaps);
    medians.push_back(med);
    worst_violation = std::max(worst_violation, violation);
    worst_margin = std::min(worst_margin, margin);
    rec.aggregates.add({static_cast<double>(n), med, summarize(gaps).mean, margin, violation});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  rec.checks["median_gap_decreasing"] = decreasing;
  rec.checks["max_sandwich_violation"] = worst_violation;
  rec.checks["min_ordering_margin"] = worst_margin;
  return rec;
}

SweepRecord symmetry_sweep(const ExperimentSetup& setup, int n, int realizations) {
  setup.validate();
  SweepRecord rec;
  rec.experiment = "symmetry";
  rec.setup = setup;
  rec.realizations.columns = {"n", "realization", "plus_vs_minus", "minus_vs_plus", "converged"};
  rec.aggregates.columns = {"n", "max_defect"};
  const Grid grid = Grid::make(setup.dim, n, setup.refine);
  const Model model = setup.model();
  const double k = setup.k_level();
  const Functional base(grid, model, sample_for(grid, setup, setup.seed), Exterior::constant(k), setup.backend);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
  parallel_for(rows.size(), setup.jobs, [&](std::size_t r) {
    const Disorder g = sample_for(grid, setup, derive_seed(setup.seed, r));
    const auto a = extremal_pair(k, base.with_disorder(g), setup.solver);
    const auto b = extremal_pair(k, base.with_disorder(g.negated()), setup.solver);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < a.plus.values.size(); ++i) {
      d1 = std::max(d1, std::abs(a.plus.values[i] + b.minus.values[i]));
      d2 = std::max(d2, std::abs(a.minus.values[i] + b.plus.values[i]));
    }
    const bool conv = a.plus.converged && a.minus.converged && b.plus.converged && b.minus.converged;
    rows[r] = {static_cast<double>(n), static_cast<double>(r), d1, d2, conv ? 1.0 : 0.0};
  });
  double worst = 0.0;
  for (auto& row : rows) {
    rec.solves += 4;
    if (row[4] == 0.0) rec.failures += 1;
    worst = std::max({worst, row[2], row[3]});
    rec.realizations.add(std::move(row));
  }
  rec.aggregates.add({static_cast<double>(n), worst});
  rec.checks["max_defect"] = worst;
  return rec;
}

CutoffReport cutoff_diagnostic(int dim, double s, int refine, const std::function<double(const Point&)>& v,
                               int window, const std::vector<int>& sides) {
  const Grid grid = Grid::make(dim, window, refine);
  const PairOperator op(grid, s, KernelBackend::dense);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = v(grid.point(i));
  const double hd = grid.cell_volume();
  const double a = grid.upper();

  // interaction of each point with the complement of the window
  std::vector<double> tail(grid.size());
  if (dim == 1) {
    const double left = values.front(), right = values.back();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x = grid.point(i)[0];
      const double wl = std::pow(x + a, -2.0 * s) / (2.0 * s);
      const double wr = std::pow(a - x, -2.0 * s) / (2.0 * s);
      tail[i] = wl * (values[i] - left) * (values[i] - left) + wr * (values[i] - right) * (values[i] - right);
    }
  } else {
    double mu = 0.0, mu2 = 0.0;
    std::size_t rim = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (grid.boundary_distance(i) < grid.spacing()) {
        mu += values[i];
        mu2 += values[i] * values[i];
        ++rim;
      }
    mu /= static_cast<double>(rim);
    mu2 /= static_cast<double>(rim);
    const auto w = exterior_weights(grid, s);
    for (std::size_t i = 0; i < values.size(); ++i)
      tail[i] = w[i] * (values[i] * values[i] - 2.0 * values[i] * mu + mu2);
  }

  CutoffReport rep;
  for (int side : sides) {
    if (side < 2 || side > window || (window - side) % 2 != 0)
      throw std::invalid_argument("cube sides must be even and fit inside the window");
    const Region inside = inner_region(grid, side);
    Region outside(inside.size());
    double t = 0.0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
      outside[i] = inside[i] ? 0 : 1;
      if (inside[i]) t += tail[i];
    }
    CutoffRow row;
    row.side = side;
    row.volume = std::pow(static_cast<double>(side), dim);
    row.interaction = 2.0 * op.pair_sum(values, inside, values, outside) + 2.0 * hd * t;
    row.ratio = row.interaction / row.volume;
    if (!rep.rows.empty() && !(row.ratio < rep.rows.back().ratio || (row.ratio == 0.0 && rep.rows.back().ratio == 0.0)))
      rep.decreasing = false;
    rep.rows.push_back(row);
  }
  return rep;
}

double convest_constant(const Grid& grid, std::span<const double> u, std::span<const double> w, double s,
                        double alpha) {
  if (u.size() != grid.size() || w.size() != grid.size()) throw std::invalid_argument("field does not match grid");
  const PairOperator op(grid, s, KernelBackend::dense);
  const Region all = full_region(grid);
  const double i = std::abs(op.pair_sum(u, all, u, all) - op.pair_sum(w, all, w, all));
  std::vector<double> diff(u.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = u[k] - w[k];
  auto norm = [&](std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m + holder_quotient(grid, f, alpha);
  };
  const double kk = norm(u) + norm(w);
  const double dn = norm(diff);
  if (dn == 0.0) return 0.0;
  return i / (kk * dn * grid.volume() * std::pow(grid.diameter(), grid.dim()));
}

SweepRecord minimize_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, double v0) {
  setup.validate();
  if (n_list.empty()) throw std::invalid_argument("n list is empty");
  SweepRecord rec;
  rec.experiment = "minimize";
  rec.setup = setup;
  rec.realizations.columns = {"n",        "energy",     "gagliardo", "potential", "disorder", "exterior",
                              "residual", "iterations", "converged", "min_value", "max_value"};
  rec.aggregates.columns = {"n", "energy", "residual", "converged"};
  const Model model = setup.model();
  const double level = std::isfinite(v0) ? v0 : setup.k_level();
  std::vector<std::vector<double>> rows(n_list.size());
  parallel_for(rows.size(), setup.jobs, [&](std::size_t i) {
    const int n = n_list[i];
    const Grid grid = Grid::make(setup.dim, n, setup.refine);
    const Functional f(grid, model, sample_for(grid, setup, setup.seed), Exterior::constant(level), setup.backend);
    const auto r = minimize(f, setup.solver);
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    rows[i] = {static_cast<double>(n), r.energy.total, r.energy.gagliardo, r.energy.potential, r.energy.disorder,
               r.energy.exterior, r.residual, static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0, *lo, *hi};
  });
  for (auto& row : rows) {
    rec.solves += 1;
    rec.failures += row[8] == 0.0;
    rec.aggregates.add({row[0], row[1], row[6], row[8]});
    rec.realizations.add(std::move(row));
  }
  return rec;
}

SweepRecord extremal_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations,
                           bool sensitivity) {
  setup.validate();
  if (n_list.empty() || realizations < 1) throw std::invalid_argument("extremal sweep needs n values and realizations");
  SweepRecord rec;
  rec.experiment = "extremal";
  rec.setup = setup;
  rec.realizations.columns = {"n",         "realization", "energy_plus", "energy_minus",       "delta_energy",
                              "residual_plus", "residual_minus", "ordering_violation", "mean_plus", "mean_minus",
                              "sensitivity_plus", "sensitivity_minus", "converged"};
  rec.aggregates.columns = {"n", "realizations", "mean_delta", "se_delta", "max_abs_delta", "max_ordering_violation"};
  const Model model = setup.model();
  const double k = setup.k_level();
  for (int n : n_list) {
    const Grid grid = Grid::make(setup.dim, n, setup.refine);
    const Region all = full_region(grid);
    const Functional base(grid, model, sample_for(grid, setup, setup.seed), Exterior::constant(k), setup.backend);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
    parallel_for(rows.size(), setup.jobs, [&](std::size_t r) {
      const Functional f = base.with_disorder(sample_for(grid, setup, derive_seed(setup.seed, r)));
      const auto e = extremal_pair(k, f, setup.solver, sensitivity);
      const bool conv = e.plus.converged && e.minus.converged;
      rows[r] = {static_cast<double>(n),
                 static_cast<double>(r),
                 e.plus.energy.total,
                 e.minus.energy.total,
                 e.plus.energy.total - e.minus.energy.total,
                 e.plus.residual,
                 e.minus.residual,
                 e.ordering_violation,
                 region_mean(e.plus.values, all),
                 region_mean(e.minus.values, all),
                 e.sensitivity ? e.sensitivity->first : NAN,
                 e.sensitivity ? e.sensitivity->second : NAN,
                 conv ? 1.0 : 0.0};
    });
    std::vector<double> delta;
    double max_abs = 0.0, violation = 0.0;
    for (auto& row : rows) {
      rec.solves += 2;
      if (row[12] == 0.0) {
        rec.failures += 2;
      } else {
        delta.push_back(row[4]);
        max_abs = std::max(max_abs, std::abs(row[4]));
        violation = std::max(violation, row[7]);
      }
      rec.realizations.add(std::move(row));
    }
    const auto sum = summarize(delta);
    rec.aggregates.add({static_cast<double>(n), static_cast<double>(delta.size()), sum.mean, sum.std_error, max_abs,
                        violation});
  }
  return rec;
}

SweepRecord fn_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations, int resamples,
                     int pad) {
  setup.validate();
  if (n_list.empty() || realizations < 2) throw std::invalid_argument("fn sweep needs n values and two realizations");
  SweepRecord rec;
  rec.experiment = "fn";
  rec.setup = setup;
  rec.realizations.columns = {"n", "realization", "site0", "Fn", "Fn_se", "Fn_double_pad", "resamples_used"};
  rec.aggregates.columns = {"n", "pad", "realizations", "mean_Fn", "se_mean_Fn", "var_Fn", "padding_bias",
                            "padding_bias_se"};
  ExperimentSetup inner = setup;
  inner.jobs = 1;
  for (int n : n_list) {
    const int p = pad > 0 ? pad : std::max(1, n / 2);
    const std::uint64_t nseed = derive_seed(setup.seed, static_cast<std::uint64_t>(n));
    std::vector<FnEstimate> small(static_cast<std::size_t>(realizations)), large(small.size());
    parallel_for(small.size(), setup.jobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(nseed, r);
      const std::uint64_t rs = derive_seed(seed, 0x5eedULL);
      small[r] = estimate_Fn(inner, n, p, resamples, seed, rs);
      large[r] = estimate_Fn(inner, n, 2 * p, resamples, seed, rs);
    });
    std::vector<double> fn, diff;
    for (std::size_t r = 0; r < small.size(); ++r) {
      rec.solves += 4 * static_cast<std::size_t>(resamples);
      rec.failures += 2 * static_cast<std::size_t>(small[r].failures + large[r].failures);
      rec.realizations.add({static_cast<double>(n), static_cast<double>(r), small[r].site0, small[r].mean,
                            small[r].std_error, large[r].mean, static_cast<double>(small[r].delta.size())});
      if (small[r].delta.size() < 2 || large[r].delta.size() < 2) continue;
      fn.push_back(small[r].mean);
      diff.push_back(small[r].mean - large[r].mean);
    }
    const auto s = summarize(fn);
    const auto b = summarize(diff);
    rec.aggregates.add({static_cast<double>(n), static_cast<double>(p), static_cast<double>(fn.size()), s.mean,
                        s.std_error, s.variance, b.mean, b.std_error});
  }
  return rec;
}

SweepRecord ergodic_sweep(const ExperimentSetup& setup, const std::vector<int>& n_list, int realizations, int pad) {
  setup.validate();
  if (n_list.empty() || realizations < 2) throw std::invalid_argument("ergodic sweep needs n values and two realizations");
  SweepRecord rec;
  rec.experiment = "ergodic";
  rec.setup = setup;
  rec.realizations.columns = {"n", "realization", "mean_plus", "mean_minus", "converged"};
  rec.aggregates.columns = {"n",       "realizations", "m_plus",       "m_plus_se",
                            "m_minus", "m_minus_se",   "antisymmetry", "antisymmetry_se"};
  const Model model = setup.model();
  const double k = setup.k_level();
  for (int n : n_list) {
    const int p = pad > 0 ? pad : std::max(1, n / 2);
    const Grid big = Grid::make(setup.dim, n + 2 * p, setup.refine);
    const Region region = inner_region(big, n);
    const std::uint64_t nseed = derive_seed(setup.seed, static_cast<std::uint64_t>(n));
    const Functional base(big, model, sample_for(big, setup, nseed), Exterior::constant(k), setup.backend);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(realizations));
    parallel_for(rows.size(), setup.jobs, [&](std::size_t r) {
      const Functional f = base.with_disorder(sample_for(big, setup, derive_seed(nseed, r)));
      const auto e = extremal_pair(k, f, setup.solver);
      rows[r] = {static_cast<double>(n), static_cast<double>(r), region_mean(f.embed(e.plus.values), region),
                 region_mean(f.embed(e.minus.values), region), e.plus.converged && e.minus.converged ? 1.0 : 0.0};
    });
    std::vector<double> mp, mm;
    for (auto& row : rows) {
      rec.solves += 2;
      if (row[4] == 0.0) {
        rec.failures += 2;
      } else {
        mp.push_back(row[2]);
        mm.push_back(row[3]);
      }
      rec.realizations.add(std::move(row));
    }
    const auto erg = ergodic_from(n, mp, mm);
    rec.aggregates.add({static_cast<double>(n), static_cast<double>(mp.size()), erg.plus.mean, erg.plus.std_error,
                        erg.minus.mean, erg.minus.std_error, erg.defect.mean, erg.defect.std_error});
    const std::string tag = "_n" + std::to_string(n);
    rec.checks["antisymmetry_within_2se" + tag] = std::abs(erg.defect.mean) <= 2.0 * erg.defect.std_error;
    rec.checks["ergodic_zero_within_3se" + tag] = std::abs(erg.plus.mean) <= 3.0 * erg.plus.std_error &&
                                                  std::abs(erg.minus.mean) <= 3.0 * erg.minus.std_error;
  }
  return rec;
}

SweepRecord diagnostics_sweep(const ExperimentSetup& setup, const DiagnosticsOptions& opt) {
  setup.validate();
  if (opt.realizations < 1 || opt.sites < 1) throw std::invalid_argument("diagnostics need realizations and sites");
  SweepRecord rec = symmetry_sweep(setup, opt.n, opt.realizations);
  rec.experiment = "diagnostics";
  rec.realizations = Table{};
  rec.realizations.columns = {"realization", "site_x", "site_y", "h", "delta_energy", "upper", "lower",
                              "sandwich",    "derivative_error", "monotone", "converged"};
  rec.aggregates = Table{};
  rec.aggregates.columns = {"side", "volume", "interaction", "ratio"};

  const Grid grid = Grid::make(setup.dim, opt.n, setup.refine);
  const SiteBox box = SiteBox::covering(grid);
  const std::size_t count = static_cast<std::size_t>(opt.realizations) * static_cast<std::size_t>(opt.sites);
  std::vector<EnvelopeReport> reports(count);
  std::vector<Site> where(count);
  ExperimentSetup inner = setup;
  inner.jobs = 1;
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint64_t pick = derive_seed(derive_seed(setup.seed, 0xd1a6ULL), t);
    Site z{0, 0};
    z[0] = box.lo[0] + static_cast<int>(pick % static_cast<std::uint64_t>(box.hi[0] - box.lo[0] + 1));
    if (setup.dim == 2)
      z[1] = box.lo[1] + static_cast<int>((pick >> 32) % static_cast<std::uint64_t>(box.hi[1] - box.lo[1] + 1));
    where[t] = z;
  }
  parallel_for(count, setup.jobs, [&](std::size_t t) {
    const std::size_t r = t / static_cast<std::size_t>(opt.sites);
    reports[t] = envelope_derivative_check(inner, opt.n, where[t], opt.h_list, derive_seed(setup.seed, r));
  });
  bool sandwich = true;
  double worst = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    const auto& rep = reports[t];
    rec.solves += 1 + 2 * rep.rows.size() + rep.levels.size();
    if (!rep.converged) ++rec.failures;
    for (const auto& row : rep.rows) {
      rec.realizations.add({static_cast<double>(t / static_cast<std::size_t>(opt.sites)),
                            static_cast<double>(where[t][0]), static_cast<double>(where[t][1]), row.h,
                            row.delta_energy, row.upper, row.lower, row.sandwich ? 1.0 : 0.0, row.derivative_error,
                            rep.monotone ? 1.0 : 0.0, rep.converged ? 1.0 : 0.0});
      sandwich = sandwich && row.sandwich;
      if (row.h == *std::min_element(opt.h_list.begin(), opt.h_list.end()))
        worst = std::max(worst, row.derivative_error);
    }
  }
  rec.checks["envelope_sandwich"] = sandwich;
  rec.checks["max_derivative_error"] = worst;

  const auto profile = [](const Point& x) { return 2.0 * cutoff(x[0] + 4.0, 8.0) - 1.0; };
  const auto cut = cutoff_diagnostic(setup.dim, setup.s, 1, profile, opt.window, opt.sides);
  for (const auto& row : cut.rows)
    rec.aggregates.add({static_cast<double>(row.side), row.volume, row.interaction, row.ratio});
  rec.checks["cutoff_ratio_decreasing"] = cut.decreasing;
  return rec;
}

std::string to_json(const SweepRecord& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["solves"] = r.solves;
  j["failures"] = r.failures;
  j["failure_rate"] = r.failure_rate();
  j["checks"] = r.checks;
  auto& fits = j["fits"] = nlohmann::json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"name", f.name},
                    {"expected", f.expected},
                    {"slope", f.fit.slope},
                    {"intercept", f.fit.intercept},
                    {"slope_se", f.fit.slope_se},
                    {"ci_low", f.fit.ci_low},
                    {"ci_high", f.fit.ci_high},
                    {"r2", f.fit.r2},
                    {"points", f.fit.count}});
  return j.dump(2);
}

}  // namespace fracwell
