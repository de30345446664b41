#include "fracwell/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace fracwell {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (multistart < 1) throw std::invalid_argument("multistart must be at least 1");
  if (!(armijo > 0.0 && armijo < 0.5)) throw std::invalid_argument("armijo constant must lie in (0, 1/2)");
  if (memory < 1) throw std::invalid_argument("memory must be at least 1");
  if (start_level < 0.0) throw std::invalid_argument("start level must be non-negative");
}

std::string to_string(SolverMethod m) { return m == SolverMethod::descent ? "descent" : "accelerated"; }

std::string to_string(InitialPolicy p) {
  switch (p) {
    case InitialPolicy::plus_k: return "plus_k";
    case InitialPolicy::minus_k: return "minus_k";
    case InitialPolicy::random: return "random";
    case InitialPolicy::given: return "given";
  }
  return "plus_k";
}

SolverMethod solver_method_from_name(const std::string& name) {
  if (name == "descent") return SolverMethod::descent;
  if (name == "accelerated") return SolverMethod::accelerated;
  throw std::invalid_argument("unknown solver method: " + name);
}

InitialPolicy initial_policy_from_name(const std::string& name) {
  if (name == "plus_k") return InitialPolicy::plus_k;
  if (name == "minus_k") return InitialPolicy::minus_k;
  if (name == "random") return InitialPolicy::random;
  if (name == "given") return InitialPolicy::given;
  throw std::invalid_argument("unknown initial policy: " + name);
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class Descent {
 public:
  Descent(const Functional& f, const SolverConfig& cfg) : f_(f), cfg_(cfg) {
    const auto& idx = f.free_indices();
    hd_ = f.work_grid().cell_volume();
    diag_ = f.diagonal_bound();
    w_.resize(idx.size());
    g1_.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      w_[k] = f.exterior_weights()[idx[k]];
      g1_[k] = f.field_disorder()[idx[k]];
    }
  }

  MinimizeResult run(std::vector<double> x, const std::string& id) {
    const auto& idx = f_.free_indices();
    const std::size_t n = idx.size();
    const std::size_t nw = f_.work_grid().size();
    if (x.size() != n) throw std::invalid_argument("start does not match domain size");

    std::vector<double> full = f_.embed(x);
    std::vector<double> lv(nw), grad(n), p(n), fullp(nw, 0.0), lp(nw);
    f_.op().apply(full, lv);
    f_.gradient_from(full, lv, grad);

    MinimizeResult r;
    r.initial_id = id;
    double energy = f_.energy(x);
    if (cfg_.record_history) r.history.push_back(energy);

    // L-BFGS memory
    const int mem = cfg_.memory;
    std::vector<std::vector<double>> sk, yk;
    std::vector<double> rho;
    std::vector<double> prev_x, prev_g;
    bool polish = false;

    const double tol = cfg_.tolerance * 2.0 * hd_;
    int it = 0;
    int since_refresh = 0;
    for (; it < cfg_.max_iter; ++it) {
      double gmax = max_abs(grad);
      if (gmax <= tol) {
        // confirm with a freshly assembled gradient
        f_.op().apply(full, lv);
        f_.gradient_from(full, lv, grad);
        since_refresh = 0;
        gmax = max_abs(grad);
        if (gmax <= tol) break;
      }
      if (cfg_.method == SolverMethod::accelerated && !polish && gmax <= cfg_.switch_residual * 2.0 * hd_)
        polish = true;

      bool quasi = false;
      if (polish && !sk.empty()) {
        two_loop(grad, sk, yk, rho, p);
        if (dot(grad, p) < 0.0) quasi = true;
      }
      if (!quasi) {
        sk.clear();
        yk.clear();
        rho.clear();
        for (std::size_t k = 0; k < n; ++k) p[k] = -grad[k] / diag_[k];
      }

      for (std::size_t k = 0; k < n; ++k) fullp[idx[k]] = p[k];
      f_.op().apply(fullp, lp);
      for (std::size_t k = 0; k < n; ++k) fullp[idx[k]] = 0.0;

      double alpha = 0.0;
      double delta = 0.0;
      if (!line_search(x, p, grad, full, lv, lp, alpha, delta)) {
        if (quasi) {
          sk.clear();
          yk.clear();
          rho.clear();
          continue;
        }
        break;  // no decrease possible at working precision
      }

      if (polish) {
        prev_x = x;
        prev_g = grad;
      }
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        full[idx[k]] = x[k];
      }
      energy += delta;
      if (++since_refresh >= 64) {
        f_.op().apply(full, lv);
        since_refresh = 0;
      } else {
        for (std::size_t i = 0; i < nw; ++i) lv[i] += alpha * lp[i];
      }
      f_.gradient_from(full, lv, grad);
      if (cfg_.record_history) r.history.push_back(energy);

      if (polish) {
        std::vector<double> s(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
          s[k] = x[k] - prev_x[k];
          y[k] = grad[k] - prev_g[k];
        }
        const double sy = dot(s, y);
        if (sy > 1e-300 && sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
          if (static_cast<int>(sk.size()) == mem) {
            sk.erase(sk.begin());
            yk.erase(yk.begin());
            rho.erase(rho.begin());
          }
          sk.push_back(std::move(s));
          yk.push_back(std::move(y));
          rho.push_back(1.0 / sy);
        }
      }
    }

    f_.op().apply(full, lv);
    f_.gradient_from(full, lv, grad);
    r.values = std::move(x);
    r.energy = f_.breakdown(r.values);
    r.residual = max_abs(grad) / (2.0 * hd_);
    r.iterations = it;
    r.converged = r.residual <= cfg_.tolerance;
    return r;
  }

 private:
  void two_loop(std::span<const double> grad, const std::vector<std::vector<double>>& sk,
                const std::vector<std::vector<double>>& yk, const std::vector<double>& rho,
                std::span<double> p) const {
    const std::size_t n = grad.size();
    const std::size_t m = sk.size();
    std::vector<double> q(grad.begin(), grad.end()), a(m);
    for (std::size_t j = m; j-- > 0;) {
      a[j] = rho[j] * dot(sk[j], q);
      for (std::size_t k = 0; k < n; ++k) q[k] -= a[j] * yk[j][k];
    }
    const auto& yl = yk.back();
    double yhy = 0.0;
    for (std::size_t k = 0; k < n; ++k) yhy += yl[k] * yl[k] / diag_[k];
    const double gamma = yhy > 0.0 ? 1.0 / (rho.back() * yhy) : 1.0;
    for (std::size_t k = 0; k < n; ++k) q[k] *= gamma / diag_[k];
    for (std::size_t j = 0; j < m; ++j) {
      const double b = rho[j] * dot(yk[j], q);
      for (std::size_t k = 0; k < n; ++k) q[k] += sk[j][k] * (a[j] - b);
    }
    for (std::size_t k = 0; k < n; ++k) p[k] = -q[k];
  }

  // Backtracking on the exact energy increment along p.
  bool line_search(std::span<const double> x, std::span<const double> p, std::span<const double> grad,
                   std::span<const double> full, std::span<const double> lv, std::span<const double> lp,
                   double& alpha, double& delta) const {
    const auto& idx = f_.free_indices();
    const auto& model = f_.model();
    const double c = f_.tail();
    double plx = 0.0, plp = 0.0, lin_dis = 0.0, lin_tail = 0.0, quad_tail = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const std::size_t i = idx[k];
      plx += p[k] * lv[i];
      plp += p[k] * lp[i];
      lin_dis += g1_[k] * p[k];
      lin_tail += w_[k] * p[k] * (full[i] - c);
      quad_tail += w_[k] * p[k] * p[k];
    }
    const double lin = 4.0 * plx - model.theta * hd_ * lin_dis + 4.0 * hd_ * lin_tail;
    const double quad = 2.0 * plp + 2.0 * hd_ * quad_tail;
    const double slope = dot(grad, p);
    if (!(slope < 0.0)) return false;
    alpha = 1.0;
    for (int tries = 0; tries < 80; ++tries) {
      double dw = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) dw += model.potential.increment(x[k], alpha * p[k]);
      delta = alpha * lin + alpha * alpha * quad + hd_ * dw;
      if (delta <= cfg_.armijo * alpha * slope) return true;
      alpha *= 0.5;
    }
    return false;
  }

  const Functional& f_;
  const SolverConfig& cfg_;
  double hd_ = 1.0;
  std::vector<double> diag_, w_, g1_;
};

double start_level(const Functional& f, const SolverConfig& cfg) {
  if (cfg.start_level > 0.0) return cfg.start_level;
  const double gmax = max_abs(f.field_disorder());
  return std::max(f.exterior().sup_norm(f.domain()), truncation_level(f.model(), gmax));
}

std::vector<MinimizeResult> all_starts(const Functional& f, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = f.free_indices().size();
  const double level = start_level(f, cfg);
  std::vector<MinimizeResult> out;
  for (int k = 0; k < cfg.multistart; ++k) {
    std::vector<double> start(n);
    std::string id;
    InitialPolicy policy = k == 0 ? cfg.initial : InitialPolicy::random;
    switch (policy) {
      case InitialPolicy::plus_k:
        std::fill(start.begin(), start.end(), level);
        id = "plus_k";
        break;
      case InitialPolicy::minus_k:
        std::fill(start.begin(), start.end(), -level);
        id = "minus_k";
        break;
      case InitialPolicy::random: {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
        std::uniform_real_distribution<double> u(-level, level);
        for (double& v : start) v = u(rng);
        id = "random_" + std::to_string(k);
        break;
      }
      case InitialPolicy::given:
        if (cfg.given.size() != n) throw std::invalid_argument("given start does not match domain size");
        start = cfg.given;
        id = "given";
        break;
    }
    out.push_back(descend(f, cfg, std::move(start), id));
  }
  return out;
}

}  // namespace

MinimizeResult descend(const Functional& f, const SolverConfig& cfg, std::vector<double> start,
                       const std::string& id) {
  cfg.validate();
  Descent d(f, cfg);
  return d.run(std::move(start), id);
}

MinimizeResult minimize(const Functional& f, const SolverConfig& cfg) {
  auto runs = all_starts(f, cfg);
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].energy.total < runs[best].energy.total) best = k;
  const double e0 = runs[best].energy.total;
  const double tie = cfg.tie_tolerance * std::max(1.0, std::abs(e0));
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (k == best || std::abs(runs[k].energy.total - e0) > tie) continue;
    if (std::lexicographical_compare(runs[best].values.begin(), runs[best].values.end(), runs[k].values.begin(),
                                     runs[k].values.end()))
      best = k;
  }
  return std::move(runs[best]);
}

ScalarField truncate(const ScalarField& v, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("truncation level must be positive");
  ScalarField out = v;
  auto clamp = [t](double x) { return std::clamp(x, -t, t); };
  for (double& x : out.values) x = clamp(x);
  out.exterior.tail = clamp(out.exterior.tail);
  for (double& x : out.exterior.window_values) x = clamp(x);
  return out;
}

std::pair<ScalarField, ScalarField> lattice_min_max(const ScalarField& u, const ScalarField& v) {
  if (!(u.grid == v.grid) || u.values.size() != v.values.size())
    throw std::invalid_argument("fields live on different grids");
  if (u.exterior.kind != v.exterior.kind ||
      (u.exterior.kind == ExteriorKind::window && !(u.exterior.window == v.exterior.window)))
    throw std::invalid_argument("exteriors are not comparable");
  ScalarField hi = u, lo = u;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    hi.values[i] = std::max(u.values[i], v.values[i]);
    lo.values[i] = std::min(u.values[i], v.values[i]);
  }
  hi.exterior.tail = std::max(u.exterior.tail, v.exterior.tail);
  lo.exterior.tail = std::min(u.exterior.tail, v.exterior.tail);
  for (std::size_t i = 0; i < u.exterior.window_values.size(); ++i) {
    hi.exterior.window_values[i] = std::max(u.exterior.window_values[i], v.exterior.window_values[i]);
    lo.exterior.window_values[i] = std::min(u.exterior.window_values[i], v.exterior.window_values[i]);
  }
  return {hi, lo};
}

double truncation_level(const Model& model, double disorder_bound) {
  return 1.0 + model.potential.c0() * model.theta * disorder_bound;
}

ExtremalStates extremal_pair(double k, const Functional& base, const SolverConfig& cfg, bool sensitivity) {
  const double level = truncation_level(base.model(), max_abs(base.field_disorder()));
  if (!(k >= level * (1.0 - 1e-14))) throw std::invalid_argument("K must be at least 1 + C0 theta A");
  auto solve = [&](double kk, double sign) {
    SolverConfig c = cfg;
    c.initial = sign > 0 ? InitialPolicy::plus_k : InitialPolicy::minus_k;
    c.start_level = kk;
    const Functional f = base.with_exterior(Exterior::constant(sign * kk));
    auto runs = all_starts(f, c);
    MinimizeResult best = runs.front();
    if (runs.size() > 1) {
      // envelope of every start tied with the best energy
      double e0 = best.energy.total;
      for (const auto& r : runs) e0 = std::min(e0, r.energy.total);
      const double tie = c.tie_tolerance * std::max(1.0, std::abs(e0));
      bool first = true;
      for (const auto& r : runs) {
        if (std::abs(r.energy.total - e0) > tie) continue;
        if (first) {
          best = r;
          first = false;
          continue;
        }
        for (std::size_t i = 0; i < r.values.size(); ++i)
          best.values[i] = sign > 0 ? std::max(best.values[i], r.values[i]) : std::min(best.values[i], r.values[i]);
        best.converged = best.converged && r.converged;
      }
      best.energy = f.breakdown(best.values);
      best.residual = f.residual(best.values);
    }
    return best;
  };
  ExtremalStates e;
  e.k = k;
  e.plus = solve(k, 1.0);
  e.minus = solve(k, -1.0);
  double viol = 0.0;
  for (std::size_t i = 0; i < e.plus.values.size(); ++i) viol = std::max(viol, e.minus.values[i] - e.plus.values[i]);
  e.ordering_violation = viol;
  if (sensitivity) {
    const auto p2 = solve(2.0 * k, 1.0);
    const auto m2 = solve(2.0 * k, -1.0);
    double gp = 0.0, gm = 0.0;
    for (std::size_t i = 0; i < p2.values.size(); ++i) {
      gp = std::max(gp, std::abs(p2.values[i] - e.plus.values[i]));
      gm = std::max(gm, std::abs(m2.values[i] - e.minus.values[i]));
    }
    e.sensitivity = std::make_pair(gp, gm);
  }
  return e;
}

ExtremalStates extremal_pair(double k, const Disorder& g, const Model& model, const Grid& grid,
                             const SolverConfig& cfg, bool sensitivity) {
  if (!(k >= truncation_level(model, g.distribution().bound()) * (1.0 - 1e-14)))
    throw std::invalid_argument("K must be at least 1 + C0 theta A");
  const Functional f(grid, model, g, Exterior::constant(k));
  return extremal_pair(k, f, cfg, sensitivity);
}

double cutoff(double distance, double width) {
  const double t = std::clamp(distance / width, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

ScalarField glue_cutoff(const ScalarField& plus, const ScalarField& minus, double width) {
  if (!(plus.grid == minus.grid) || plus.values.size() != minus.values.size())
    throw std::invalid_argument("fields live on different grids");
  ScalarField out = minus;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double psi = cutoff(plus.grid.boundary_distance(i), width);
    out.values[i] = psi * plus.values[i] + (1.0 - psi) * minus.values[i];
  }
  return out;
}

namespace {

double domain_distance(const Grid& domain, const Point& x) {
  double d = domain.upper() - std::abs(x[0]);
  if (domain.dim() == 2) d = std::min(d, domain.upper() - std::abs(x[1]));
  return d;
}

}  // namespace

GlueReport glue_report(const Functional& plus, std::span<const double> v_plus, const Functional& minus,
                       std::span<const double> v_minus, double width) {
  if (!(plus.work_grid() == minus.work_grid()) || !(plus.domain() == minus.domain()))
    throw std::invalid_argument("functionals do not share domain and working grid");
  const Grid& work = plus.work_grid();
  const auto& idx = plus.free_indices();
  std::vector<double> u(idx.size());
  Region strip(work.size(), 0), bulk(work.size(), 0);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double dist = domain_distance(plus.domain(), work.point(idx[k]));
    const double psi = cutoff(dist, width);
    u[k] = psi * v_plus[k] + (1.0 - psi) * v_minus[k];
    (dist <= width ? strip : bulk)[idx[k]] = 1;
  }
  const auto full_u = minus.embed(u);
  const auto full_p = plus.embed(v_plus);

  GlueReport r;
  r.energy_plus = plus.energy(v_plus);
  r.energy_minus = minus.energy(v_minus);
  const auto glued = minus.breakdown(u);
  r.energy_glued = glued.total;
  r.r1 = minus.region_breakdown(full_u, strip).interior() - plus.region_breakdown(full_p, strip).interior();
  r.r2 = 2.0 * (plus.op().pair_sum(full_u, bulk, full_u, strip) - plus.op().pair_sum(full_p, bulk, full_p, strip));
  r.r3 = glued.exterior - plus.breakdown(v_plus).exterior;
  r.identity_defect = std::abs(r.energy_glued - r.energy_plus - r.r1 - r.r2 - r.r3);
  r.chain_slack = r.energy_glued - r.energy_minus;
  return r;
}

double holder_quotient(const Grid& grid, std::span<const double> v, double alpha) {
  if (v.size() != grid.size()) throw std::invalid_argument("field does not match grid");
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point xi = grid.point(i);
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const Point xj = grid.point(j);
      const double r = std::hypot(xi[0] - xj[0], xi[1] - xj[1]);
      q = std::max(q, std::abs(v[i] - v[j]) / std::pow(r, alpha));
    }
  }
  return q;
}

namespace {

nlohmann::json result_json(const MinimizeResult& r, bool with_values) {
  nlohmann::json j = {{"energy", nlohmann::json::parse(to_json(r.energy))},
                      {"residual", r.residual},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"initial", r.initial_id}};
  if (with_values) j["values"] = r.values;
  return j;
}

}  // namespace

std::string to_json(const MinimizeResult& r, bool with_values) { return result_json(r, with_values).dump(); }

std::string to_json(const ExtremalStates& e, bool with_values) {
  nlohmann::json j = {{"K", e.k},
                      {"plus", result_json(e.plus, with_values)},
                      {"minus", result_json(e.minus, with_values)},
                      {"ordering_violation", e.ordering_violation}};
  if (e.sensitivity) j["sensitivity"] = {e.sensitivity->first, e.sensitivity->second};
  return j.dump();
}

}  // namespace fracwell
