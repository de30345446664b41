#include "fracwell/energy.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <stdexcept>

namespace fracwell {

Exterior Exterior::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("exterior value must be finite");
  Exterior e;
  e.kind = ExteriorKind::constant;
  e.tail = value;
  return e;
}

Exterior Exterior::grid_window(const Grid& window, std::vector<double> values, double tail) {
  if (values.size() != window.size()) throw std::invalid_argument("window values do not match window grid");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("window values must be finite");
  if (!std::isfinite(tail)) throw std::invalid_argument("exterior value must be finite");
  Exterior e;
  e.kind = ExteriorKind::window;
  e.window = window;
  e.window_values = std::move(values);
  e.tail = tail;
  return e;
}

double Exterior::sup_norm(const Grid& domain) const {
  double m = std::abs(tail);
  if (kind == ExteriorKind::window) {
    const Region inner = inner_region(window, domain.side());
    for (std::size_t i = 0; i < window_values.size(); ++i)
      if (!inner[i]) m = std::max(m, std::abs(window_values[i]));
  }
  return m;
}

Exterior Exterior::negated() const {
  Exterior e = *this;
  e.tail = -tail;
  for (double& v : e.window_values) v = -v;
  return e;
}

ScalarField ScalarField::constant(const Grid& grid, double value, const Exterior& ext) {
  return {grid, std::vector<double>(grid.size(), value), ext};
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void Model::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order s must lie in (0, 1)");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be non-negative");
}

namespace {

Grid working_grid(const Grid& domain, const Exterior& ext) {
  if (ext.kind == ExteriorKind::constant) return domain;
  const Grid& w = ext.window;
  if (w.dim() != domain.dim() || w.refine() != domain.refine())
    throw std::invalid_argument("exterior window must share dimension and refinement with the domain");
  if (w.side() < domain.side() || (w.side() - domain.side()) % 2 != 0)
    throw std::invalid_argument("exterior window must be a concentric enlargement of the domain");
  return w;
}

}  // namespace

Functional::Functional(const Grid& domain, const Model& model, const Disorder& disorder, const Exterior& exterior,
                       KernelBackend backend)
    : domain_(domain),
      model_(model),
      exterior_(exterior),
      op_(working_grid(domain, exterior), model.s, backend) {
  model_.validate();
  const Grid& work = op_.grid();
  weights_ = fracwell::exterior_weights(work, model_.s);
  lifted_ = lift_to_grid(disorder, work);
  bind_exterior();
}

void Functional::bind_exterior() {
  const Grid& work = op_.grid();
  free_idx_.clear();
  if (exterior_.kind == ExteriorKind::window) {
    free_ = inner_region(work, domain_.side());
    fixed_ = exterior_.window_values;
  } else {
    free_ = full_region(work);
    fixed_.assign(work.size(), exterior_.tail);
  }
  for (std::size_t i = 0; i < free_.size(); ++i)
    if (free_[i]) free_idx_.push_back(i);
}

Functional Functional::with_exterior(const Exterior& exterior) const {
  if (!(working_grid(domain_, exterior) == op_.grid()))
    throw std::invalid_argument("exterior does not share the working grid");
  Functional f = *this;
  f.exterior_ = exterior;
  f.bind_exterior();
  return f;
}

Functional Functional::with_disorder(const Disorder& disorder) const {
  Functional f = *this;
  f.lifted_ = lift_to_grid(disorder, op_.grid());
  return f;
}

std::vector<double> Functional::embed(std::span<const double> interior) const {
  if (interior.size() != free_idx_.size()) throw std::invalid_argument("field size does not match domain");
  std::vector<double> full = fixed_;
  for (std::size_t k = 0; k < free_idx_.size(); ++k) {
    if (!std::isfinite(interior[k])) throw std::invalid_argument("field values must be finite");
    full[free_idx_[k]] = interior[k];
  }
  return full;
}

std::vector<double> Functional::restrict_to_domain(std::span<const double> full) const {
  std::vector<double> v(free_idx_.size());
  for (std::size_t k = 0; k < free_idx_.size(); ++k) v[k] = full[free_idx_[k]];
  return v;
}

ScalarField Functional::field(std::span<const double> interior) const {
  return {domain_, std::vector<double>(interior.begin(), interior.end()), exterior_};
}

EnergyBreakdown Functional::breakdown(std::span<const double> interior) const {
  return region_breakdown(embed(interior), free_);
}

EnergyBreakdown Functional::region_breakdown(std::span<const double> full, const Region& region) const {
  const Grid& work = op_.grid();
  if (full.size() != work.size() || region.size() != work.size())
    throw std::invalid_argument("field or region does not match working grid");
  Region rest(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) rest[i] = region[i] ? 0 : 1;
  const double hd = work.cell_volume();
  EnergyBreakdown e;
  e.gagliardo = op_.pair_sum(full, region, full, region);
  double pot = 0.0, dis = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (!region[i]) continue;
    pot += model_.potential.value(full[i]);
    dis += lifted_[i] * full[i];
    const double d = full[i] - exterior_.tail;
    tail += weights_[i] * d * d;
  }
  e.potential = hd * pot;
  e.disorder = -model_.theta * hd * dis;
  e.exterior = 2.0 * op_.pair_sum(full, region, full, rest) + 2.0 * hd * tail;
  e.total = e.gagliardo + e.potential + e.disorder + e.exterior;
  return e;
}

void Functional::gradient_from(std::span<const double> full, std::span<const double> lv,
                               std::span<double> grad) const {
  const double hd = op_.grid().cell_volume();
  const auto& w = model_.potential;
  for (std::size_t k = 0; k < free_idx_.size(); ++k) {
    const std::size_t i = free_idx_[k];
    const double v = full[i];
    grad[k] = 4.0 * lv[i] + hd * (w.slope(v) - model_.theta * lifted_[i]) +
              4.0 * hd * weights_[i] * (v - exterior_.tail);
  }
}

std::vector<double> Functional::gradient(std::span<const double> interior) const {
  const auto full = embed(interior);
  std::vector<double> lv(full.size());
  op_.apply(full, lv);
  std::vector<double> g(free_idx_.size());
  gradient_from(full, lv, g);
  return g;
}

double Functional::residual(std::span<const double> interior) const {
  const auto g = gradient(interior);
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m / (2.0 * op_.grid().cell_volume());
}

std::vector<double> Functional::diagonal_bound() const {
  const double hd = op_.grid().cell_volume();
  const auto& rows = op_.row_sums();
  std::vector<double> d(free_idx_.size());
  for (std::size_t k = 0; k < free_idx_.size(); ++k) {
    const std::size_t i = free_idx_[k];
    d[k] = 4.0 * rows[i] + 4.0 * hd * weights_[i] + hd * model_.potential.max_curvature();
  }
  return d;
}

double interior_energy(const Functional& f, std::span<const double> interior) {
  return f.breakdown(interior).interior();
}

double exterior_interaction(const Functional& f, std::span<const double> interior) {
  return f.breakdown(interior).exterior;
}

EnergyBreakdown total_energy(const Functional& f, std::span<const double> interior) {
  return f.breakdown(interior);
}

double el_residual(const Functional& f, std::span<const double> interior) { return f.residual(interior); }

std::string to_json(const EnergyBreakdown& e) {
  nlohmann::json j = {{"gagliardo", e.gagliardo}, {"potential", e.potential}, {"disorder", e.disorder},
                      {"exterior", e.exterior},   {"interior", e.interior()}, {"total", e.total}};
  return j.dump();
}

}  // namespace fracwell
