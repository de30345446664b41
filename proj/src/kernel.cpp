#include "fracwell/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fracwell {

KernelTable::KernelTable(int dim, double s, int refine, int axis_len)
    : dim_(dim), s_(s), len_(axis_len) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional order s must lie in (0, 1)");
  if (axis_len < 1) throw std::invalid_argument("kernel table needs a positive axis length");
  const double h = 1.0 / refine;
  const double expo = dim + 2.0 * s;
  // K(D) = h^{2d} (h |D|)^{-(d+2s)} = h^{d-2s} |D|^{-(d+2s)}
  const double scale = std::pow(h, dim - 2.0 * s);
  const std::size_t n = dim == 1 ? static_cast<std::size_t>(len_)
                                 : static_cast<std::size_t>(len_) * static_cast<std::size_t>(len_);
  w_.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double r2;
    if (dim == 1) {
      r2 = static_cast<double>(k) * static_cast<double>(k);
    } else {
      const double a = static_cast<double>(k % len_);
      const double b = static_cast<double>(k / len_);
      r2 = a * a + b * b;
    }
    w_[k] = scale * std::pow(r2, -0.5 * expo);
  }
}

double KernelTable::weight(int d0, int d1) const {
  d0 = std::abs(d0);
  d1 = std::abs(d1);
  if (d0 >= len_ || d1 >= len_) throw std::out_of_range("kernel offset outside table");
  return dim_ == 1 ? w_[static_cast<std::size_t>(d0)]
                   : w_[static_cast<std::size_t>(d0) + static_cast<std::size_t>(len_) * d1];
}

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct PairOperator::FftPlan {
  int dim = 1;
  int len = 0;      // grid points per axis
  int ext = 0;      // circulant size per axis, 2 * len
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftPlan(const KernelTable& table, int dim_, int len_) : dim(dim_), len(len_), ext(2 * len_) {
    real_size = dim == 1 ? static_cast<std::size_t>(ext) : static_cast<std::size_t>(ext) * ext;
    complex_size = dim == 1 ? static_cast<std::size_t>(ext / 2 + 1)
                            : static_cast<std::size_t>(ext) * (ext / 2 + 1);
    double* in = fftw_alloc_real(real_size);
    fftw_complex* out = fftw_alloc_complex(complex_size);
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      if (dim == 1) {
        forward = fftw_plan_dft_r2c_1d(ext, in, out, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(ext, out, in, FFTW_ESTIMATE);
      } else {
        forward = fftw_plan_dft_r2c_2d(ext, ext, in, out, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(ext, ext, out, in, FFTW_ESTIMATE);
      }
    }
    auto fold = [this](int k) { return k < len ? k : ext - k; };
    for (std::size_t k = 0; k < real_size; ++k) {
      const int k0 = static_cast<int>(k % ext);
      const int k1 = dim == 1 ? 0 : static_cast<int>(k / ext);
      if (k0 == len || k1 == len) {
        in[k] = 0.0;
        continue;
      }
      in[k] = table.weight(fold(k0), fold(k1));
    }
    fftw_execute_dft_r2c(forward, in, out);
    kernel_hat.resize(complex_size);
    for (std::size_t k = 0; k < complex_size; ++k) kernel_hat[k] = {out[k][0], out[k][1]};
    fftw_free(in);
    fftw_free(out);
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  // y_i = sum_{j != i} K(i - j) v_j
  void convolve(std::span<const double> v, std::span<double> y) const {
    double* in = fftw_alloc_real(real_size);
    fftw_complex* out = fftw_alloc_complex(complex_size);
    std::fill(in, in + real_size, 0.0);
    for (int k1 = 0; k1 < (dim == 1 ? 1 : len); ++k1)
      for (int k0 = 0; k0 < len; ++k0)
        in[static_cast<std::size_t>(k0) + static_cast<std::size_t>(ext) * k1] =
            v[static_cast<std::size_t>(k0) + static_cast<std::size_t>(len) * k1];
    fftw_execute_dft_r2c(forward, in, out);
    for (std::size_t k = 0; k < complex_size; ++k) {
      const std::complex<double> z(out[k][0], out[k][1]);
      const auto p = z * kernel_hat[k];
      out[k][0] = p.real();
      out[k][1] = p.imag();
    }
    fftw_execute_dft_c2r(backward, out, in);
    const double norm = 1.0 / static_cast<double>(real_size);
    for (int k1 = 0; k1 < (dim == 1 ? 1 : len); ++k1)
      for (int k0 = 0; k0 < len; ++k0)
        y[static_cast<std::size_t>(k0) + static_cast<std::size_t>(len) * k1] =
            in[static_cast<std::size_t>(k0) + static_cast<std::size_t>(ext) * k1] * norm;
    fftw_free(in);
    fftw_free(out);
  }
};

PairOperator::PairOperator(const Grid& grid, double s, KernelBackend backend)
    : grid_(grid), table_(grid.dim(), s, grid.refine(), grid.axis_points()) {
  if (backend == KernelBackend::automatic)
    backend = grid.size() > 1024 ? KernelBackend::fft : KernelBackend::dense;
  backend_ = backend;
  if (backend_ == KernelBackend::fft) fft_ = std::make_shared<const FftPlan>(table_, grid.dim(), grid.axis_points());

  const std::size_t n = grid.size();
  row_sums_.assign(n, 0.0);
  const std::vector<double> ones(n, 1.0);
  if (backend_ == KernelBackend::fft) {
    fft_->convolve(ones, row_sums_);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ki = grid.axis_index(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto kj = grid.axis_index(j);
        acc += table_.weight(ki[0] - kj[0], ki[1] - kj[1]);
      }
      row_sums_[i] = acc;
    }
  }
}

PairOperator::~PairOperator() = default;
PairOperator::PairOperator(const PairOperator&) = default;
PairOperator& PairOperator::operator=(const PairOperator&) = default;
PairOperator::PairOperator(PairOperator&&) noexcept = default;
PairOperator& PairOperator::operator=(PairOperator&&) noexcept = default;

double PairOperator::max_row_sum() const {
  return row_sums_.empty() ? 0.0 : *std::max_element(row_sums_.begin(), row_sums_.end());
}

void PairOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (backend_ == KernelBackend::fft)
    apply_fft(v, out);
  else
    apply_dense(v, out);
}

void PairOperator::apply_dense(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (v.size() != n || out.size() != n) throw std::invalid_argument("field size does not match grid");
  std::fill(out.begin(), out.end(), 0.0);
  const int len = grid_.axis_points();
  const double* x = v.data();
  double* y = out.data();
  if (grid_.dim() == 1) {
    // offset-major sweep: every inner loop is a contiguous axpy-like update
    for (int k = 1; k < len; ++k) {
      const double w = table_.weight(k);
      const int m = len - k;
      for (int i = 0; i < m; ++i) y[i + k] += w * (x[i + k] - x[i]);
      for (int i = 0; i < m; ++i) y[i] += w * (x[i] - x[i + k]);
    }
    return;
  }
  for (int d1 = -(len - 1); d1 < len; ++d1) {
    for (int d0 = -(len - 1); d0 < len; ++d0) {
      if (d0 == 0 && d1 == 0) continue;
      const double w = table_.weight(d0, d1);
      const int i1lo = std::max(0, -d1), i1hi = std::min(len, len - d1);
      const int i0lo = std::max(0, -d0), i0hi = std::min(len, len - d0);
      for (int i1 = i1lo; i1 < i1hi; ++i1) {
        double* yr = y + static_cast<std::ptrdiff_t>(len) * i1;
        const double* xr = x + static_cast<std::ptrdiff_t>(len) * i1;
        const double* xs = x + static_cast<std::ptrdiff_t>(len) * (i1 + d1) + d0;
        for (int i0 = i0lo; i0 < i0hi; ++i0) yr[i0] += w * (xr[i0] - xs[i0]);
      }
    }
  }
}

void PairOperator::apply_fft(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (v.size() != n || out.size() != n) throw std::invalid_argument("field size does not match grid");
  std::shared_ptr<const FftPlan> plan = fft_;
  if (!plan) plan = std::make_shared<const FftPlan>(table_, grid_.dim(), grid_.axis_points());
  plan->convolve(v, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = row_sums_[i] * v[i] - out[i];
}

double PairOperator::pair_sum(std::span<const double> u, const Region& a, std::span<const double> w,
                              const Region& b) const {
  const std::size_t n = grid_.size();
  if (u.size() != n || w.size() != n || a.size() != n || b.size() != n)
    throw std::invalid_argument("field or region size does not match grid");
  std::vector<std::size_t> bi;
  for (std::size_t j = 0; j < n; ++j)
    if (b[j]) bi.push_back(j);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i]) continue;
    const auto ki = grid_.axis_index(i);
    double acc = 0.0;
    for (std::size_t j : bi) {
      if (j == i) continue;
      const auto kj = grid_.axis_index(j);
      const double d = u[i] - w[j];
      acc += table_.weight(ki[0] - kj[0], ki[1] - kj[1]) * d * d;
    }
    total += acc;
  }
  return total;
}

namespace {

// int_0^psi cos^{2s}(t) dt for psi in [0, pi/2], via the incomplete beta function
double cos_power_integral(double s, double opposite, double adjacent) {
  const double r2 = opposite * opposite + adjacent * adjacent;
  if (r2 == 0.0) return 0.0;
  const double sin2 = opposite * opposite / r2;
  return 0.5 * boost::math::beta(0.5, s + 0.5) * boost::math::ibeta(0.5, s + 0.5, sin2);
}

}  // namespace

double exterior_weight(int dim, double half_side, const Point& x, double s) {
  const double a = half_side;
  if (dim == 1) {
    const double dl = x[0] + a, dr = a - x[0];
    if (!(dl > 0.0 && dr > 0.0)) throw std::domain_error("point must lie inside the box");
    return (std::pow(dl, -2.0 * s) + std::pow(dr, -2.0 * s)) / (2.0 * s);
  }
  // polar coordinates about x: int_{box^c} = (2s)^{-1} int_0^{2pi} rho(phi)^{-2s} dphi,
  // one smooth sector per side, rho = dist / cos(angle from the side normal)
  const double dist[4] = {a - x[0], x[0] + a, a - x[1], x[1] + a};
  for (double d : dist)
    if (!(d > 0.0)) throw std::domain_error("point must lie inside the box");
  // (normal distance, tangential extents to both corners) per side
  const double tangent[4][2] = {{a - x[1], x[1] + a}, {a - x[1], x[1] + a}, {a - x[0], x[0] + a}, {a - x[0], x[0] + a}};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double c = cos_power_integral(s, tangent[k][0], dist[k]) + cos_power_integral(s, tangent[k][1], dist[k]);
    total += std::pow(dist[k], -2.0 * s) * c;
  }
  return total / (2.0 * s);
}

double exterior_weight_quadrature(int dim, double half_side, const Point& x, double s) {
  const double a = half_side;
  if (dim == 1) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto side = [&](double gap) {
      auto f = [gap, s](double u) { return std::pow(u + gap, -1.0 - 2.0 * s); };
      return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
    };
    return side(x[0] + a) + side(a - x[0]);
  }
  // angular integral of rho(phi)^{-2s}, split at the four corner directions
  auto rho = [&](double phi) {
    const double c = std::cos(phi), sn = std::sin(phi);
    double r = std::numeric_limits<double>::infinity();
    if (c > 0) r = std::min(r, (a - x[0]) / c);
    if (c < 0) r = std::min(r, (-a - x[0]) / c);
    if (sn > 0) r = std::min(r, (a - x[1]) / sn);
    if (sn < 0) r = std::min(r, (-a - x[1]) / sn);
    return r;
  };
  double corners[4] = {std::atan2(a - x[1], a - x[0]), std::atan2(a - x[1], -a - x[0]),
                       std::atan2(-a - x[1], -a - x[0]), std::atan2(-a - x[1], a - x[0])};
  for (double& c : corners)
    if (c < 0) c += 2.0 * std::numbers::pi;
  std::sort(corners, corners + 4);
  double total = 0.0;
  auto f = [&](double phi) { return std::pow(rho(phi), -2.0 * s); };
  for (int k = 0; k < 4; ++k) {
    const double lo = corners[k];
    const double hi = k + 1 < 4 ? corners[k + 1] : corners[0] + 2.0 * std::numbers::pi;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
  }
  return total / (2.0 * s);
}

std::vector<double> exterior_weights(const Grid& grid, double s) {
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = exterior_weight(grid.dim(), grid.upper(), grid.point(i), s);
  return w;
}

}  // namespace fracwell
