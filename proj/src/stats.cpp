#include "fracwell/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fracwell {

Summary summarize(std::span<const double> x) {
  Summary s;
  s.count = x.size();
  if (x.empty()) return s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(x.size() - 1);
    s.std_error = std::sqrt(s.variance / static_cast<double>(x.size()));
  }
  return s;
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y, double confidence) {
  if (x.size() != y.size()) throw std::invalid_argument("fit needs paired samples");
  if (x.size() < 3) throw std::invalid_argument("fit needs at least three points");
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit needs distinct abscissae");
  LinearFit f;
  f.count = n;
  f.confidence = confidence;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - f.rss / syy : 1.0;
  f.slope_se = std::sqrt(f.rss / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t t(static_cast<double>(n - 2));
  const double q = boost::math::quantile(boost::math::complement(t, 0.5 * (1.0 - confidence)));
  f.ci_low = f.slope - q * f.slope_se;
  f.ci_high = f.slope + q * f.slope_se;
  return f;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y,
                                  double* rss) {
  const auto rows = static_cast<Eigen::Index>(y.size());
  const auto cols = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (columns[c].size() != y.size()) throw std::invalid_argument("column length mismatch");
    for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = columns[c][r];
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), rows);
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  if (rss) *rss = (a * coef - b).squaredNorm();
  return {coef.data(), coef.data() + cols};
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical(std::size_t na, std::size_t nb, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  return c * std::sqrt(static_cast<double>(na + nb) / (static_cast<double>(na) * nb));
}

NormalityTest anderson_darling(std::span<const double> x) {
  if (x.size() < 8) throw std::invalid_argument("Anderson-Darling needs at least eight samples");
  const auto s = summarize(x);
  const double sd = std::sqrt(s.variance);
  if (!(sd > 0.0)) throw std::invalid_argument("Anderson-Darling needs a non-degenerate sample");
  std::vector<double> z(x.begin(), x.end());
  for (double& v : z) v = (v - s.mean) / sd;
  std::sort(z.begin(), z.end());
  const boost::math::normal phi;
  const std::size_t n = z.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = boost::math::cdf(phi, z[i]);
    const double hi = boost::math::cdf(boost::math::complement(phi, z[n - 1 - i]));
    acc += (2.0 * i + 1.0) * (std::log(std::max(lo, 1e-300)) + std::log(std::max(hi, 1e-300)));
  }
  const double nn = static_cast<double>(n);
  const double a2 = -nn - acc / nn;
  const double a = a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));
  NormalityTest t;
  t.statistic = a;
  if (a < 0.2)
    t.p_value = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  else if (a < 0.34)
    t.p_value = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  else if (a < 0.6)
    t.p_value = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  else
    t.p_value = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  t.p_value = std::clamp(t.p_value, 0.0, 1.0);
  return t;
}

namespace {

double binned_estimate(std::span<const double> key, std::span<const double> value, std::size_t bins,
                       std::vector<double>* means, std::vector<std::size_t>* counts) {
  const std::size_t n = key.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> cnt(bins, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t b = r * bins / n;
    const double v = value[order[r]];
    sum[b] += v;
    cnt[b] += 1;
  }
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) total += sum[b];
  const double grand = total / static_cast<double>(n);
  std::vector<double> m(bins);
  for (std::size_t b = 0; b < bins; ++b) m[b] = sum[b] / static_cast<double>(cnt[b]);
  double within = 0.0, between = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t b = r * bins / n;
    const double d = value[order[r]] - m[b];
    within += d * d;
  }
  for (std::size_t b = 0; b < bins; ++b) between += static_cast<double>(cnt[b]) * (m[b] - grand) * (m[b] - grand);
  const double sw2 = within / static_cast<double>(n - bins);
  if (means) *means = m;
  if (counts) *counts = cnt;
  return (between - static_cast<double>(bins - 1) * sw2) / static_cast<double>(n);
}

}  // namespace

BinnedVariance binned_variance(std::span<const double> key, std::span<const double> value, std::size_t bins,
                               std::size_t resamples, std::uint64_t seed) {
  if (key.size() != value.size()) throw std::invalid_argument("binned variance needs paired samples");
  if (bins < 2 || key.size() < 2 * bins) throw std::invalid_argument("binned variance needs at least two samples per bin");
  BinnedVariance out;
  out.bins = bins;
  out.estimate = binned_estimate(key, value, bins, &out.bin_means, &out.bin_counts);
  if (resamples > 1) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, key.size() - 1);
    std::vector<double> k(key.size()), v(key.size()), est(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
      for (std::size_t i = 0; i < key.size(); ++i) {
        const std::size_t j = pick(rng);
        k[i] = key[j];
        v[i] = value[j];
      }
      est[b] = binned_estimate(k, v, bins, nullptr, nullptr);
    }
    out.std_error = std::sqrt(summarize(est).variance);
  }
  return out;
}

}  // namespace fracwell
