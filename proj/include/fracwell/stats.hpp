#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fracwell {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  /// unbiased sample variance
  double variance = 0.0;
  double std_error = 0.0;
};

Summary summarize(std::span<const double> x);
double median(std::vector<double> x);

struct LinearFit {
  std::size_t count = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
  double confidence = 0.95;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Ordinary least squares y = a + b x with a Student-t interval for b.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, double confidence = 0.95);

/// Least squares on arbitrary columns; returns coefficients and writes the residual sum of squares.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y,
                                  double* rss = nullptr);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Asymptotic two-sample critical value at level alpha.
double ks_critical(std::size_t na, std::size_t nb, double alpha);

struct NormalityTest {
  /// A^2 with estimated mean and variance, small-sample corrected
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Anderson-Darling test of normality.
NormalityTest anderson_darling(std::span<const double> x);

/**
 * Between-group variance of the group means, corrected for the
 * within-group noise:
 *   D2 = [sum_b n_b (m_b - m)^2 - (B - 1) s_w^2] / N
 * Groups are quantile bins of `key`.
 */
struct BinnedVariance {
  std::size_t bins = 0;
  double estimate = 0.0;
  /// bootstrap standard error
  double std_error = 0.0;
  std::vector<double> bin_means;
  std::vector<std::size_t> bin_counts;
};

BinnedVariance binned_variance(std::span<const double> key, std::span<const double> value, std::size_t bins,
                               std::size_t resamples = 400, std::uint64_t seed = 0);

}  // namespace fracwell
