#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccd::stats {

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;    // asymptotic, Stephens' small-sample correction
  bool rejects(double level) const noexcept { return p_value < level; }
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda) noexcept;

/// Two-sample Kolmogorov-Smirnov test. Values whose sorted neighbours differ
/// by at most `tie_tolerance` are treated as one tied value, so that sums of
/// the same terms accumulated in different orders are not split apart.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double tie_tolerance = 0.0);

/// One-sample KS test against U[0,1].
KsResult ks_uniform(std::span<const double> sample);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double level);

double mean(std::span<const double> x) noexcept;
/// Standard error of the mean, sd / sqrt(n), with the n-1 variance.
double standard_error(std::span<const double> x) noexcept;
double lag1_autocorrelation(std::span<const double> x) noexcept;

}  // namespace ccd::stats
