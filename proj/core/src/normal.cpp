#include "ccd/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccd/error.hpp"

namespace ccd {
namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
// Both branches stay within ~1e-15 relative error at this switch point.
constexpr double kSeriesCutoff = 1.25;

// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (2n+1)!!, all terms
// positive so there is no cancellation.
double erf_series(double x) noexcept {
  const double two_x2 = 2.0 * x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 500; ++n) {
    term *= two_x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 * kInvSqrtPi * std::exp(-x * x) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// for x > 0, evaluated with the modified Lentz method.
double erfc_continued_fraction(double x) noexcept {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int k = 1; k < 2000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) * kInvSqrtPi / f;
}

// Acklam's rational approximation to the lower half of the normal quantile,
// relative error about 1.15e-9.
double acklam_lower(double p) noexcept {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// p <= 0.5 only.
double quantile_lower(double p) noexcept {
  if (p == 0.5) return 0.0;
  double x = acklam_lower(p);
  const double pdf = std_normal_pdf(x);
  if (pdf > 0.0) x -= (std_normal_cdf(x) - p) / pdf;
  return x;
}

}  // namespace

double std_normal_pdf(double x) noexcept {
  constexpr double inv_sqrt_2pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double erfc_series_cf(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc_series_cf(-x);
  if (x < kSeriesCutoff) return 1.0 - erf_series(x);
  return erfc_continued_fraction(x);
}

double std_normal_cdf(double x) noexcept {
  return 0.5 * erfc_series_cf(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0,1), got " + std::to_string(p));
  }
  if (p > 0.5) return -quantile_lower(1.0 - p);
  return quantile_lower(p);
}

}  // namespace ccd
