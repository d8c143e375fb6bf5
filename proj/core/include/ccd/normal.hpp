#pragma once

// Standard normal special functions, implemented in-repo so that outputs do
// not depend on the platform libm's erf/erfc.

namespace ccd {

/// Density of N(0,1).
double std_normal_pdf(double x) noexcept;

/// Complementary error function. Power series for |x| < 2.5, Lentz
/// continued fraction beyond.
double erfc_series_cf(double x) noexcept;

/// Distribution function of N(0,1); absolute error below 1e-15 and small
/// relative error in the lower tail.
double std_normal_cdf(double x) noexcept;

/// Quantile function of N(0,1) for p in (0,1). Acklam's rational
/// approximation followed by one Newton step. Exactly antisymmetric:
/// quantile(1-p) == -quantile(p) whenever 1-p is representable.
///
/// Throws DomainError for p outside (0,1) or NaN.
double std_normal_quantile(double p);

}  // namespace ccd
