#include "ccd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccd/error.hpp"

namespace ccd::stats {
namespace {

double ks_p_value(double d, double effective_n) noexcept {
  const double root = std::sqrt(effective_n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

double kolmogorov_survival(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double tie_tolerance) {
  if (a.empty() || b.empty()) throw InputError("ks_two_sample: both samples must be non-empty");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    // Smallest remaining value, then absorb everything tied with the group.
    double x = i < sa.size() ? sa[i] : sb[j];
    if (j < sb.size() && sb[j] < x) x = sb[j];
    double group_top = x;
    for (;;) {
      bool advanced = false;
      while (i < sa.size() && sa[i] - group_top <= tie_tolerance) {
        group_top = std::max(group_top, sa[i]);
        ++i;
        advanced = true;
      }
      while (j < sb.size() && sb[j] - group_top <= tie_tolerance) {
        group_top = std::max(group_top, sb[j]);
        ++j;
        advanced = true;
      }
      if (!advanced) break;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

KsResult ks_uniform(std::span<const double> sample) {
  if (sample.empty()) throw InputError("ks_uniform: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x = std::clamp(s[k], 0.0, 1.0);
    d = std::max({d, static_cast<double>(k + 1) / n - x, x - static_cast<double>(k) / n});
  }
  return {d, ks_p_value(d, n)};
}

double quantile_sorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw InputError("quantile_sorted: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw DomainError("quantile_sorted: level must lie in [0,1]");
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> x) noexcept {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) noexcept {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double lag1_autocorrelation(std::span<const double> x) noexcept {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - m) * (x[i] - m);
    if (i + 1 < x.size()) num += (x[i] - m) * (x[i + 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace ccd::stats
