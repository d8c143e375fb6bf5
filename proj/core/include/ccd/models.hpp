#pragma once

// Pre/post-change distribution pairs, their likelihood ratios, the canonical
// asymptotically optimal (CAO) betting functions, and Neyman-Pearson ROC
// curves.
//
// A betting function f maps a conformal p-value to a nonnegative bet and
// integrates to one over [0,1]. The CAO betting function of a pair is the
// left-continuous inverse of the survival function of L(z) = f1(z)/f0(z)
// under the pre-change law, i.e. f(p) = sup{t : Q0(L > t) >= p}. It is also
// the derivative of the pair's ROC curve.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace ccd {

/// Clamp applied to p before evaluating closed-form betting functions.
inline constexpr double kBettingClamp = 1e-12;

/// Likelihood-ratio levels of a finite observation space together with their
/// pre-change probabilities.
class FiniteLikelihoodTable {
 public:
  /// Levels need not be sorted; equal levels are merged. Throws DomainError
  /// unless masses are positive and sum to one (within 1e-12) and levels are
  /// positive and finite.
  FiniteLikelihoodTable(std::vector<double> levels, std::vector<double> masses);

  std::span<const double> levels() const noexcept { return levels_; }
  std::span<const double> masses() const noexcept { return masses_; }
  std::size_t size() const noexcept { return levels_.size(); }

  /// tail(k) = masses[k] + ... + masses[K-1]; tail(0) is exactly 1.
  double tail(std::size_t k) const noexcept { return tails_[k]; }

 private:
  std::vector<double> levels_;
  std::vector<double> masses_;
  std::vector<double> tails_;
};

/// Pre-change N(0,1) or Bernoulli(theta0) against a post-change alternative.
class PrePostPair {
 public:
  enum class Kind { bernoulli, gauss_mean, gauss_var };

  /// Throws DomainError unless theta0, theta1 in (0,1) and theta0 != theta1.
  static PrePostPair bernoulli(double theta0, double theta1);
  /// N(0,1) -> N(mu,1); mu != 0.
  static PrePostPair gauss_mean(double mu);
  /// N(0,1) -> N(0,sigma^2); sigma > 0, sigma != 1.
  static PrePostPair gauss_var(double sigma);

  Kind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  double theta0() const noexcept { return a_; }
  double theta1() const noexcept { return b_; }
  double mu() const noexcept { return a_; }
  double sigma() const noexcept { return a_; }

  /// Pre-/post-change density (pmf for Bernoulli) at z.
  double density0(double z) const noexcept;
  double density1(double z) const noexcept;
  double log_density0(double z) const noexcept;
  double log_density1(double z) const noexcept;

  /// Levels and pre-change masses of L; Bernoulli only.
  std::optional<FiniteLikelihoodTable> finite_table() const;

  /// KL(Q0 || Q1) and KL(Q1 || Q0) in nats.
  double kl_pre_post() const noexcept;
  double kl_post_pre() const noexcept;

 private:
  PrePostPair(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

/// ln(f1(z)/f0(z)) by the pair's closed form. Throws DomainError if z is not
/// in the support of both densities.
double log_likelihood_ratio(const PrePostPair& pair, double z);

/// Closed-form CAO betting functions for the Gaussian pairs. p is clamped to
/// [kBettingClamp, 1 - kBettingClamp].
double cao_gauss_mean(double mu, double p);
double cao_gauss_var(double sigma, double p);
double log_cao_gauss_mean(double mu, double p);
double log_cao_gauss_var(double sigma, double p);

/// Betting function in ROC-derivative form phi(.)/phi(.), an independent
/// algebraic route to the same function as the closed forms above.
double roc_derivative(const PrePostPair& pair, double p);

/// Power of the most powerful (randomized) test at type-I error p.
double roc_curve(const PrePostPair& pair, double p);

class BettingFunction {
 public:
  enum class Kind { finite_cao, gauss_mean_cao, gauss_var_cao, empirical_cao };

  static BettingFunction finite(FiniteLikelihoodTable table);
  static BettingFunction gauss_mean(double mu);
  static BettingFunction gauss_var(double sigma);
  /// Throws InputError on empty input or non-positive/non-finite samples.
  static BettingFunction empirical(std::vector<double> likelihood_samples);
  /// The CAO betting function of a pair.
  static BettingFunction cao(const PrePostPair& pair);

  /// Throws DomainError for p outside [0,1].
  double operator()(double p) const;
  /// ln f(p); -inf when f(p) == 0.
  double log_value(double p) const;

  Kind kind() const noexcept;
  std::string_view name() const noexcept;

 private:
  struct Finite {
    FiniteLikelihoodTable table;
  };
  struct GaussMean {
    double mu;
  };
  struct GaussVar {
    double sigma;
  };
  struct Empirical {
    std::vector<double> sorted;  // ascending
  };

  explicit BettingFunction(std::variant<Finite, GaussMean, GaussVar, Empirical> impl)
      : impl_(std::move(impl)) {}

  std::variant<Finite, GaussMean, GaussVar, Empirical> impl_;
};

/// f(p) = l_k with tail(k+1) <= p <= tail(k), ties resolved to the larger level.
BettingFunction cao_finite(FiniteLikelihoodTable table);

/// Left-continuous inverse of the empirical survival function of samples of
/// L drawn under Q0. Throws InputError when empty.
BettingFunction cao_from_samples(std::vector<double> likelihood_samples);

}  // namespace ccd
