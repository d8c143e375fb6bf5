#include "ccd/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ccd/error.hpp"
#include "ccd/normal.hpp"

namespace ccd {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2*pi)/2

double clamp_p(double p) { return std::clamp(p, kBettingClamp, 1.0 - kBettingClamp); }

void require_unit_interval(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + ": p must lie in [0,1], got " + std::to_string(p));
  }
}

bool is_binary(double z) { return z == 0.0 || z == 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// FiniteLikelihoodTable

FiniteLikelihoodTable::FiniteLikelihoodTable(std::vector<double> levels, std::vector<double> masses) {
  if (levels.empty() || levels.size() != masses.size()) {
    throw DomainError("FiniteLikelihoodTable: levels and masses must be non-empty and equally sized");
  }
  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return levels[i] < levels[j]; });

  double total = 0.0;
  for (auto i : order) {
    const double l = levels[i];
    const double q = masses[i];
    if (!(std::isfinite(l) && l > 0.0)) throw DomainError("FiniteLikelihoodTable: levels must be positive");
    if (!(std::isfinite(q) && q > 0.0)) throw DomainError("FiniteLikelihoodTable: masses must be positive");
    total += q;
    if (!levels_.empty() && levels_.back() == l) {
      masses_.back() += q;
    } else {
      levels_.push_back(l);
      masses_.push_back(q);
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("FiniteLikelihoodTable: masses must sum to 1, got " + std::to_string(total));
  }

  tails_.assign(levels_.size() + 1, 0.0);
  for (std::size_t k = levels_.size(); k-- > 0;) tails_[k] = tails_[k + 1] + masses_[k];
  tails_[0] = 1.0;
}

// ---------------------------------------------------------------------------
// PrePostPair

PrePostPair PrePostPair::bernoulli(double theta0, double theta1) {
  const auto open_unit = [](double t) { return t > 0.0 && t < 1.0; };
  if (!open_unit(theta0) || !open_unit(theta1)) {
    throw DomainError("bernoulli pair: theta0 and theta1 must lie in (0,1)");
  }
  if (theta0 == theta1) throw DomainError("bernoulli pair: theta0 must differ from theta1");
  return {Kind::bernoulli, theta0, theta1};
}

PrePostPair PrePostPair::gauss_mean(double mu) {
  if (!std::isfinite(mu) || mu == 0.0) throw DomainError("gauss_mean pair: mu must be finite and non-zero");
  return {Kind::gauss_mean, mu, 0.0};
}

PrePostPair PrePostPair::gauss_var(double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0) || sigma == 1.0) {
    throw DomainError("gauss_var pair: sigma must be positive and different from 1");
  }
  return {Kind::gauss_var, sigma, 0.0};
}

std::string_view PrePostPair::name() const noexcept {
  switch (kind_) {
    case Kind::bernoulli: return "bernoulli";
    case Kind::gauss_mean: return "gauss-mean";
    case Kind::gauss_var: return "gauss-var";
  }
  return "unknown";
}

double PrePostPair::log_density0(double z) const noexcept {
  if (kind_ == Kind::bernoulli) {
    if (!is_binary(z)) return -std::numeric_limits<double>::infinity();
    return z == 1.0 ? std::log(a_) : std::log1p(-a_);
  }
  return -0.5 * z * z - kHalfLog2Pi;
}

double PrePostPair::log_density1(double z) const noexcept {
  switch (kind_) {
    case Kind::bernoulli:
      if (!is_binary(z)) return -std::numeric_limits<double>::infinity();
      return z == 1.0 ? std::log(b_) : std::log1p(-b_);
    case Kind::gauss_mean: {
      const double d = z - a_;
      return -0.5 * d * d - kHalfLog2Pi;
    }
    case Kind::gauss_var: {
      const double u = z / a_;
      return -0.5 * u * u - kHalfLog2Pi - std::log(a_);
    }
  }
  return -std::numeric_limits<double>::infinity();
}

double PrePostPair::density0(double z) const noexcept { return std::exp(log_density0(z)); }
double PrePostPair::density1(double z) const noexcept { return std::exp(log_density1(z)); }

std::optional<FiniteLikelihoodTable> PrePostPair::finite_table() const {
  if (kind_ != Kind::bernoulli) return std::nullopt;
  return FiniteLikelihoodTable({(1.0 - b_) / (1.0 - a_), b_ / a_}, {1.0 - a_, a_});
}

double PrePostPair::kl_pre_post() const noexcept {
  switch (kind_) {
    case Kind::bernoulli:
      return a_ * std::log(a_ / b_) + (1.0 - a_) * std::log((1.0 - a_) / (1.0 - b_));
    case Kind::gauss_mean:
      return 0.5 * a_ * a_;
    case Kind::gauss_var: {
      const double s2 = a_ * a_;
      return std::log(a_) + 0.5 / s2 - 0.5;
    }
  }
  return 0.0;
}

double PrePostPair::kl_post_pre() const noexcept {
  switch (kind_) {
    case Kind::bernoulli:
      return b_ * std::log(b_ / a_) + (1.0 - b_) * std::log((1.0 - b_) / (1.0 - a_));
    case Kind::gauss_mean:
      return 0.5 * a_ * a_;
    case Kind::gauss_var: {
      const double s2 = a_ * a_;
      return -std::log(a_) + 0.5 * s2 - 0.5;
    }
  }
  return 0.0;
}

double log_likelihood_ratio(const PrePostPair& pair, double z) {
  if (!std::isfinite(z)) throw DomainError("log_likelihood_ratio: observation is not finite");
  switch (pair.kind()) {
    case PrePostPair::Kind::bernoulli:
      if (!is_binary(z)) {
        throw DomainError("log_likelihood_ratio: f0(z) = 0 and f1(z) = 0 at z = " + std::to_string(z) +
                          " (Bernoulli support is {0,1})");
      }
      return z == 1.0 ? std::log(pair.theta1() / pair.theta0())
                      : std::log((1.0 - pair.theta1()) / (1.0 - pair.theta0()));
    case PrePostPair::Kind::gauss_mean: {
      const double mu = pair.mu();
      return mu * z - 0.5 * mu * mu;
    }
    case PrePostPair::Kind::gauss_var: {
      const double s = pair.sigma();
      return -std::log(s) + 0.5 * (1.0 - 1.0 / (s * s)) * z * z;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Closed-form CAO betting functions

double log_cao_gauss_mean(double mu, double p) {
  if (mu == 0.0) throw DomainError("cao_gauss_mean: mu must be non-zero");
  require_unit_interval(p, "cao_gauss_mean");
  // Phi^{-1}(1-p) == -Phi^{-1}(p) exactly for the in-repo quantile.
  const double x = std_normal_quantile(clamp_p(p));
  const double shift = mu > 0.0 ? -x : x;
  return mu * shift - 0.5 * mu * mu;
}

double cao_gauss_mean(double mu, double p) { return std::exp(log_cao_gauss_mean(mu, p)); }

double log_cao_gauss_var(double sigma, double p) {
  if (!(sigma > 0.0) || sigma == 1.0) throw DomainError("cao_gauss_var: sigma must be positive and != 1");
  require_unit_interval(p, "cao_gauss_var");
  const double pc = clamp_p(p);
  const double x = std_normal_quantile(sigma > 1.0 ? pc / 2.0 : (1.0 - pc) / 2.0);
  return -std::log(sigma) + 0.5 * (1.0 - 1.0 / (sigma * sigma)) * x * x;
}

double cao_gauss_var(double sigma, double p) { return std::exp(log_cao_gauss_var(sigma, p)); }

double roc_derivative(const PrePostPair& pair, double p) {
  require_unit_interval(p, "roc_derivative");
  switch (pair.kind()) {
    case PrePostPair::Kind::bernoulli:
      return cao_finite(*pair.finite_table())(p);
    case PrePostPair::Kind::gauss_mean: {
      const double mu = pair.mu();
      const double pc = clamp_p(p);
      const double x = std_normal_quantile(mu > 0.0 ? 1.0 - pc : pc);
      return std_normal_pdf(x - mu) / std_normal_pdf(x);
    }
    case PrePostPair::Kind::gauss_var: {
      const double s = pair.sigma();
      const double pc = clamp_p(p);
      const double x = std_normal_quantile(s > 1.0 ? pc / 2.0 : (1.0 - pc) / 2.0);
      return std_normal_pdf(x / s) / (s * std_normal_pdf(x));
    }
  }
  return 0.0;
}

double roc_curve(const PrePostPair& pair, double p) {
  require_unit_interval(p, "roc_curve");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  switch (pair.kind()) {
    case PrePostPair::Kind::bernoulli: {
      // Randomized Neyman-Pearson test: reject fully on levels above l_k and
      // with the leftover type-I budget on level l_k.
      const auto table = *pair.finite_table();
      const auto levels = table.levels();
      double power = 0.0;
      for (std::size_t k = levels.size(); k-- > 0;) {
        const double upper = table.tail(k);
        const double lower = table.tail(k + 1);
        if (p <= upper) return power + (p - lower) * levels[k];
        power += table.masses()[k] * levels[k];
      }
      return 1.0;
    }
    case PrePostPair::Kind::gauss_mean: {
      const double mu = pair.mu();
      if (mu > 0.0) return 1.0 - std_normal_cdf(std_normal_quantile(1.0 - p) - mu);
      return std_normal_cdf(std_normal_quantile(p) - mu);
    }
    case PrePostPair::Kind::gauss_var: {
      const double s = pair.sigma();
      if (s > 1.0) return 2.0 * std_normal_cdf(std_normal_quantile(p / 2.0) / s);
      return 1.0 - 2.0 * std_normal_cdf(std_normal_quantile((1.0 - p) / 2.0) / s);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// BettingFunction

BettingFunction BettingFunction::finite(FiniteLikelihoodTable table) {
  return BettingFunction(Finite{std::move(table)});
}

BettingFunction BettingFunction::gauss_mean(double mu) {
  if (!std::isfinite(mu) || mu == 0.0) throw DomainError("gauss-mean betting function: mu must be non-zero");
  return BettingFunction(GaussMean{mu});
}

BettingFunction BettingFunction::gauss_var(double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0) || sigma == 1.0) {
    throw DomainError("gauss-var betting function: sigma must be positive and != 1");
  }
  return BettingFunction(GaussVar{sigma});
}

BettingFunction BettingFunction::empirical(std::vector<double> likelihood_samples) {
  if (likelihood_samples.empty()) throw InputError("cao_from_samples: no samples");
  for (double l : likelihood_samples) {
    if (!(std::isfinite(l) && l > 0.0)) throw InputError("cao_from_samples: samples must be positive and finite");
  }
  std::sort(likelihood_samples.begin(), likelihood_samples.end());
  return BettingFunction(Empirical{std::move(likelihood_samples)});
}

BettingFunction BettingFunction::cao(const PrePostPair& pair) {
  switch (pair.kind()) {
    case PrePostPair::Kind::bernoulli: return finite(*pair.finite_table());
    case PrePostPair::Kind::gauss_mean: return gauss_mean(pair.mu());
    case PrePostPair::Kind::gauss_var: return gauss_var(pair.sigma());
  }
  throw DomainError("BettingFunction::cao: unknown pair kind");
}

double BettingFunction::operator()(double p) const {
  require_unit_interval(p, "BettingFunction");
  return std::visit(
      [p](const auto& impl) -> double {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, Finite>) {
          // Largest k with tail(k) >= p.
          const auto& t = impl.table;
          std::size_t k = t.size() - 1;
          while (t.tail(k) < p) --k;
          return t.levels()[k];
        } else if constexpr (std::is_same_v<T, GaussMean>) {
          return cao_gauss_mean(impl.mu, p);
        } else if constexpr (std::is_same_v<T, GaussVar>) {
          return cao_gauss_var(impl.sigma, p);
        } else {
          // sup{t : #{x > t} >= p n} is the ceil(p n)-th largest sample.
          const auto n = impl.sorted.size();
          const double need = std::ceil(p * static_cast<double>(n));
          const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(need), 1, n);
          return impl.sorted[n - k];
        }
      },
      impl_);
}

double BettingFunction::log_value(double p) const {
  if (const auto* g = std::get_if<GaussMean>(&impl_)) return log_cao_gauss_mean(g->mu, p);
  if (const auto* g = std::get_if<GaussVar>(&impl_)) return log_cao_gauss_var(g->sigma, p);
  return std::log((*this)(p));
}

BettingFunction::Kind BettingFunction::kind() const noexcept {
  switch (impl_.index()) {
    case 0: return Kind::finite_cao;
    case 1: return Kind::gauss_mean_cao;
    case 2: return Kind::gauss_var_cao;
    default: return Kind::empirical_cao;
  }
}

std::string_view BettingFunction::name() const noexcept {
  switch (kind()) {
    case Kind::finite_cao: return "finite-CAO";
    case Kind::gauss_mean_cao: return "gauss-mean-CAO";
    case Kind::gauss_var_cao: return "gauss-var-CAO";
    case Kind::empirical_cao: return "empirical-CAO";
  }
  return "unknown";
}

BettingFunction cao_finite(FiniteLikelihoodTable table) { return BettingFunction::finite(std::move(table)); }

BettingFunction cao_from_samples(std::vector<double> likelihood_samples) {
  return BettingFunction::empirical(std::move(likelihood_samples));
}

}  // namespace ccd
