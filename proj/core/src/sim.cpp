#include "ccd/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "ccd/error.hpp"
#include "ccd/rng.hpp"
#include "ccd/stats.hpp"

namespace ccd::sim {
namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
// processed exactly once; fn must only write to state owned by index i.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double draw(const PrePostPair& pair, bool post_change, CounterRng& rng) {
  switch (pair.kind()) {
    case PrePostPair::Kind::bernoulli:
      return rng.bernoulli(post_change ? pair.theta1() : pair.theta0());
    case PrePostPair::Kind::gauss_mean:
      return post_change ? pair.mu() + rng.normal() : rng.normal();
    case PrePostPair::Kind::gauss_var:
      return post_change ? pair.sigma() * rng.normal() : rng.normal();
  }
  return 0.0;
}

ProcessPath run_paths_with(const ExperimentConfig& config, const BettingFunction& f, std::uint64_t run_index) {
  const auto z = generate_stream(config, run_index);
  const auto taus = generate_taus(config.base_seed, run_index, z.size());
  return run_processes(config.pair, f, z, taus);
}

void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + " must lie in (0,1)");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (sims == 0) throw InputError("sims must be at least 1");
  if (threshold && !(std::isfinite(*threshold) && *threshold > 1.0)) {
    throw InputError("threshold c must exceed 1");
  }
}

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<double> generate_stream(const ExperimentConfig& config, std::uint64_t run_index) {
  CounterRng rng(config.base_seed, run_index, StreamRole::observations);
  std::vector<double> z;
  z.reserve(config.n0 + config.n1);
  for (std::size_t i = 0; i < config.n0; ++i) z.push_back(draw(config.pair, false, rng));
  for (std::size_t i = 0; i < config.n1; ++i) z.push_back(draw(config.pair, true, rng));
  return z;
}

std::vector<double> generate_taus(std::uint64_t base_seed, std::uint64_t run_index, std::size_t count) {
  CounterRng rng(base_seed, run_index, StreamRole::tau);
  std::vector<double> taus(count);
  for (auto& t : taus) t = rng.uniform();
  return taus;
}

ProcessPath run_paths(const ExperimentConfig& config, std::uint64_t run_index) {
  config.validate();
  return run_paths_with(config, BettingFunction::cao(config.pair), run_index);
}

FinalValues collect_finals(const ExperimentConfig& config) {
  config.validate();
  const auto f = BettingFunction::cao(config.pair);
  FinalValues out;
  out.lrm.resize(config.sims);
  out.ctm.resize(config.sims);
  out.cep.resize(config.sims);
  parallel_for(config.sims, config.threads, [&](std::size_t r) {
    const auto path = run_paths_with(config, f, r);
    out.lrm[r] = path.log_lrm.back();
    out.ctm[r] = path.log_ctm.back();
    out.cep[r] = path.log_cep.back();
  });
  return out;
}

ProcessQuantiles log10_quantiles(std::span<const double> natural_log_values) {
  std::vector<double> v(natural_log_values.begin(), natural_log_values.end());
  for (auto& x : v) x /= std::numbers::ln10;
  std::sort(v.begin(), v.end());
  return {stats::quantile_sorted(v, 0.05), stats::quantile_sorted(v, 0.25), stats::quantile_sorted(v, 0.50),
          stats::quantile_sorted(v, 0.75), stats::quantile_sorted(v, 0.95)};
}

QuantileSummary summarize(const FinalValues& finals) {
  return {log10_quantiles(finals.lrm), log10_quantiles(finals.ctm), log10_quantiles(finals.cep), finals.lrm.size()};
}

QuantileSummary validity_study(const ExperimentConfig& config) {
  if (config.n1 != 0) throw InputError("validity_study: n1 must be 0 (pre-change data only)");
  return summarize(collect_finals(config));
}

AlarmStats tally_alarms(std::span<const std::vector<std::size_t>> alarm_lists, std::size_t steps_per_run) {
  AlarmStats s;
  std::vector<double> rates;
  rates.reserve(alarm_lists.size());
  double gap_sum = 0.0;
  for (const auto& alarms : alarm_lists) {
    s.alarms += alarms.size();
    s.steps += steps_per_run;
    rates.push_back(steps_per_run ? static_cast<double>(alarms.size()) / static_cast<double>(steps_per_run) : 0.0);
    std::size_t prev = 0;
    for (auto t : alarms) {
      gap_sum += static_cast<double>(t - prev);
      prev = t;
      ++s.gaps;
    }
  }
  s.rate = s.steps ? static_cast<double>(s.alarms) / static_cast<double>(s.steps) : 0.0;
  s.rate_stderr = stats::standard_error(rates);
  s.mean_gap = s.gaps ? gap_sum / static_cast<double>(s.gaps) : std::numeric_limits<double>::quiet_NaN();
  return s;
}

FalseAlarmReport false_alarm_study(const ExperimentConfig& config) {
  config.validate();
  if (config.n1 != 0) throw InputError("false_alarm_study: n1 must be 0 (pre-change data only)");
  if (!config.threshold) throw InputError("false_alarm_study: threshold c is required");
  const double c = *config.threshold;
  const auto f = BettingFunction::cao(config.pair);

  std::vector<std::vector<std::size_t>> lrm(config.sims), ctm(config.sims), cep(config.sims);
  parallel_for(config.sims, config.threads, [&](std::size_t r) {
    const auto path = run_paths_with(config, f, r);
    lrm[r] = cusum_alarms(path.log_lrm, c);
    ctm[r] = cusum_alarms(path.log_ctm, c);
    cep[r] = cusum_alarms(path.log_cep, c);
  });

  FalseAlarmReport report;
  report.threshold = c;
  report.n0 = config.n0;
  report.sims = config.sims;
  report.lrm = tally_alarms(lrm, config.n0);
  report.ctm = tally_alarms(ctm, config.n0);
  report.cep = tally_alarms(cep, config.n0);
  return report;
}

// ---------------------------------------------------------------------------

double theorem1_distance(double theta0, double theta1) {
  require_open_unit(theta0, "theta0");
  require_open_unit(theta1, "theta1");
  return std::abs(std::log(theta1 * (1.0 - theta0) / (theta0 * (1.0 - theta1))));
}

double hoeffding_delta(double epsilon, std::size_t n0) {
  require_open_unit(epsilon, "epsilon");
  if (n0 == 0) throw DomainError("n0 must be at least 1");
  return std::sqrt(std::log(4.0 / epsilon) / (2.0 * static_cast<double>(n0)));
}

double anomalous_bound(double delta, std::size_t n0, std::size_t n1) {
  const double a = static_cast<double>(n1);
  return a * delta + a * (a + 1.0) / (2.0 * static_cast<double>(n0));
}

double theorem1_rhs(double theta0, double theta1, std::size_t n0, std::size_t n1, double epsilon) {
  const double b = theorem1_distance(theta0, theta1);
  const double delta = hoeffding_delta(epsilon, n0);
  const double a = static_cast<double>(n1);
  return b * (std::log(2.0 / epsilon) + 5.0 * a * delta + 2.5 * a * (a + 1.0) / static_cast<double>(n0));
}

Theorem1Report theorem1_check(const Theorem1Params& params) {
  const double t0 = params.theta0;
  const double t1 = params.theta1;
  Theorem1Report rep;
  rep.theta0 = t0;
  rep.theta1 = t1;
  rep.n0 = params.n0;
  rep.n1 = params.n1;
  rep.epsilon = params.epsilon;
  rep.sims = params.sims;
  rep.B = theorem1_distance(t0, t1);
  rep.delta = hoeffding_delta(params.epsilon, params.n0);
  rep.anomalous_bound = anomalous_bound(rep.delta, params.n0, params.n1);
  rep.c_const = rep.anomalous_bound > 0.0 ? std::log(2.0 / params.epsilon) / rep.anomalous_bound
                                          : std::numeric_limits<double>::infinity();
  rep.chernoff_Delta = rep.c_const + 4.0;
  rep.bound_rhs = theorem1_rhs(t0, t1, params.n0, params.n1, params.epsilon);
  if (params.sims == 0) throw InputError("theorem1_check: sims must be at least 1");

  // The outcome with the larger likelihood ratio ("high" outcome) and its
  // pre-change probability. For theta1 > theta0 this is z = 1 with mass
  // theta0, and the CAO betting function is theta1/theta0 on p <= theta0.
  const double high_z = t1 >= t0 ? 1.0 : 0.0;
  const double high_mass = t1 >= t0 ? t0 : 1.0 - t0;
  const double log_l1 = std::log(t1 / t0);
  const double log_l0 = std::log((1.0 - t1) / (1.0 - t0));
  const auto f = cao_finite(FiniteLikelihoodTable({(1.0 - t1) / (1.0 - t0), t1 / t0}, {1.0 - t0, t0}));

  rep.runs.resize(params.sims);
  parallel_for(params.sims, params.threads, [&](std::size_t r) {
    CounterRng obs(params.base_seed, r, StreamRole::observations);
    CounterRng tau(params.base_seed, r, StreamRole::tau);
    TransducerState transducer;
    std::size_t k0 = 0;
    for (std::size_t i = 0; i < params.n0; ++i) {
      const double z = obs.bernoulli(t0);
      if (z == 1.0) ++k0;
      transducer.step(z == 1.0 ? log_l1 : log_l0, tau.uniform());
    }
    Theorem1Run run;
    run.pre_change_typical =
        std::abs(static_cast<double>(k0) / static_cast<double>(params.n0) - t0) < rep.delta;
    double log_ratio = 0.0;
    run.max_log_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= params.n1; ++n) {
      const double z = obs.bernoulli(t1);
      const double log_l = z == 1.0 ? log_l1 : log_l0;
      const double p = transducer.step(log_l, tau.uniform());
      log_ratio += log_l - f.log_value(p);
      run.max_log_ratio = std::max(run.max_log_ratio, log_ratio);
      if ((p <= high_mass) != (z == high_z)) ++run.anomalous_count;
    }
    if (params.n1 == 0) run.max_log_ratio = 0.0;
    run.violated = run.max_log_ratio > rep.bound_rhs;
    rep.runs[r] = run;
  });

  std::vector<double> violated, anomalous, typical;
  rep.max_log_ratio = -std::numeric_limits<double>::infinity();
  double sum_max = 0.0;
  for (const auto& run : rep.runs) {
    violated.push_back(run.violated ? 1.0 : 0.0);
    anomalous.push_back(static_cast<double>(run.anomalous_count));
    if (run.pre_change_typical) typical.push_back(static_cast<double>(run.anomalous_count));
    rep.max_log_ratio = std::max(rep.max_log_ratio, run.max_log_ratio);
    sum_max += run.max_log_ratio;
  }
  rep.violation_frequency = stats::mean(violated);
  rep.violation_stderr = stats::standard_error(violated);
  rep.mean_max_log_ratio = sum_max / static_cast<double>(rep.runs.size());
  rep.mean_anomalous = stats::mean(anomalous);
  rep.anomalous_stderr = stats::standard_error(anomalous);
  rep.typical_runs = typical.size();
  rep.typical_mean_anomalous = stats::mean(typical);
  rep.typical_anomalous_stderr = stats::standard_error(typical);
  return rep;
}

// ---------------------------------------------------------------------------

double chernoff_bound_exact(double delta, double mu) {
  return std::exp(mu * (delta - (1.0 + delta) * std::log1p(delta)));
}

double chernoff_bound_simple(double delta, double mu) { return std::exp(-delta * delta * mu / (2.0 + delta)); }

double supermartingale_step_mean(double theta, double s) {
  const double es = std::exp(s);
  return (theta * es + 1.0 - theta) * std::exp(-theta * (es - 1.0));
}

ChernoffReport chernoff_check(const ChernoffParams& params) {
  const auto& thetas = params.thetas;
  for (double t : thetas) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("chernoff_check: every theta must lie in [0,1]");
  }
  if (!(params.delta > 0.0 && std::isfinite(params.delta))) throw DomainError("chernoff_check: delta must be > 0");
  if (params.sims == 0) throw InputError("chernoff_check: sims must be at least 1");
  const double theta_sum = std::accumulate(thetas.begin(), thetas.end(), 0.0);
  const double mu = params.mu.value_or(theta_sum);
  if (!(mu >= theta_sum * (1.0 - 1e-12))) throw DomainError("chernoff_check: mu must be at least the sum of thetas");

  ChernoffReport rep;
  rep.n = thetas.size();
  rep.sims = params.sims;
  rep.mu = mu;
  rep.delta = params.delta;
  rep.s = std::log1p(params.delta);
  rep.tail_threshold = (1.0 + params.delta) * mu;
  rep.bound_exact = chernoff_bound_exact(params.delta, mu);
  rep.bound_simple = chernoff_bound_simple(params.delta, mu);
  rep.bounds_ordered = rep.bound_exact <= rep.bound_simple;

  // Fixed-size blocks keep the floating-point reduction order independent of
  // the thread count.
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (params.sims + kBlock - 1) / kBlock;
  const std::size_t n = thetas.size();
  struct Partial {
    std::size_t hits = 0;
    std::vector<double> sum;
    std::vector<double> sum_sq;
  };
  std::vector<Partial> partials(blocks);
  const double growth = std::expm1(rep.s);  // e^s - 1

  parallel_for(blocks, params.threads, [&](std::size_t b) {
    Partial part;
    part.sum.assign(n, 0.0);
    part.sum_sq.assign(n, 0.0);
    const std::size_t end = std::min(params.sims, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) {
      CounterRng rng(params.base_seed, r, StreamRole::chernoff);
      double hits = 0.0;
      double log_s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = rng.bernoulli(thetas[i]);
        hits += xi;
        log_s += rep.s * xi - thetas[i] * growth;
        const double s_n = std::exp(log_s);
        part.sum[i] += s_n;
        part.sum_sq[i] += s_n * s_n;
      }
      if (hits >= rep.tail_threshold) ++part.hits;
    }
    partials[b] = std::move(part);
  });

  std::size_t hits = 0;
  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  for (const auto& part : partials) {
    hits += part.hits;
    for (std::size_t i = 0; i < n; ++i) {
      sum[i] += part.sum[i];
      sum_sq[i] += part.sum_sq[i];
    }
  }
  const double sims = static_cast<double>(params.sims);
  rep.tail_estimate = static_cast<double>(hits) / sims;
  rep.tail_stderr = std::sqrt(rep.tail_estimate * (1.0 - rep.tail_estimate) / sims);
  rep.tail_within_bound =
      rep.tail_estimate <= std::min(rep.bound_exact, rep.bound_simple) + 3.0 * rep.tail_stderr;

  rep.supermartingale_ok = true;
  rep.supermartingale_mean.resize(n);
  rep.supermartingale_stderr.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sum[i] / sims;
    const double var = params.sims > 1 ? std::max(0.0, (sum_sq[i] - sims * m * m) / (sims - 1.0)) : 0.0;
    rep.supermartingale_mean[i] = m;
    rep.supermartingale_stderr[i] = std::sqrt(var / sims);
    if (m > 1.0 + 3.0 * rep.supermartingale_stderr[i]) rep.supermartingale_ok = false;
  }
  return rep;
}

}  // namespace ccd::sim
