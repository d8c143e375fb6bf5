#pragma once

// Seeded Monte-Carlo experiments over the conformal CUSUM machinery.
//
// Every run r of an experiment draws its observations from
// CounterRng(base_seed, r, observations) and its tie-breaking draws from
// CounterRng(base_seed, r, tau). Runs are independent tasks; aggregates are
// reduced in run order, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ccd/models.hpp"
#include "ccd/processes.hpp"

namespace ccd::sim {

struct ExperimentConfig {
  PrePostPair pair = PrePostPair::bernoulli(0.5, 0.6);
  std::size_t n0 = 1000;
  std::size_t n1 = 1000;
  std::optional<double> threshold;
  std::uint64_t base_seed = 42;
  std::size_t sims = 1;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;

  /// Throws InputError if sims == 0 or a threshold is set but not > 1.
  /// An empty stream (n0 = n1 = 0) is accepted and yields single-entry paths.
  void validate() const;
};

unsigned resolve_threads(unsigned requested) noexcept;

/// n0 draws from Q0 followed by n1 draws from Q1.
std::vector<double> generate_stream(const ExperimentConfig& config, std::uint64_t run_index);

/// `count` uniform tie-breaking draws for a run.
std::vector<double> generate_taus(std::uint64_t base_seed, std::uint64_t run_index, std::size_t count);

ProcessPath run_paths(const ExperimentConfig& config, std::uint64_t run_index);

/// Natural-log final values of each process, one entry per run.
struct FinalValues {
  std::vector<double> lrm;
  std::vector<double> ctm;
  std::vector<double> cep;
};

FinalValues collect_finals(const ExperimentConfig& config);

struct ProcessQuantiles {
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

inline constexpr double kQuantileLevels[] = {0.05, 0.25, 0.50, 0.75, 0.95};

/// Quantiles of log10 final values.
struct QuantileSummary {
  ProcessQuantiles lrm;
  ProcessQuantiles ctm;
  ProcessQuantiles cep;
  std::size_t sims = 0;
};

ProcessQuantiles log10_quantiles(std::span<const double> natural_log_values);
QuantileSummary summarize(const FinalValues& finals);

/// Pre-change-only study (requires n1 == 0).
QuantileSummary validity_study(const ExperimentConfig& config);

struct AlarmStats {
  std::size_t alarms = 0;
  std::size_t steps = 0;
  double rate = 0.0;         // alarms / steps
  double rate_stderr = 0.0;  // across runs
  double mean_gap = 0.0;     // mean of tau_k - tau_{k-1}, tau_0 = 0; NaN if no alarms
  std::size_t gaps = 0;
};

/// Aggregates per-run alarm lists, each run having `steps_per_run` steps.
AlarmStats tally_alarms(std::span<const std::vector<std::size_t>> alarm_lists, std::size_t steps_per_run);

struct FalseAlarmReport {
  double threshold = 0.0;
  std::size_t n0 = 0;
  std::size_t sims = 0;
  AlarmStats lrm;
  AlarmStats ctm;
  AlarmStats cep;
};

/// CUSUM false alarms on pre-change-only streams (requires n1 == 0 and a
/// threshold).
FalseAlarmReport false_alarm_study(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Efficiency bound for the Bernoulli case.

struct Theorem1Params {
  double theta0 = 0.5;
  double theta1 = 0.6;
  std::size_t n0 = 1000;
  std::size_t n1 = 30;
  double epsilon = 0.1;
  std::size_t sims = 2000;
  std::uint64_t base_seed = 42;
  unsigned threads = 0;
};

/// |ln(theta1 (1-theta0) / (theta0 (1-theta1)))|
double theorem1_distance(double theta0, double theta1);
/// Hoeffding radius sqrt(ln(4/eps) / (2 n0)).
double hoeffding_delta(double epsilon, std::size_t n0);
/// n1 delta + n1 (n1+1) / (2 n0): bound on the expected anomalous-step count.
double anomalous_bound(double delta, std::size_t n0, std::size_t n1);
/// B (ln(2/eps) + 5 n1 delta + (5/2) n1 (n1+1) / n0).
double theorem1_rhs(double theta0, double theta1, std::size_t n0, std::size_t n1, double epsilon);

struct Theorem1Run {
  double max_log_ratio = 0.0;  // max over n <= n1 of ln(LRM/CTM) after the changepoint
  std::size_t anomalous_count = 0;
  bool violated = false;
  bool pre_change_typical = false;  // |K0/n0 - theta0| < delta
};

struct Theorem1Report {
  double theta0 = 0.0;
  double theta1 = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double epsilon = 0.0;
  std::size_t sims = 0;

  double B = 0.0;
  double delta = 0.0;
  double c_const = 0.0;      // ln(2/eps) / anomalous_bound
  double chernoff_Delta = 0.0;  // c + 4
  double bound_rhs = 0.0;
  double anomalous_bound = 0.0;

  std::vector<Theorem1Run> runs;
  double violation_frequency = 0.0;
  double violation_stderr = 0.0;
  double max_log_ratio = 0.0;  // over all runs
  double mean_max_log_ratio = 0.0;
  double mean_anomalous = 0.0;
  double anomalous_stderr = 0.0;
  std::size_t typical_runs = 0;
  double typical_mean_anomalous = 0.0;
  double typical_anomalous_stderr = 0.0;
};

/// Throws DomainError unless theta0, theta1 in (0,1), epsilon in (0,1) and
/// n0 >= 1. theta0 == theta1 is allowed (B = 0).
Theorem1Report theorem1_check(const Theorem1Params& params);

// ---------------------------------------------------------------------------
// Martingale multiplicative Chernoff bound.

/// (e^delta / (1+delta)^(1+delta))^mu
double chernoff_bound_exact(double delta, double mu);
/// exp(-delta^2 mu / (2 + delta))
double chernoff_bound_simple(double delta, double mu);
/// E exp(s xi - theta (e^s - 1)) for xi ~ Bernoulli(theta).
double supermartingale_step_mean(double theta, double s);

struct ChernoffParams {
  std::vector<double> thetas;
  double delta = 1.0;
  std::optional<double> mu;  // defaults to sum of thetas
  std::size_t sims = 100000;
  std::uint64_t base_seed = 42;
  unsigned threads = 0;
};

struct ChernoffReport {
  std::size_t n = 0;
  std::size_t sims = 0;
  double mu = 0.0;
  double delta = 0.0;
  double s = 0.0;  // ln(1 + delta)
  double tail_threshold = 0.0;
  double tail_estimate = 0.0;
  double tail_stderr = 0.0;
  double bound_exact = 0.0;
  double bound_simple = 0.0;
  bool bounds_ordered = false;     // bound_exact <= bound_simple
  bool tail_within_bound = false;  // estimate <= min bound + 3 stderr
  std::vector<double> supermartingale_mean;    // index n-1 holds E S_n
  std::vector<double> supermartingale_stderr;
  bool supermartingale_ok = false;  // every mean <= 1 + 3 stderr
};

/// Throws DomainError unless thetas are in [0,1], delta > 0 and mu >= sum.
ChernoffReport chernoff_check(const ChernoffParams& params);

}  // namespace ccd::sim
