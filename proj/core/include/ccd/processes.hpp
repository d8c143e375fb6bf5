#pragma once

// Step-wise state machines for the three tracked processes and the CUSUM
// detector. All martingale values live in the natural-log domain.
//
//   LRM  likelihood ratio martingale   S_n = L(z_1) ... L(z_n)
//   CTM  conformal test martingale     S_n = f(p_1) ... f(p_n)
//   CeP  conformal e-pseudomartingale  S_n = E_1 ... E_n,  E_n = L_n / mean(L_1..L_n)

#include <cstddef>
#include <span>
#include <vector>

#include "ccd/models.hpp"
#include "ccd/transducer.hpp"

namespace ccd {

/// log_s + ln f(p). Throws ProcessDiedError if f(p) == 0.
double ctm_step(double log_s, const BettingFunction& f, double p);

/// log_s + ln L(z). Throws DomainError naming the vanishing density.
double lrm_step(double log_s, const PrePostPair& pair, double z);

class CepState {
 public:
  /// Feeds L_n > 0 and returns E_n. Throws InputError otherwise.
  double step(double l);

  /// L_1 + ... + L_n with Neumaier compensation.
  double sum_l() const noexcept { return sum_ + compensation_; }
  std::size_t n() const noexcept { return n_; }
  double log_product() const noexcept { return log_product_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::size_t n_ = 0;
  double log_product_ = 0.0;
};

/// Transducer plus betting function: a conformal test martingale in log form.
class ConformalTestMartingale {
 public:
  explicit ConformalTestMartingale(BettingFunction f) : betting_(std::move(f)) {}

  /// Feeds one nonconformity score and its tie-breaking draw; returns the
  /// new log value.
  double step(double score, double tau);

  double log_value() const noexcept { return log_value_; }
  double last_p() const noexcept { return last_p_; }
  const BettingFunction& betting() const noexcept { return betting_; }
  const TransducerState& transducer() const noexcept { return transducer_; }

 private:
  TransducerState transducer_;
  BettingFunction betting_;
  double log_value_ = 0.0;
  double last_p_ = 1.0;
};

/// Log CUSUM statistic: entry 0 is 0, entry n is log S_n - min_{i<n} log S_i.
/// Throws InputError on an empty path.
std::vector<double> log_cusum_statistic(std::span<const double> log_path);

/// Same, exponentiated.
std::vector<double> cusum_statistic(std::span<const double> log_path);

/// CUSUM alarm rule with threshold c > 1. The window minimum restarts at the
/// value of the alarm step.
class CusumDetector {
 public:
  /// Throws DomainError unless c > 1 and finite.
  explicit CusumDetector(double c);

  /// Feeds log S_n for step n (n = 1, 2, ... strictly increasing). Returns
  /// true iff an alarm is raised at n. Throws InputError on out-of-order n.
  bool step(double log_s_n, std::size_t n);

  double threshold() const noexcept { return c_; }
  double log_threshold() const noexcept { return log_c_; }
  double log_min_since_alarm() const noexcept { return log_min_; }
  /// log of the statistic reported at the last step.
  double last_log_statistic() const noexcept { return last_stat_; }
  const std::vector<std::size_t>& alarms() const noexcept { return alarms_; }

 private:
  double c_;
  double log_c_;
  double log_min_ = 0.0;
  double last_stat_ = 0.0;
  std::size_t last_n_ = 0;
  std::vector<std::size_t> alarms_;
};

/// Aligned natural-log values of the three processes; entry 0 is log 1 = 0.
struct ProcessPath {
  std::vector<double> log_lrm;
  std::vector<double> log_ctm;
  std::vector<double> log_cep;

  std::size_t size() const noexcept { return log_lrm.size(); }
};

/// Runs LRM, CTM and CeP over `observations`, using ln L(z) as the
/// nonconformity score and taus[i] as the tie-breaking draw for step i+1.
/// Throws InputError if the spans differ in length.
ProcessPath run_processes(const PrePostPair& pair, const BettingFunction& f, std::span<const double> observations,
                          std::span<const double> taus);

/// Alarm indices of the CUSUM rule run over an entire log path (entry 0 is
/// log S_0 = 0).
std::vector<std::size_t> cusum_alarms(std::span<const double> log_path, double c);

}  // namespace ccd
