#include "ccd/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccd/error.hpp"

namespace ccd {

double ctm_step(double log_s, const BettingFunction& f, double p) {
  const double log_f = f.log_value(p);
  if (!(log_f > -std::numeric_limits<double>::infinity())) {
    throw ProcessDiedError("ctm_step: betting function " + std::string(f.name()) + " is zero at p = " +
                           std::to_string(p));
  }
  return log_s + log_f;
}

double lrm_step(double log_s, const PrePostPair& pair, double z) {
  const bool f0_zero = !(pair.log_density0(z) > -std::numeric_limits<double>::infinity());
  const bool f1_zero = !(pair.log_density1(z) > -std::numeric_limits<double>::infinity());
  if (f0_zero || f1_zero) {
    std::string which = f0_zero && f1_zero ? "f0 and f1 vanish" : (f0_zero ? "f0 vanishes" : "f1 vanishes");
    throw DomainError("lrm_step: " + which + " at z = " + std::to_string(z));
  }
  return log_s + log_likelihood_ratio(pair, z);
}

double CepState::step(double l) {
  if (!(std::isfinite(l) && l > 0.0)) throw InputError("cep_step: likelihood ratio must be positive and finite");
  // Neumaier summation.
  const double t = sum_ + l;
  if (std::abs(sum_) >= std::abs(l)) {
    compensation_ += (sum_ - t) + l;
  } else {
    compensation_ += (l - t) + sum_;
  }
  sum_ = t;
  ++n_;
  const double mean = sum_l() / static_cast<double>(n_);
  const double e = l / mean;
  log_product_ += std::log(l) - std::log(mean);
  return e;
}

double ConformalTestMartingale::step(double score, double tau) {
  last_p_ = transducer_.step(score, tau);
  log_value_ = ctm_step(log_value_, betting_, last_p_);
  return log_value_;
}

std::vector<double> log_cusum_statistic(std::span<const double> log_path) {
  if (log_path.empty()) throw InputError("cusum_statistic: empty path");
  std::vector<double> out(log_path.size());
  out[0] = 0.0;
  double running_min = log_path[0];
  for (std::size_t n = 1; n < log_path.size(); ++n) {
    out[n] = log_path[n] - running_min;
    running_min = std::min(running_min, log_path[n]);
  }
  return out;
}

std::vector<double> cusum_statistic(std::span<const double> log_path) {
  auto out = log_cusum_statistic(log_path);
  for (auto& v : out) v = std::exp(v);
  return out;
}

CusumDetector::CusumDetector(double c) : c_(c), log_c_(std::log(c)) {
  if (!(std::isfinite(c) && c > 1.0)) throw DomainError("CusumDetector: threshold c must exceed 1");
}

bool CusumDetector::step(double log_s_n, std::size_t n) {
  if (n <= last_n_) throw InputError("CusumDetector: steps must be fed with strictly increasing n >= 1");
  last_n_ = n;
  last_stat_ = log_s_n - log_min_;
  if (last_stat_ >= log_c_) {
    alarms_.push_back(n);
    log_min_ = log_s_n;
    return true;
  }
  log_min_ = std::min(log_min_, log_s_n);
  return false;
}

std::vector<std::size_t> cusum_alarms(std::span<const double> log_path, double c) {
  CusumDetector det(c);
  if (!log_path.empty() && log_path[0] != 0.0) throw InputError("cusum_alarms: path must start at log S_0 = 0");
  for (std::size_t n = 1; n < log_path.size(); ++n) det.step(log_path[n], n);
  return det.alarms();
}

ProcessPath run_processes(const PrePostPair& pair, const BettingFunction& f, std::span<const double> observations,
                          std::span<const double> taus) {
  if (observations.size() != taus.size()) throw InputError("run_processes: need one tau per observation");
  const std::size_t len = observations.size() + 1;
  ProcessPath path;
  path.log_lrm.reserve(len);
  path.log_ctm.reserve(len);
  path.log_cep.reserve(len);
  path.log_lrm.push_back(0.0);
  path.log_ctm.push_back(0.0);
  path.log_cep.push_back(0.0);

  ConformalTestMartingale ctm(f);
  CepState cep;
  double log_lrm = 0.0;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const double z = observations[i];
    const double log_l = log_likelihood_ratio(pair, z);
    log_lrm = lrm_step(log_lrm, pair, z);
    path.log_lrm.push_back(log_lrm);
    path.log_ctm.push_back(ctm.step(log_l, taus[i]));
    cep.step(std::exp(log_l));
    path.log_cep.push_back(cep.log_product());
  }
  return path;
}

}  // namespace ccd
