#pragma once

// Command-line front end for the conformal CUSUM library.
//
//   ccd paths          --model M <params> --n0 N --n1 N [--seed S] [--run R] [--out FILE]
//   ccd detect         --model M <params> --c C [--input FILE | --n0 N --n1 N] [--seed S] [--out FILE]
//   ccd validity       --model M <params> --n0 N [--sims K] [--seed S] [--out FILE]
//   ccd false-alarms   --model M <params> --n0 N --c C [--sims K] [--seed S] [--out FILE]
//   ccd check-theorem1 [--theta0 T] [--theta1 T] [--n0 N] [--n1 N] [--eps E] [--sims K] [--seed S]
//   ccd check-chernoff (--theta T --n N | --thetas T1,T2,...) [--delta D] [--mu M] [--sims K] [--seed S]
//
// Model parameters: bernoulli (--theta0, --theta1), gauss-mean (--mu),
// gauss-var (--sigma). Every subcommand also accepts --config FILE.json whose
// keys are flag names without the leading dashes; command-line flags win.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccd/processes.hpp"
#include "ccd/sim.hpp"

namespace ccd::cli {

enum class Command { paths, detect, validity, false_alarms, check_theorem1, check_chernoff };

/// Bad command line. exit_code is 2, or 0 when help was requested (the
/// message then holds the help text).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& message, int exit_code = 2)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Output could not be written or input could not be read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliCommand {
  Command command = Command::paths;
  sim::ExperimentConfig experiment;
  std::uint64_t run_index = 0;
  std::optional<std::string> input;
  std::optional<std::string> out;  // stdout when absent
  sim::Theorem1Params theorem1;
  sim::ChernoffParams chernoff;
};

/// args excludes the program name. Throws UsageError.
CliCommand parse_args(std::span<const std::string> args);

/// Parses an observation CSV: one value per line, optional header `z`,
/// `#` starts a comment. Throws InputError on malformed lines.
std::vector<double> read_observations(std::istream& in);

/// Header `n,log10_lrm,log10_cep,log10_ctm,cusum_lrm,cusum_cep,cusum_ctm`,
/// one row per step, 17 significant digits, LF line endings.
void emit_paths(const ProcessPath& path, std::ostream& out);

/// Report serializers. Keys are sorted; numbers are written in shortest
/// round-trip form; non-finite numbers become null.
std::string report_json(const sim::QuantileSummary& summary);
std::string report_json(const sim::FalseAlarmReport& report);
std::string report_json(const sim::Theorem1Report& report);
std::string report_json(const sim::ChernoffReport& report);

struct DetectResult {
  std::size_t steps = 0;
  double threshold = 0.0;
  std::vector<std::size_t> lrm;
  std::vector<std::size_t> ctm;
  std::vector<std::size_t> cep;
};

/// Conformal and standard CUSUM over a fixed observation sequence; the
/// tie-breaking draws come from (seed, run_index).
DetectResult detect(const PrePostPair& pair, std::span<const double> observations, double c, std::uint64_t seed,
                    std::uint64_t run_index);
std::string report_json(const DetectResult& result);

/// Executes a parsed command, writing to its output. Returns the exit code.
int run(const CliCommand& command, std::ostream& default_out);

/// Full entry point: parse, run, map errors to exit codes.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ccd::cli
