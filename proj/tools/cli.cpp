#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "ccd/error.hpp"

namespace ccd::cli {
namespace {

using nlohmann::json;

struct CommandSpec {
  Command command;
  const char* name;
  const char* description;
  std::vector<const char*> flags;
};

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {Command::paths, "paths", "Emit LRM/CeP/CTM paths and CUSUM statistics as CSV",
       {"model", "theta0", "theta1", "mu", "sigma", "n0", "n1", "seed", "run", "out"}},
      {Command::detect, "detect", "Run the conformal and standard CUSUM detectors and emit alarm times",
       {"model", "theta0", "theta1", "mu", "sigma", "c", "input", "n0", "n1", "seed", "run", "out"}},
      {Command::validity, "validity", "Quantiles of log10 final values over pre-change-only runs",
       {"model", "theta0", "theta1", "mu", "sigma", "n0", "sims", "seed", "out"}},
      {Command::false_alarms, "false-alarms", "CUSUM false-alarm rate on pre-change-only runs",
       {"model", "theta0", "theta1", "mu", "sigma", "n0", "c", "sims", "seed", "out"}},
      {Command::check_theorem1, "check-theorem1", "Check the LRM/CTM log-ratio bound in the Bernoulli case",
       {"theta0", "theta1", "n0", "n1", "eps", "sims", "seed", "out"}},
      {Command::check_chernoff, "check-chernoff", "Check the martingale multiplicative Chernoff bound",
       {"theta", "n", "thetas", "delta", "mu", "sims", "seed", "out"}},
  };
  return specs;
}

const std::map<std::string, std::string>& flag_help() {
  static const std::map<std::string, std::string> help = {
      {"model", "bernoulli | gauss-mean | gauss-var"},
      {"theta0", "pre-change Bernoulli parameter"},
      {"theta1", "post-change Bernoulli parameter"},
      {"mu", "post-change mean (gauss-mean) or Chernoff mu"},
      {"sigma", "post-change standard deviation (gauss-var)"},
      {"n0", "pre-change length"},
      {"n1", "post-change length"},
      {"seed", "base seed (64-bit)"},
      {"run", "run index within the seed"},
      {"sims", "number of Monte-Carlo runs"},
      {"c", "CUSUM threshold, > 1"},
      {"input", "observation CSV (one value per line)"},
      {"out", "output file (default: stdout)"},
      {"eps", "failure probability epsilon in (0,1)"},
      {"theta", "constant conditional probability"},
      {"n", "number of Bernoulli steps"},
      {"thetas", "comma-separated conditional probabilities"},
      {"delta", "relative deviation delta > 0"},
  };
  return help;
}

// Raw flag values as strings, from the command line or a config file.
using RawFlags = std::map<std::string, std::string>;

[[noreturn]] void usage(const std::string& flag, const std::string& what) {
  throw UsageError("--" + flag + ": " + what);
}

std::string json_scalar_to_string(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array() && key == "thetas") {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += json_scalar_to_string(e, "");
    }
    return out;
  }
  usage(key, "unsupported value type in config file");
}

void merge_config(const std::string& path, const std::vector<const char*>& allowed, RawFlags& raw) {
  std::ifstream in(path);
  if (!in) usage("config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    usage("config", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) usage("config", "top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* f) { return key == f; });
    if (!known) usage("config", "unknown key '" + key + "' for this command");
    if (!raw.contains(key)) raw[key] = json_scalar_to_string(value, key);
  }
}

double to_double(const RawFlags& raw, const std::string& flag) {
  const auto& s = raw.at(flag);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    usage(flag, "expected a finite number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_uint(const RawFlags& raw, const std::string& flag) {
  const auto& s = raw.at(flag);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) usage(flag, "expected a non-negative integer, got '" + s + "'");
  return v;
}

std::optional<double> opt_double(const RawFlags& raw, const std::string& flag) {
  if (!raw.contains(flag)) return std::nullopt;
  return to_double(raw, flag);
}

std::optional<std::uint64_t> opt_uint(const RawFlags& raw, const std::string& flag) {
  if (!raw.contains(flag)) return std::nullopt;
  return to_uint(raw, flag);
}

double require_double(const RawFlags& raw, const std::string& flag) {
  if (!raw.contains(flag)) usage(flag, "required flag is missing");
  return to_double(raw, flag);
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

PrePostPair parse_pair(const RawFlags& raw) {
  if (!raw.contains("model")) usage("model", "required flag is missing");
  const auto& model = raw.at("model");
  if (model == "bernoulli") {
    const double t0 = require_double(raw, "theta0");
    const double t1 = require_double(raw, "theta1");
    if (!in_open_unit(t0)) usage("theta0", "must lie in (0,1)");
    if (!in_open_unit(t1)) usage("theta1", "must lie in (0,1)");
    if (t0 == t1) usage("theta1", "must differ from --theta0");
    return PrePostPair::bernoulli(t0, t1);
  }
  if (model == "gauss-mean") {
    const double mu = require_double(raw, "mu");
    if (mu == 0.0) usage("mu", "must be non-zero");
    return PrePostPair::gauss_mean(mu);
  }
  if (model == "gauss-var") {
    const double sigma = require_double(raw, "sigma");
    if (!(sigma > 0.0) || sigma == 1.0) usage("sigma", "must be positive and different from 1");
    return PrePostPair::gauss_var(sigma);
  }
  usage("model", "expected bernoulli, gauss-mean or gauss-var, got '" + model + "'");
}

std::size_t sims_or(const RawFlags& raw, std::size_t fallback) {
  const auto sims = opt_uint(raw, "sims").value_or(fallback);
  if (sims == 0) usage("sims", "must be at least 1");
  return sims;
}

double threshold_flag(const RawFlags& raw) {
  const double c = require_double(raw, "c");
  if (!(c > 1.0)) usage("c", "threshold must exceed 1");
  return c;
}

std::vector<double> parse_thetas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    RawFlags one{{"thetas", item}};
    out.push_back(to_double(one, "thetas"));
  }
  if (out.empty()) usage("thetas", "expected at least one value");
  return out;
}

CliCommand build_command(Command cmd, const RawFlags& raw) {
  CliCommand out;
  out.command = cmd;
  if (raw.contains("out")) out.out = raw.at("out");
  if (raw.contains("input")) out.input = raw.at("input");

  unsigned threads = 0;
  if (const char* env = std::getenv("CCD_THREADS"); env && *env) {
    unsigned v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("CCD_THREADS: expected a non-negative integer, got '" + s + "'");
    }
    threads = v;
  }

  const auto seed = opt_uint(raw, "seed").value_or(42);

  switch (cmd) {
    case Command::paths:
    case Command::detect:
    case Command::validity:
    case Command::false_alarms: {
      auto& e = out.experiment;
      e.pair = parse_pair(raw);
      e.n0 = opt_uint(raw, "n0").value_or(1000);
      e.n1 = (cmd == Command::validity || cmd == Command::false_alarms) ? 0 : opt_uint(raw, "n1").value_or(1000);
      e.base_seed = seed;
      e.threads = threads;
      e.sims = 1;
      if (cmd == Command::detect || cmd == Command::false_alarms) e.threshold = threshold_flag(raw);
      if (cmd == Command::validity) e.sims = sims_or(raw, 10000);
      if (cmd == Command::false_alarms) e.sims = sims_or(raw, 1000);
      if ((cmd == Command::validity || cmd == Command::false_alarms) && e.n0 == 0) usage("n0", "must be at least 1");
      out.run_index = opt_uint(raw, "run").value_or(0);
      if (out.run_index >= (std::uint64_t{1} << 56)) usage("run", "must be below 2^56");
      break;
    }
    case Command::check_theorem1: {
      auto& t = out.theorem1;
      t.theta0 = opt_double(raw, "theta0").value_or(0.5);
      t.theta1 = opt_double(raw, "theta1").value_or(0.6);
      if (!in_open_unit(t.theta0)) usage("theta0", "must lie in (0,1)");
      if (!in_open_unit(t.theta1)) usage("theta1", "must lie in (0,1)");
      t.n0 = opt_uint(raw, "n0").value_or(1000);
      if (t.n0 == 0) usage("n0", "must be at least 1");
      t.n1 = opt_uint(raw, "n1").value_or(30);
      t.epsilon = opt_double(raw, "eps").value_or(0.1);
      if (!in_open_unit(t.epsilon)) usage("eps", "must lie in (0,1)");
      t.sims = sims_or(raw, 2000);
      t.base_seed = seed;
      t.threads = threads;
      break;
    }
    case Command::check_chernoff: {
      auto& c = out.chernoff;
      if (raw.contains("thetas")) {
        if (raw.contains("theta") || raw.contains("n")) usage("thetas", "cannot be combined with --theta/--n");
        c.thetas = parse_thetas(raw.at("thetas"));
      } else {
        const double theta = opt_double(raw, "theta").value_or(0.1);
        const auto n = opt_uint(raw, "n").value_or(100);
        if (n == 0) usage("n", "must be at least 1");
        c.thetas.assign(n, theta);
      }
      for (double t : c.thetas) {
        if (!(t >= 0.0 && t <= 1.0)) usage(raw.contains("thetas") ? "thetas" : "theta", "values must lie in [0,1]");
      }
      c.delta = opt_double(raw, "delta").value_or(1.0);
      if (!(c.delta > 0.0)) usage("delta", "must be positive");
      c.mu = opt_double(raw, "mu");
      if (c.mu) {
        double sum = 0.0;
        for (double t : c.thetas) sum += t;
        if (*c.mu < sum) usage("mu", "must be at least the sum of the conditional probabilities");
      }
      c.sims = sims_or(raw, 100000);
      c.base_seed = seed;
      c.threads = threads;
      break;
    }
  }
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json quantiles_json(const sim::ProcessQuantiles& q) {
  return {{"q05", number(q.q05)}, {"q25", number(q.q25)}, {"q50", number(q.q50)},
          {"q75", number(q.q75)}, {"q95", number(q.q95)}};
}

json alarm_json(const sim::AlarmStats& s) {
  return {{"alarms", s.alarms},           {"steps", s.steps}, {"rate", number(s.rate)},
          {"rate_stderr", number(s.rate_stderr)}, {"mean_gap", number(s.mean_gap)}, {"gaps", s.gaps}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_output(const CliCommand& cmd, std::ostream& default_out, const auto& writer) {
  if (!cmd.out || *cmd.out == "-") {
    writer(default_out);
    default_out.flush();
    if (!default_out) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream file(*cmd.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + *cmd.out + "'");
  writer(file);
  file.flush();
  if (!file) throw IoError("failed writing output file '" + *cmd.out + "'");
}

std::vector<double> load_observations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return read_observations(in);
}

}  // namespace

CliCommand parse_args(std::span<const std::string> args) {
  CLI::App app{"Conformal CUSUM change detection", "ccd"};
  app.require_subcommand(1, 1);
  app.set_help_flag("-h,--help", "Print help and exit");

  std::map<std::string, RawFlags> values;
  std::map<std::string, std::string> config_paths;
  std::vector<std::pair<CLI::App*, const CommandSpec*>> subs;
  for (const auto& spec : command_specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.description);
    auto& store = values[spec.name];
    for (const char* flag : spec.flags) {
      // Options bind into a per-flag slot; only flags actually given are kept.
      sub->add_option(std::string("--") + flag, store[flag], flag_help().at(flag));
    }
    sub->add_option("--config", config_paths[spec.name], "JSON file with flag values");
    subs.emplace_back(sub, &spec);
  }

  std::vector<const char*> argv{"ccd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (auto [sub, spec] : subs) {
    if (!sub->parsed()) continue;
    RawFlags raw;
    for (const char* flag : spec->flags) {
      if (sub->count(std::string("--") + flag) > 0) raw[flag] = values[spec->name][flag];
    }
    if (sub->count("--config") > 0) merge_config(config_paths[spec->name], spec->flags, raw);
    return build_command(spec->command, raw);
  }
  throw UsageError("a subcommand is required");
}

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view field(line.data() + first, last - first + 1);
    if (out.empty() && field == "z") continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw InputError("observation CSV line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) +
                       "'");
    }
    out.push_back(v);
  }
  return out;
}

void emit_paths(const ProcessPath& path, std::ostream& out) {
  const auto cusum_lrm = cusum_statistic(path.log_lrm);
  const auto cusum_cep = cusum_statistic(path.log_cep);
  const auto cusum_ctm = cusum_statistic(path.log_ctm);
  std::string buf = "n,log10_lrm,log10_cep,log10_ctm,cusum_lrm,cusum_cep,cusum_ctm\n";
  for (std::size_t n = 0; n < path.size(); ++n) {
    buf += std::to_string(n);
    for (double v : {path.log_lrm[n] / std::numbers::ln10, path.log_cep[n] / std::numbers::ln10,
                     path.log_ctm[n] / std::numbers::ln10, cusum_lrm[n], cusum_cep[n], cusum_ctm[n]}) {
      buf += ',';
      buf += format_g17(v);
    }
    buf += '\n';
  }
  out << buf;
}

std::string report_json(const sim::QuantileSummary& summary) {
  return dump({{"lrm", quantiles_json(summary.lrm)},
               {"ctm", quantiles_json(summary.ctm)},
               {"cep", quantiles_json(summary.cep)},
               {"sims", summary.sims}});
}

std::string report_json(const sim::FalseAlarmReport& r) {
  return dump({{"c", number(r.threshold)},
               {"n0", r.n0},
               {"sims", r.sims},
               {"lrm", alarm_json(r.lrm)},
               {"ctm", alarm_json(r.ctm)},
               {"cep", alarm_json(r.cep)}});
}

std::string report_json(const sim::Theorem1Report& r) {
  return dump({{"theta0", r.theta0},
               {"theta1", r.theta1},
               {"n0", r.n0},
               {"n1", r.n1},
               {"epsilon", r.epsilon},
               {"sims", r.sims},
               {"B", r.B},
               {"delta", r.delta},
               {"c_const", number(r.c_const)},
               {"chernoff_Delta", number(r.chernoff_Delta)},
               {"bound_rhs", r.bound_rhs},
               {"anomalous_bound", r.anomalous_bound},
               {"violation_frequency", r.violation_frequency},
               {"violation_stderr", r.violation_stderr},
               {"max_log_ratio", number(r.max_log_ratio)},
               {"mean_max_log_ratio", number(r.mean_max_log_ratio)},
               {"mean_anomalous", r.mean_anomalous},
               {"anomalous_stderr", r.anomalous_stderr},
               {"typical_runs", r.typical_runs},
               {"typical_mean_anomalous", r.typical_mean_anomalous},
               {"typical_anomalous_stderr", r.typical_anomalous_stderr}});
}

std::string report_json(const sim::ChernoffReport& r) {
  json means = json::array();
  json errs = json::array();
  for (std::size_t i = 0; i < r.supermartingale_mean.size(); ++i) {
    means.push_back(number(r.supermartingale_mean[i]));
    errs.push_back(number(r.supermartingale_stderr[i]));
  }
  return dump({{"n", r.n},
               {"sims", r.sims},
               {"mu", r.mu},
               {"delta", r.delta},
               {"s", r.s},
               {"tail_threshold", r.tail_threshold},
               {"tail_estimate", r.tail_estimate},
               {"tail_stderr", r.tail_stderr},
               {"bound_exact", r.bound_exact},
               {"bound_simple", r.bound_simple},
               {"bounds_ordered", r.bounds_ordered},
               {"tail_within_bound", r.tail_within_bound},
               {"supermartingale_mean", means},
               {"supermartingale_stderr", errs},
               {"supermartingale_ok", r.supermartingale_ok}});
}

DetectResult detect(const PrePostPair& pair, std::span<const double> observations, double c, std::uint64_t seed,
                    std::uint64_t run_index) {
  const auto taus = sim::generate_taus(seed, run_index, observations.size());
  const auto path = run_processes(pair, BettingFunction::cao(pair), observations, taus);
  return {observations.size(), c, cusum_alarms(path.log_lrm, c), cusum_alarms(path.log_ctm, c),
          cusum_alarms(path.log_cep, c)};
}

std::string report_json(const DetectResult& r) {
  return dump({{"c", r.threshold}, {"steps", r.steps}, {"alarms", {{"lrm", r.lrm}, {"ctm", r.ctm}, {"cep", r.cep}}}});
}

int run(const CliCommand& cmd, std::ostream& default_out) {
  switch (cmd.command) {
    case Command::paths: {
      const auto path = sim::run_paths(cmd.experiment, cmd.run_index);
      write_output(cmd, default_out, [&](std::ostream& o) { emit_paths(path, o); });
      break;
    }
    case Command::detect: {
      const auto z = cmd.input ? load_observations(*cmd.input) : sim::generate_stream(cmd.experiment, cmd.run_index);
      const auto result = detect(cmd.experiment.pair, z, *cmd.experiment.threshold, cmd.experiment.base_seed,
                                 cmd.run_index);
      write_output(cmd, default_out, [&](std::ostream& o) { o << report_json(result); });
      break;
    }
    case Command::validity: {
      const auto summary = sim::validity_study(cmd.experiment);
      write_output(cmd, default_out, [&](std::ostream& o) { o << report_json(summary); });
      break;
    }
    case Command::false_alarms: {
      const auto report = sim::false_alarm_study(cmd.experiment);
      write_output(cmd, default_out, [&](std::ostream& o) { o << report_json(report); });
      break;
    }
    case Command::check_theorem1: {
      const auto report = sim::theorem1_check(cmd.theorem1);
      write_output(cmd, default_out, [&](std::ostream& o) { o << report_json(report); });
      break;
    }
    case Command::check_chernoff: {
      const auto report = sim::chernoff_check(cmd.chernoff);
      write_output(cmd, default_out, [&](std::ostream& o) { o << report_json(report); });
      break;
    }
  }
  return 0;
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CliCommand cmd;
  try {
    cmd = parse_args(args);
  } catch (const UsageError& e) {
    (e.exit_code() == 0 ? out : err) << e.what() << (e.exit_code() == 0 ? "" : "\nRun 'ccd --help' for usage.\n");
    return e.exit_code();
  }
  try {
    return run(cmd, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ccd::cli
