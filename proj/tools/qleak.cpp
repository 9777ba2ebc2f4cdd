// qleak: decide whether two timing-measurement distributions differ by more
// than a negligibility threshold, estimate how many measurements such a
// decision needs, and run synthetic ground-truth experiments.
//
// Exit codes: 0 = ok / no violation, 1 = usage error, 2 = data error,
// 3 = violation found by `analyze`.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qleak/qleak.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitViolation = 3;

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string token =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto value = qleak::detail::parse_value(qleak::detail::trim(token));
    if (!value) {
      qleak::fail(qleak::errc::invalid_config,
                  std::string(what) + ": not a numeric list entry: '" + token + "'");
    }
    out.push_back(*value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

qleak::QuantileLevels resolve_levels(const std::string& preset, const std::string& explicit_csv) {
  if (!explicit_csv.empty()) {
    return qleak::QuantileLevels::from(parse_double_list(explicit_csv, "--levels"));
  }
  if (preset == "percentiles") return qleak::QuantileLevels::percentiles();
  if (preset == "deciles") return qleak::QuantileLevels::deciles();
  if (preset == "quartiles") return qleak::QuantileLevels::quartiles();
  qleak::fail(qleak::errc::invalid_config, "unknown quantile preset '" + preset + "'");
}

qleak::Unit resolve_unit(const std::string& name) {
  const auto unit = qleak::parse_unit(name);
  if (!unit) qleak::fail(qleak::errc::invalid_config, "unknown unit '" + name + "'");
  return *unit;
}

std::optional<qleak::DataKind> resolve_kind(const std::string& name) {
  if (name == "auto") return std::nullopt;
  if (name == "continuous") return qleak::DataKind::continuous;
  if (name == "discrete") return qleak::DataKind::discrete;
  qleak::fail(qleak::errc::invalid_config, "unknown kind '" + name + "'");
}

// Reports land on stdout unless --out is given, in which case the file is
// written via a temp name and renamed into place.
void emit_report(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(out_path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    if (!out) qleak::fail(qleak::errc::io, "cannot open '" + tmp.string() + "' for writing");
    out << body;
    out.flush();
    if (!out) qleak::fail(qleak::errc::io, "write error on '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    qleak::fail(qleak::errc::io, "cannot move report into '" + out_path + "'");
  }
}

std::string render_config_text(const nlohmann::json& config) {
  std::string out = "config:     " + config.dump() + "\n";
  return out;
}

struct AnalyzeArgs {
  std::string baseline, candidate;
  double alpha = 0.1;
  double delta = 0.0;
  std::string preset = "percentiles";
  std::string levels_csv;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  std::string kind = "auto";
  std::string unit = "unitless";
  bool truncate = false;
  std::string format = "json";
  unsigned threads = qleak::default_thread_count();
  std::string out_path;
};

int run_analyze(const AnalyzeArgs& args) {
  const qleak::QuantileLevels levels = resolve_levels(args.preset, args.levels_csv);
  const qleak::Unit unit = resolve_unit(args.unit);

  qleak::TestConfig cfg;
  cfg.alpha = args.alpha;
  cfg.delta = args.delta;
  cfg.levels = levels;
  cfg.replicates = args.bootstrap;
  cfg.seed = args.seed;
  cfg.kind_override = resolve_kind(args.kind);
  cfg.validate();

  qleak::MeasurementSeries x = qleak::load_series(args.baseline, unit, "baseline");
  qleak::MeasurementSeries y = qleak::load_series(args.candidate, unit, "candidate");
  const qleak::PairedSample sample = qleak::pair(std::move(x), std::move(y), args.truncate);

  const qleak::TestResult result = qleak::run_test(sample, cfg, args.threads);

  nlohmann::json config{
      {"subcommand", "analyze"}, {"baseline", args.baseline}, {"candidate", args.candidate},
      {"alpha", args.alpha},     {"delta", args.delta},       {"quantiles", args.preset},
      {"levels", levels.levels}, {"B", args.bootstrap},       {"seed", args.seed},
      {"kind", args.kind},       {"unit", args.unit},         {"truncate", args.truncate},
      {"format", args.format},   {"threads", args.threads},
  };

  std::string body;
  if (args.format == "json") {
    nlohmann::json doc = qleak::to_json(result);
    doc["config"] = config;
    body = doc.dump(2) + "\n";
  } else if (args.format == "text") {
    body = qleak::to_text(result) + render_config_text(config);
  } else if (args.format == "csv") {
    body = "# config: " + config.dump() + "\n" + qleak::to_csv(result);
  } else {
    qleak::fail(qleak::errc::invalid_config, "unknown format '" + args.format + "'");
  }
  emit_report(body, args.out_path);
  return result.decision == qleak::Decision::violation ? kExitViolation : kExitOk;
}

struct PowerArgs {
  std::string pilot_x, pilot_y;
  double mu = 0.0;
  double delta = 0.0;
  double power = 0.9;
  double alpha = 0.1;
  bool shift = false;
  std::string formula = "theorem";
  std::string preset = "percentiles";
  std::string levels_csv;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  std::string unit = "unitless";
  bool truncate = false;
  std::string format = "json";
  unsigned threads = qleak::default_thread_count();
  std::string out_path;
};

int run_power(const PowerArgs& args) {
  qleak::PowerRequest req;
  req.mu = args.mu;
  req.delta = args.delta;
  req.power = args.power;
  req.alpha = args.alpha;
  req.shift = args.shift;
  if (args.formula == "theorem") {
    req.formula = qleak::PowerFormula::theorem_derived;
  } else if (args.formula == "paper") {
    req.formula = qleak::PowerFormula::paper_literal;
  } else {
    qleak::fail(qleak::errc::invalid_config, "unknown formula '" + args.formula + "'");
  }
  req.levels = resolve_levels(args.preset, args.levels_csv);
  req.replicates = args.bootstrap;
  req.seed = args.seed;
  req.validate();

  const qleak::Unit unit = resolve_unit(args.unit);
  qleak::MeasurementSeries x = qleak::load_series(args.pilot_x, unit, "pilot_x");
  qleak::MeasurementSeries y = qleak::load_series(args.pilot_y, unit, "pilot_y");
  const qleak::PairedSample pilot = qleak::pair(std::move(x), std::move(y), args.truncate);

  const qleak::PowerResult result = qleak::estimate_sample_size(pilot, req, args.threads);

  nlohmann::json config{
      {"subcommand", "power"},    {"pilot_x", args.pilot_x},   {"pilot_y", args.pilot_y},
      {"mu", args.mu},            {"delta", args.delta},       {"p", args.power},
      {"alpha", args.alpha},      {"shift", args.shift},       {"formula", args.formula},
      {"quantiles", args.preset}, {"levels", req.levels.levels}, {"B", args.bootstrap},
      {"seed", args.seed},        {"unit", args.unit},         {"truncate", args.truncate},
      {"format", args.format},    {"threads", args.threads},
  };

  std::string body;
  if (args.format == "json") {
    nlohmann::json doc = qleak::to_json(result);
    doc["config"] = config;
    body = doc.dump(2) + "\n";
  } else if (args.format == "text") {
    body = qleak::to_text(result) + render_config_text(config);
  } else if (args.format == "csv") {
    body = "# config: " + config.dump() + "\n" + qleak::to_csv(result);
  } else {
    qleak::fail(qleak::errc::invalid_config, "unknown format '" + args.format + "'");
  }
  emit_report(body, args.out_path);
  return kExitOk;
}

struct SimulateArgs {
  std::string phi_csv = "0";
  std::string mu_csv = "0";
  std::size_t n = 1000;
  double delta = 0.0;
  double alpha = 0.1;
  std::size_t bootstrap = 1000;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  std::string preset = "percentiles";
  std::string levels_csv;
  std::string format = "json";
  unsigned threads = qleak::default_thread_count();
  std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
  qleak::GridSpec grid;
  grid.phi_values = parse_double_list(args.phi_csv, "--phi");
  grid.mu_values = parse_double_list(args.mu_csv, "--mu");
  grid.n = args.n;
  grid.delta = args.delta;
  grid.alpha = args.alpha;
  grid.replicates = args.bootstrap;
  grid.reps = args.reps;
  grid.seed = args.seed;
  grid.levels = resolve_levels(args.preset, args.levels_csv);
  grid.validate();

  const qleak::RejectionSurface surface = qleak::rejection_grid(grid, args.threads);

  nlohmann::json config{
      {"subcommand", "simulate"}, {"phi", grid.phi_values},      {"mu", grid.mu_values},
      {"n", args.n},              {"delta", args.delta},         {"alpha", args.alpha},
      {"B", args.bootstrap},      {"reps", args.reps},           {"seed", args.seed},
      {"quantiles", args.preset}, {"levels", grid.levels.levels}, {"format", args.format},
      {"threads", args.threads},
  };

  std::string body;
  if (args.format == "json") {
    nlohmann::json doc = qleak::to_json(surface);
    doc["config"] = config;
    body = doc.dump(2) + "\n";
  } else if (args.format == "text") {
    body = qleak::to_text(surface) + render_config_text(config);
  } else if (args.format == "csv") {
    body = "# config: " + config.dump() + "\n" + qleak::to_csv(surface);
  } else {
    qleak::fail(qleak::errc::invalid_config, "unknown format '" + args.format + "'");
  }
  emit_report(body, args.out_path);
  return kExitOk;
}

struct GenArgs {
  std::string x_out, y_out;
  double phi = 0.0;
  double sigma = 1.0;
  double mu = 0.0;
  std::size_t n = 1000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
};

int run_gen_ar1(const GenArgs& args) {
  qleak::Ar1Spec spec;
  spec.phi = args.phi;
  spec.sigma = args.sigma;
  spec.mu_shift = args.mu;
  spec.n = args.n;
  spec.burn_in = args.burn_in;
  spec.seed = args.seed;
  spec.validate();

  const qleak::PairedSample sample = qleak::gen_ar1(spec);
  qleak::write_series(args.x_out, sample.x);
  qleak::write_series(args.y_out, sample.y);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantile-based timing-leak detection with a negligibility threshold"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  CLI::App* cmd_analyze = app.add_subcommand(
      "analyze", "Test whether two measurement files differ by more than delta");
  cmd_analyze->add_option("baseline", analyze.baseline, "Baseline measurement file")->required();
  cmd_analyze->add_option("candidate", analyze.candidate, "Candidate measurement file")
      ->required();
  cmd_analyze->add_option("--delta", analyze.delta, "Negligibility threshold (measurement units)")
      ->required();
  cmd_analyze->add_option("--alpha", analyze.alpha, "Type-1 error rate (default 0.1)");
  cmd_analyze->add_option("--quantiles", analyze.preset,
                          "Level preset: percentiles|deciles|quartiles");
  cmd_analyze->add_option("--levels", analyze.levels_csv,
                          "Explicit comma-separated levels in (0,1); overrides --quantiles");
  cmd_analyze->add_option("--bootstrap", analyze.bootstrap, "Bootstrap replicates B (default 1000)");
  cmd_analyze->add_option("--seed", analyze.seed, "RNG seed (default 0)");
  cmd_analyze->add_option("--kind", analyze.kind, "Data kind: auto|continuous|discrete");
  cmd_analyze->add_option("--unit", analyze.unit, "Measurement unit: ns|cycles|unitless");
  cmd_analyze->add_flag("--truncate", analyze.truncate,
                        "Cut unequal-length inputs to the common prefix");
  cmd_analyze->add_option("--format", analyze.format, "Report format: json|text|csv");
  cmd_analyze->add_option("--threads", analyze.threads,
                          "Worker threads (default: QLEAK_THREADS or hardware)");
  cmd_analyze->add_option("--out", analyze.out_path, "Write the report to a file (atomic)");

  PowerArgs power;
  CLI::App* cmd_power =
      app.add_subcommand("power", "Estimate the sample size needed to detect a leak");
  cmd_power->add_option("pilot-x", power.pilot_x, "Pilot measurement file, class x")->required();
  cmd_power->add_option("pilot-y", power.pilot_y, "Pilot measurement file, class y")->required();
  cmd_power->add_option("--mu", power.mu, "Expected leak size (must exceed delta)")->required();
  cmd_power->add_option("--delta", power.delta, "Negligibility threshold")->required();
  cmd_power->add_option("--power", power.power, "Target detection rate p (default 0.9)");
  cmd_power->add_option("--alpha", power.alpha, "Type-1 error rate (default 0.1)");
  cmd_power->add_flag("--shift", power.shift,
                      "Assume a distribution-wide shift (uses the smallest quantile scale)");
  cmd_power->add_option("--formula", power.formula, "Sample-size formula: theorem|paper");
  cmd_power->add_option("--quantiles", power.preset, "Level preset: percentiles|deciles|quartiles");
  cmd_power->add_option("--levels", power.levels_csv, "Explicit comma-separated levels");
  cmd_power->add_option("--bootstrap", power.bootstrap, "Bootstrap replicates B (default 1000)");
  cmd_power->add_option("--seed", power.seed, "RNG seed (default 0)");
  cmd_power->add_option("--unit", power.unit, "Measurement unit: ns|cycles|unitless");
  cmd_power->add_flag("--truncate", power.truncate,
                      "Cut unequal-length pilots to the common prefix");
  cmd_power->add_option("--format", power.format, "Report format: json|text|csv");
  cmd_power->add_option("--threads", power.threads, "Worker threads");
  cmd_power->add_option("--out", power.out_path, "Write the report to a file (atomic)");

  SimulateArgs simulate;
  CLI::App* cmd_simulate = app.add_subcommand(
      "simulate", "Monte Carlo rejection-rate surface over an AR(1) (phi, mu) grid");
  cmd_simulate->add_option("--phi", simulate.phi_csv, "Comma-separated phi values (default 0)");
  cmd_simulate->add_option("--mu", simulate.mu_csv, "Comma-separated shift values (default 0)");
  cmd_simulate->add_option("--n", simulate.n, "Sample size per run (default 1000)");
  cmd_simulate->add_option("--delta", simulate.delta, "Negligibility threshold")->required();
  cmd_simulate->add_option("--alpha", simulate.alpha, "Type-1 error rate (default 0.1)");
  cmd_simulate->add_option("--bootstrap", simulate.bootstrap, "Bootstrap replicates B");
  cmd_simulate->add_option("--reps", simulate.reps, "Simulation runs per cell (default 200)");
  cmd_simulate->add_option("--seed", simulate.seed, "RNG seed (default 0)");
  cmd_simulate->add_option("--quantiles", simulate.preset, "Level preset");
  cmd_simulate->add_option("--levels", simulate.levels_csv, "Explicit comma-separated levels");
  cmd_simulate->add_option("--format", simulate.format, "Report format: json|text|csv");
  cmd_simulate->add_option("--threads", simulate.threads, "Worker threads");
  cmd_simulate->add_option("--out", simulate.out_path, "Write the report to a file (atomic)");

  GenArgs gen;
  CLI::App* cmd_gen =
      app.add_subcommand("gen-ar1", "Generate a synthetic AR(1) measurement pair");
  cmd_gen->add_option("x-out", gen.x_out, "Output file for the x series")->required();
  cmd_gen->add_option("y-out", gen.y_out, "Output file for the y series")->required();
  cmd_gen->add_option("--phi", gen.phi, "AR(1) coefficient in (-1, 1) (default 0)");
  cmd_gen->add_option("--sigma", gen.sigma, "Innovation standard deviation (default 1)");
  cmd_gen->add_option("--mu", gen.mu, "Shift applied to the y series (default 0)");
  cmd_gen->add_option("--n", gen.n, "Series length (default 1000)");
  cmd_gen->add_option("--burn-in", gen.burn_in, "Discarded warm-up steps (default 1000)");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_analyze->parsed()) return run_analyze(analyze);
    if (cmd_power->parsed()) return run_power(power);
    if (cmd_simulate->parsed()) return run_simulate(simulate);
    if (cmd_gen->parsed()) return run_gen_ar1(gen);
    std::cerr << "qleak: no subcommand\n";
    return kExitUsage;
  } catch (const qleak::Error& e) {
    std::cerr << "qleak: " << e.what() << "\n";
    return e.is_data_error() ? kExitData : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qleak: " << e.what() << "\n";
    return kExitUsage;
  }
}
