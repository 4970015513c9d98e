#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pdm::cli {

enum ExitCode { kPass = 0, kFail = 1, kConfigError = 2, kNumericalError = 3 };

/// Malformed or inconsistent input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Report could not be written; maps to exit code 3.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<std::string> family;
  std::optional<double> lambda, mu, alpha, beta;
  int nmax = 5;
  int grid = 2000;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  int draws = 5;
  std::string method = "both";
  std::optional<std::string> out;
  std::string format = "json";

  nlohmann::ordered_json to_json() const;
};

extern const std::vector<std::string> kCommands;

/// Command line, optionally layered over a flat JSON config file given by
/// --config; flags override file values.  Throws ConfigError.
RunConfig parse_config(const std::vector<std::string>& args);
/// Applies the keys of a flat JSON object to `cfg`; unknown keys and
/// wrongly typed values throw ConfigError naming the key.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);
/// Checks the command, family and parameter validity.  Throws ConfigError.
void validate(const RunConfig& cfg);

struct Check {
  std::string name;
  double measured;
  double expected;
  double tolerance;
  bool pass;
};

struct RunReport {
  RunConfig config;
  std::vector<Check> checks;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  double seconds = 0.0;

  bool pass() const;
  /// Pass/fail record comparing |measured - expected| <= tolerance.
  void check(std::string name, double measured, double expected, double tolerance);
  /// Pass/fail record for a one-sided bound measured <= limit.
  void check_below(std::string name, double measured, double limit);
  /// Pass/fail record for a one-sided bound measured >= limit.
  void check_above(std::string name, double measured, double limit);

  /// Tabular form for --format csv (spectrum and states only).
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
};

/// Runs the command.  Library exceptions propagate: pdm::InvalidParams and
/// pdm::RegimeError are configuration problems, NumericalBreakdown and
/// non-finite results are numerical ones.
RunReport execute(const RunConfig& cfg);

nlohmann::ordered_json report_json(const RunReport& report, bool with_timings = true);
std::string render(const RunReport& report);
/// Writes to cfg.out, or stdout when unset.  Throws OutputError.
void emit_report(const RunReport& report);

/// Full front end: parse, execute, emit, map errors to exit codes.
int run(const std::vector<std::string>& args);

}  // namespace pdm::cli
