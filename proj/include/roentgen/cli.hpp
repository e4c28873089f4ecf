#pragma once

#include "roentgen/spectra.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace roentgen::cli {

enum class ExitCode : int { ok = 0, config = 2, numerical = 3, rejected = 4 };

struct GridSettings {
  // Either an explicit range or a window around the resonance.
  bool around_resonance = true;
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 2001;
  double half_widths = 20.0;
};

struct ScanSettings {
  double lambda_min = 1e2;
  double lambda_max = 1e4;
  std::size_t points = 16;
  std::optional<double> asymptotic_start;
};

struct ProbabilitySettings {
  double upper = 100.0;
  double lower = 0.0;
};

struct PatternSettings {
  PatternMode::Kind mode = PatternMode::Kind::golden_rule;
  RateVariant variant = RateVariant::F_prime;
  std::size_t theta_points = 19;
  double phi = 0.0;
  double upper = 0.0;
  std::size_t sphere_theta_points = 32;
  std::size_t sphere_phi_points = 16;
};

struct RatesSettings {
  std::vector<double> deltas{0.0};
  std::vector<double> thetas; // empty: the configured direction only
  bool limit_ordering = true;
  LimitOrderingOptions ordering;
};

struct OracleSettings {
  std::size_t modes = 2000;
  double gamma = 1e-3;
  double half_width = 50.0;  // in units of gamma
  double duration = 20.0;    // in units of 1 / gamma
  double time_step = 0.5;
  std::size_t record_every = 20;
};

/// A fully validated run description. Physical input, when given, is kept
/// for the manifest echo; `scenario.params` is always the resolved
/// dimensionless block.
struct ScenarioConfig {
  std::filesystem::path source;
  std::string source_text;
  std::optional<PhysicalInput> physical;
  Scenario scenario;
  UnitVector3 direction = UnitVector3::checked({1.0, 0.0, 0.0});
  bool perpendicular = true;
  double theta = 0.0;
  double phi = 0.0;
  GridSettings grid;
  ScanSettings scan;
  Formfactor formfactor;
  ProbabilitySettings probability;
  PatternSettings pattern;
  RatesSettings rates;
  OracleSettings oracle;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::filesystem::path output = "out";
  std::size_t structural_samples = 0;
  std::vector<std::string> warnings;
};

/// YAML, or JSON when the file name ends in .json. Throws ConfigError with
/// the offending field path.
ScenarioConfig load_config(const std::filesystem::path &path);
ScenarioConfig parse_config(const std::string &text, bool json,
                            const std::filesystem::path &base_dir = ".");

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> threads;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(ScenarioConfig &config, const Overrides &overrides);

const std::vector<std::string> &subcommands();

/// Runs one subcommand, writes its outputs and manifest.json into
/// config.output, and maps failures to exit codes. Messages go to `err`.
ExitCode run(const std::string &subcommand, const ScenarioConfig &config, std::ostream &err);

/// load_config + apply_overrides + run, with config errors mapped to exit 2.
ExitCode run_file(const std::string &subcommand, const std::filesystem::path &config_path,
                  const Overrides &overrides, std::ostream &err);

// Output helpers shared with the tests.
std::string format_number(double value);
std::string sha256_hex(const std::string &bytes);
std::string sha256_file(const std::filesystem::path &path);

} // namespace roentgen::cli
