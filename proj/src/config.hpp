#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "busemann/diagnostics.hpp"
#include "busemann/scenarios.hpp"

namespace busemann {

/// Malformed or schema-violating configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GradedGridSpec {
  double extent = 100.0;
  double inner = 2.0;
  int inner_cells = 12;
  double growth = 1.5;
  int quadrature = 2;
  double density = 1.0;
};

struct PowerLawSpec {
  double exponent = -0.5;
  double extent = 100.0;
  int pieces = 60;
  double innermost = 1e-6;
};

struct ScenarioSpec {
  std::string builder;  // crofton | kmw | beurling_ahlfors | degenerate
  std::size_t dim = 2;
  // kmw, degenerate
  std::optional<GradedGridSpec> lebesgue;
  std::vector<AtomND> atoms;
  std::size_t doubling_samples = 200;
  // beurling_ahlfors
  std::vector<Atom1D> atoms1d;
  std::vector<DensityPiece> pieces1d;
  std::optional<PowerLawSpec> power_law;
  double cap_half_angle = std::numbers::pi / 6;
  // degenerate
  double theta0 = 0.0;
};

struct GridSpec {
  std::string path;
  std::size_t resolution = 21;
  std::optional<Box> window;
};

struct RunConfig {
  ScenarioSpec scenario;
  Box domain;
  SamplingPlan plan;
  std::uint64_t seed = 0;
  std::optional<Backend> backend;
  std::optional<double> kappa_min;
  std::optional<std::string> calibration;  // calibration file to audit against
  std::string report_path = "report.txt";
  std::optional<GridSpec> grid;
};

/// Strict parse: unknown keys are rejected with their full path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

Scenario build_scenario(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = 0;  // 0 pass, 2 audit failure
  std::string report;  // full report text
  std::string report_json;
  std::string report_path;
  std::optional<std::string> grid_path;
};

/// Builds the scenario, validates it, runs the diagnostics, checks
/// expectations and writes the report (and grid) under `out_dir`.
RunOutcome run_config(const RunConfig& cfg, const std::string& out_dir);

/// Extracts the JSON block of a report.
std::string report_json_block(const std::string& report_text);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct CalibrationOutcome {
  KmwConstant constant;
  std::string text;  // JSON document written to the calibration file
  int exit_code = 0;  // 2 on an inconsistent fit
};

CalibrationOutcome run_calibration(std::size_t n, std::uint64_t budget, std::uint64_t seed, const std::string& out_path);
KmwConstant read_calibration(const std::string& path);

}  // namespace busemann
