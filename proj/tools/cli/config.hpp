#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pxg/functional.hpp"
#include "pxg/harness.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/regions.hpp"

namespace pxg::cli {

/// Exit codes of the `pxg` tool.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kInvariantError = 4 };

/// Malformed or inconsistent configuration. `key` is the dotted path of the
/// offending entry, e.g. "window.radius".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProcessConfig {
  ProcessKind kind = ProcessKind::Poisson;
  Parameterization parameterization = Parameterization::FixedWindow;
  double t = 0.0;
  std::uint64_t seed = 0;
};

enum class ExperimentKind { Variance, Clt, Tails, Stabilize };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Variance;
  std::vector<double> t_values;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t max_points = 0;
  bool record_timing = false;
  // tails
  std::size_t per_axis = 32;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<double> r_grid;
  // stabilize
  std::size_t trials = 1000;
  double margin = 1.1;
  std::size_t n_min = 20;
  std::size_t n_max = 100;
  std::size_t extra_points = 3;
};

struct OutputConfig {
  std::filesystem::path dir;  ///< empty: use --out-dir, PXG_OUT_DIR, then "."
  std::string points = "points.csv";
  std::string edges = "edges.csv";
  std::string replications = "replications.csv";
  std::string survival = "survival.csv";
  std::string summary = "summary.json";
};

struct RunConfig {
  std::optional<ForbiddenRegionFamily> family;
  std::optional<Window> window;
  std::vector<WeightSpec> weights;
  std::optional<ProcessConfig> process;
  std::optional<ExperimentConfig> experiment;
  OutputConfig output;
};

/// Parses and validates a TOML document. Every table and key is checked;
/// unknown keys raise ConfigError. Tables a command does not need may be
/// absent; commands call the require_* helpers.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
/// Reads the file (IoError when unreadable) and parses it.
RunConfig load_config(const std::filesystem::path& path);

const ForbiddenRegionFamily& require_family(const RunConfig& cfg);
const Window& require_window(const RunConfig& cfg);
const ProcessConfig& require_process(const RunConfig& cfg);
const ExperimentConfig& require_experiment(const RunConfig& cfg);

std::string to_string(ExperimentKind kind);

}  // namespace pxg::cli
