#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwell/experiments.hpp"

namespace fracwell {

/// Configuration problem tied to one key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  std::string experiment;
  int d = 1;
  double s = 0.75;
  std::vector<double> s_list;
  double theta = 1.0;
  double c0 = 1.0;
  double delta0 = 0.5;
  double k = 0.0;
  std::vector<int> n_list{64};
  int m = 1;
  int pad = 0;
  int resamples = 20;
  int realizations = 30;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string dist = "uniform";
  int bins = 8;
  /// constant exterior for `minimize`; NaN selects K
  double v0 = std::numeric_limits<double>::quiet_NaN();
  SolverConfig solver;
  std::string backend = "automatic";
  std::vector<double> h_list{1e-2, 1e-3};
  int sites = 4;
  int window = 1024;
  std::vector<int> sides{16, 32, 64, 128, 256};
  double alpha = 0.5;
  bool sensitivity = false;
  std::string out = "out";
  bool overwrite = false;

  ExperimentSetup setup() const;
  /// Every key with its current value, as written to manifests.
  std::map<std::string, std::string> entries() const;
  void validate() const;
};

const std::vector<std::string>& experiment_names();
const std::vector<std::string>& config_keys();

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
std::map<std::string, std::string> read_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies key/value pairs in order; unknown keys and bad values throw ConfigError.
void apply(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// File-level settings overridden by command-line pairs, then validated.
RunConfig parse_config(const std::map<std::string, std::string>& file, const std::map<std::string, std::string>& flags);

/// {experiment}_{d}d_s{s}_theta{theta}_n{n}; lists are joined with '-'.
std::string output_stem(const RunConfig& cfg);

/// Runs the configured experiment; file output is left to the caller.
SweepRecord run_experiment(const RunConfig& cfg);

}  // namespace fracwell
