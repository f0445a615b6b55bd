#pragma once

// Config-driven scans: one JSON document describes the model, ansatz,
// optimizer, an optional one-parameter sweep and the ED cutoffs. Each scan
// point yields one ResultRecord; records go to results.csv and results.json
// next to a resolved copy of the config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvvqe/models.hpp"
#include "cvvqe/vqe.hpp"

namespace cvvqe {

inline constexpr int kResultSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ScanParameter { U, t, mu, subtractions };

std::string to_string(ScanParameter parameter);
ScanParameter scan_parameter_from_string(const std::string& name);

struct ScanSpec {
  ScanParameter parameter = ScanParameter::U;
  std::vector<double> values;
};

/// Ansatz as written in a config. Either `subtractions` annihilators on
/// `subtraction_mode` (1-based), or an explicit `prep` polynomial in the text
/// format.
struct AnsatzSpec {
  std::optional<int> n_modes;  // defaults to the number of sites
  int subtractions = 1;
  int subtraction_mode = 1;
  std::optional<std::string> prep;
  int layers = 1;
  double purity_target = 1.0;
  double tap_reflectivity = 0.05;

  AnsatzConfig build(int n_sites) const;
};

struct ExperimentConfig {
  BoseHubbardParams model;
  AnsatzSpec ansatz;
  OptimizerConfig optimizer;
  std::optional<ScanSpec> scan;
  std::vector<int> ed_cutoffs{4, 12};
  std::string output_path = "results";
  std::uint64_t seed = 0;
};

/// Parses and validates a JSON config. Unknown keys, wrong types and
/// out-of-range values throw ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The config with every default filled in, as pretty-printed JSON.
std::string resolved_config_json(const ExperimentConfig& config);

/// FNV-1a (64-bit) of the compact resolved config without output_path, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Optimizer seed of scan point `index`, derived from the master seed.
std::uint64_t point_seed(std::uint64_t master, std::size_t index);

struct ResultRecord {
  std::size_t point = 0;
  double scan_value = 0.0;
  bool ok = false;
  std::string error;
  double vqe_energy = 0.0;
  std::vector<double> ed_energies;  // one per config cutoff
  double squeezing_cost_db = 0.0;
  double subtraction_probability = 0.0;
  double purity = 0.0;
  std::size_t ladder_op_count = 0;
  int iterations = 0;
  bool converged = false;
  std::size_t failed_evaluations = 0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> best_params;  // JSON only
  std::vector<double> energy_trace;  // JSON only
};

/// Model and ansatz of one scan point.
struct ScanPoint {
  double value = 0.0;
  BoseHubbardParams model;
  AnsatzConfig ansatz;
};

std::vector<ScanPoint> scan_points(const ExperimentConfig& config);

ResultRecord run_point(const ExperimentConfig& config, const ScanPoint& point, std::size_t index);

struct ScanOutcome {
  std::vector<ResultRecord> records;
  /// 0 when every point succeeded, 2 when some failed.
  int exit_code = 0;
};

/// Runs every scan point in order.
ScanOutcome run_scan(const ExperimentConfig& config);

/// CSV text: header row and one row per record, 17 significant digits. Wall
/// time is left out so identical runs give identical bytes.
std::string records_csv(const ExperimentConfig& config, const std::vector<ResultRecord>& records);
std::string records_json(const ExperimentConfig& config, const std::vector<ResultRecord>& records);

/// Writes results.csv, results.json and config.resolved.json into `directory`
/// via temporary files and renames. Throws std::runtime_error on I/O failure.
void write_outputs(const std::filesystem::path& directory, const ExperimentConfig& config,
                   const std::vector<ResultRecord>& records);

/// Writes `contents` to `path` atomically (temporary file, then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace cvvqe
