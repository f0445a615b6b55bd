#include "cvvqe/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "cvvqe/fock.hpp"

namespace cvvqe {

using nlohmann::json;

std::string to_string(ScanParameter parameter) {
  switch (parameter) {
    case ScanParameter::U: return "U";
    case ScanParameter::t: return "t";
    case ScanParameter::mu: return "mu";
    case ScanParameter::subtractions: return "subtractions";
  }
  return "?";
}

ScanParameter scan_parameter_from_string(const std::string& name) {
  if (name == "U") return ScanParameter::U;
  if (name == "t" || name == "J") return ScanParameter::t;
  if (name == "mu") return ScanParameter::mu;
  if (name == "subtractions") return ScanParameter::subtractions;
  throw ConfigError(fmt::format("unknown scan parameter '{}' (expected U, t, mu or subtractions)", name));
}

AnsatzConfig AnsatzSpec::build(int n_sites) const {
  AnsatzConfig config;
  config.n_modes = n_modes.value_or(n_sites);
  config.prep = prep ? parse_polynomial(*prep) : LadderPolynomial::subtractions(subtraction_mode - 1, subtractions);
  config.layers = layers;
  config.purity_target = purity_target;
  config.tap_reflectivity = tap_reflectivity;
  return config;
}

namespace {

void reject_unknown(const json& object, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!object.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : object.items()) {
    if (!keys.contains(item.key())) throw ConfigError(fmt::format("unknown key '{}' in {}", item.key(), where));
  }
}

double read_number(const json& object, const char* key, const std::string& where, double fallback) {
  if (!object.contains(key)) return fallback;
  const auto& value = object.at(key);
  if (!value.is_number()) throw ConfigError(fmt::format("{}.{} must be a number", where, key));
  const double number = value.get<double>();
  if (!std::isfinite(number)) throw ConfigError(fmt::format("{}.{} must be finite", where, key));
  return number;
}

long long read_integer(const json& object, const char* key, const std::string& where, long long fallback) {
  if (!object.contains(key)) return fallback;
  const auto& value = object.at(key);
  if (!value.is_number_integer()) throw ConfigError(fmt::format("{}.{} must be an integer", where, key));
  return value.get<long long>();
}

std::string read_string(const json& object, const char* key, const std::string& where, std::string fallback) {
  if (!object.contains(key)) return fallback;
  const auto& value = object.at(key);
  if (!value.is_string()) throw ConfigError(fmt::format("{}.{} must be a string", where, key));
  return value.get<std::string>();
}

int to_int(long long value, const std::string& name) {
  if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
    throw ConfigError(fmt::format("{} is out of range", name));
  }
  return static_cast<int>(value);
}

BoseHubbardParams parse_model(const json& node) {
  reject_unknown(node, "model", {"n_sites", "hopping", "interaction", "chemical_potential", "boundary"});
  BoseHubbardParams model;
  model.n_sites = to_int(read_integer(node, "n_sites", "model", model.n_sites), "model.n_sites");
  model.hopping = read_number(node, "hopping", "model", model.hopping);
  model.interaction = read_number(node, "interaction", "model", model.interaction);
  model.chemical_potential = read_number(node, "chemical_potential", "model", model.chemical_potential);
  try {
    model.boundary = boundary_from_string(read_string(node, "boundary", "model", to_string(model.boundary)));
    model.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(fmt::format("model: {}", error.what()));
  }
  return model;
}

AnsatzSpec parse_ansatz(const json& node) {
  reject_unknown(node, "ansatz", {"n_modes", "subtractions", "subtraction_mode", "prep", "layers", "purity_target",
                                  "tap_reflectivity"});
  AnsatzSpec spec;
  if (node.contains("n_modes")) spec.n_modes = to_int(read_integer(node, "n_modes", "ansatz", 0), "ansatz.n_modes");
  spec.subtractions = to_int(read_integer(node, "subtractions", "ansatz", spec.subtractions), "ansatz.subtractions");
  spec.subtraction_mode =
      to_int(read_integer(node, "subtraction_mode", "ansatz", spec.subtraction_mode), "ansatz.subtraction_mode");
  if (node.contains("prep")) {
    if (node.contains("subtractions") || node.contains("subtraction_mode")) {
      throw ConfigError("ansatz.prep cannot be combined with ansatz.subtractions or ansatz.subtraction_mode");
    }
    spec.prep = read_string(node, "prep", "ansatz", "");
  }
  spec.layers = to_int(read_integer(node, "layers", "ansatz", spec.layers), "ansatz.layers");
  spec.purity_target = read_number(node, "purity_target", "ansatz", spec.purity_target);
  spec.tap_reflectivity = read_number(node, "tap_reflectivity", "ansatz", spec.tap_reflectivity);
  if (spec.subtractions < 0) throw ConfigError("ansatz.subtractions must be non-negative");
  if (spec.subtraction_mode < 1) throw ConfigError("ansatz.subtraction_mode is 1-based and must be positive");
  return spec;
}

OptimizerConfig parse_optimizer(const json& node) {
  reject_unknown(node, "optimizer", {"max_iterations", "gradient_step", "convergence_tol", "restarts", "init_scale",
                                     "max_init_attempts", "threads"});
  OptimizerConfig opt;
  opt.max_iterations =
      to_int(read_integer(node, "max_iterations", "optimizer", opt.max_iterations), "optimizer.max_iterations");
  opt.gradient_step = read_number(node, "gradient_step", "optimizer", opt.gradient_step);
  opt.convergence_tol = read_number(node, "convergence_tol", "optimizer", opt.convergence_tol);
  opt.restarts = to_int(read_integer(node, "restarts", "optimizer", opt.restarts), "optimizer.restarts");
  opt.init_scale = read_number(node, "init_scale", "optimizer", opt.init_scale);
  opt.max_init_attempts = to_int(read_integer(node, "max_init_attempts", "optimizer", opt.max_init_attempts),
                                 "optimizer.max_init_attempts");
  const auto threads = read_integer(node, "threads", "optimizer", 0);
  if (threads < 0) throw ConfigError("optimizer.threads must be non-negative");
  opt.threads = static_cast<unsigned>(to_int(threads, "optimizer.threads"));
  try {
    opt.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(fmt::format("optimizer: {}", error.what()));
  }
  return opt;
}

ScanSpec parse_scan(const json& node) {
  reject_unknown(node, "scan", {"parameter", "values"});
  if (!node.contains("parameter")) throw ConfigError("scan.parameter is required");
  if (!node.contains("values")) throw ConfigError("scan.values is required");
  ScanSpec scan;
  scan.parameter = scan_parameter_from_string(read_string(node, "parameter", "scan", ""));
  const auto& values = node.at("values");
  if (!values.is_array()) throw ConfigError("scan.values must be an array");
  if (values.empty()) throw ConfigError("scan.values must not be empty");
  for (const auto& value : values) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw ConfigError("scan.values must contain finite numbers");
    }
    if (scan.parameter == ScanParameter::subtractions && (!value.is_number_integer() || value.get<long long>() < 0)) {
      throw ConfigError("subtraction scan values must be non-negative integers");
    }
    scan.values.push_back(value.get<double>());
  }
  return scan;
}

json resolved(const ExperimentConfig& config) {
  json model = {{"n_sites", config.model.n_sites},
                {"hopping", config.model.hopping},
                {"interaction", config.model.interaction},
                {"chemical_potential", config.model.chemical_potential},
                {"boundary", to_string(config.model.boundary)}};
  const auto& a = config.ansatz;
  json ansatz = {{"n_modes", a.n_modes.value_or(config.model.n_sites)},
                 {"layers", a.layers},
                 {"purity_target", a.purity_target},
                 {"tap_reflectivity", a.tap_reflectivity}};
  if (a.prep) {
    ansatz["prep"] = *a.prep;
  } else {
    ansatz["subtractions"] = a.subtractions;
    ansatz["subtraction_mode"] = a.subtraction_mode;
  }
  const auto& o = config.optimizer;
  json optimizer = {{"max_iterations", o.max_iterations}, {"gradient_step", o.gradient_step},
                    {"convergence_tol", o.convergence_tol}, {"restarts", o.restarts},
                    {"init_scale", o.init_scale},         {"max_init_attempts", o.max_init_attempts},
                    {"threads", o.threads}};
  json out = {{"model", model},
              {"ansatz", ansatz},
              {"optimizer", optimizer},
              {"ed_cutoffs", config.ed_cutoffs},
              {"output_path", config.output_path},
              {"seed", config.seed}};
  if (config.scan) {
    out["scan"] = {{"parameter", to_string(config.scan->parameter)}, {"values", config.scan->values}};
  } else {
    out["scan"] = nullptr;
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& error) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", error.what()));
  }
  reject_unknown(root, "config", {"model", "ansatz", "optimizer", "scan", "ed_cutoffs", "output_path", "seed"});

  ExperimentConfig config;
  config.model = parse_model(root.value("model", json::object()));
  config.ansatz = parse_ansatz(root.value("ansatz", json::object()));
  config.optimizer = parse_optimizer(root.value("optimizer", json::object()));
  if (root.contains("scan") && !root.at("scan").is_null()) config.scan = parse_scan(root.at("scan"));

  if (root.contains("ed_cutoffs")) {
    const auto& cutoffs = root.at("ed_cutoffs");
    if (!cutoffs.is_array()) throw ConfigError("ed_cutoffs must be an array");
    config.ed_cutoffs.clear();
    for (const auto& value : cutoffs) {
      if (!value.is_number_integer() || value.get<long long>() < 1) {
        throw ConfigError("ed_cutoffs must contain positive integers");
      }
      config.ed_cutoffs.push_back(to_int(value.get<long long>(), "ed_cutoffs"));
    }
  }
  config.output_path = read_string(root, "output_path", "config", config.output_path);
  if (root.contains("seed")) {
    const auto& seed = root.at("seed");
    if (!seed.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    config.seed = seed.get<std::uint64_t>();
  }

  if (config.ansatz.n_modes && *config.ansatz.n_modes != config.model.n_sites) {
    throw ConfigError(fmt::format("ansatz.n_modes ({}) must equal model.n_sites ({})", *config.ansatz.n_modes,
                                  config.model.n_sites));
  }
  if (config.scan && config.scan->parameter == ScanParameter::subtractions && config.ansatz.prep) {
    throw ConfigError("a subtraction scan needs ansatz.subtractions, not an explicit ansatz.prep");
  }
  try {
    for (const auto& point : scan_points(config)) {
      point.ansatz.validate();
      if (point.ansatz.n_modes != point.model.n_sites) throw ConfigError("ansatz modes must match model sites");
    }
    for (const int cutoff : config.ed_cutoffs) FockSpace(config.model.n_sites, cutoff);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& error) {
    throw ConfigError(error.what());
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string resolved_config_json(const ExperimentConfig& config) { return resolved(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  auto content = resolved(config);
  content.erase("output_path");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : content.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

std::uint64_t point_seed(std::uint64_t master, std::size_t index) {
  // splitmix64 step
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<ScanPoint> scan_points(const ExperimentConfig& config) {
  std::vector<ScanPoint> points;
  const auto make = [&](double value, BoseHubbardParams model, AnsatzSpec spec) {
    points.push_back({value, model, spec.build(model.n_sites)});
  };
  if (!config.scan) {
    make(0.0, config.model, config.ansatz);
    return points;
  }
  for (const double value : config.scan->values) {
    auto model = config.model;
    auto spec = config.ansatz;
    switch (config.scan->parameter) {
      case ScanParameter::U: model.interaction = value; break;
      case ScanParameter::t: model.hopping = value; break;
      case ScanParameter::mu: model.chemical_potential = value; break;
      case ScanParameter::subtractions: spec.subtractions = static_cast<int>(value); break;
    }
    make(value, model, spec);
  }
  return points;
}

ResultRecord run_point(const ExperimentConfig& config, const ScanPoint& point, std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord record;
  record.point = index;
  record.scan_value = point.value;
  record.seed = point_seed(config.seed, index);
  try {
    auto opt = config.optimizer;
    opt.rng_seed = record.seed;
    const auto result = optimize(point.ansatz, bose_hubbard_polynomial(point.model), opt);
    record.vqe_energy = result.best_energy;
    record.squeezing_cost_db = result.resources.squeezing_cost_db;
    record.subtraction_probability = result.resources.subtraction_probability;
    record.purity = result.resources.purity;
    record.ladder_op_count = result.resources.ladder_op_count;
    record.iterations = result.iterations;
    record.converged = result.converged;
    record.failed_evaluations = result.failed_evaluations;
    record.best_params = result.best_params;
    record.energy_trace = result.energy_trace;
    for (const int cutoff : config.ed_cutoffs) record.ed_energies.push_back(bh_ground_energy(point.model, cutoff));
    record.ok = true;
  } catch (const std::exception& error) {
    record.ok = false;
    record.error = error.what();
    record.ed_energies.clear();
  }
  record.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

ScanOutcome run_scan(const ExperimentConfig& config) {
  ScanOutcome outcome;
  const auto points = scan_points(config);
  for (std::size_t i = 0; i < points.size(); ++i) {
    outcome.records.push_back(run_point(config, points[i], i));
    if (!outcome.records.back().ok) outcome.exit_code = 2;
  }
  return outcome;
}

namespace {

std::string number(double value) { return fmt::format("{:.17g}", value); }

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

}  // namespace

std::string records_csv(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  const std::string hash = config_hash(config);
  const std::string parameter = config.scan ? to_string(config.scan->parameter) : "none";

  std::string out = "schema_version,config_hash,point,scan_parameter,scan_value,status,vqe_energy";
  for (const int cutoff : config.ed_cutoffs) out += fmt::format(",ed_energy_nmax_{}", cutoff);
  out += ",squeezing_cost_db,subtraction_probability,purity,ladder_op_count,iterations,converged,"
         "failed_evaluations,seed,error\n";

  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{}", kResultSchemaVersion, hash, r.point, parameter, number(r.scan_value),
                       r.ok ? "ok" : "failed");
    if (r.ok) {
      out += "," + number(r.vqe_energy);
      for (const double e : r.ed_energies) out += "," + number(e);
      out += fmt::format(",{},{},{},{},{},{},{},{},", number(r.squeezing_cost_db), number(r.subtraction_probability),
                         number(r.purity), r.ladder_op_count, r.iterations, r.converged ? "true" : "false",
                         r.failed_evaluations, r.seed);
    } else {
      out += std::string(1 + config.ed_cutoffs.size() + 7, ',') + fmt::format(",{},{}", r.seed, csv_quote(r.error));
    }
    out += "\n";
  }
  return out;
}

std::string records_json(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  json rows = json::array();
  for (const auto& r : records) {
    json row = {{"point", r.point},
                {"scan_value", r.scan_value},
                {"status", r.ok ? "ok" : "failed"},
                {"wall_time_seconds", r.wall_time_seconds},
                {"seed", r.seed}};
    if (r.ok) {
      json ed = json::object();
      for (std::size_t i = 0; i < r.ed_energies.size(); ++i) {
        ed[std::to_string(config.ed_cutoffs[i])] = r.ed_energies[i];
      }
      row["vqe_energy"] = r.vqe_energy;
      row["ed_energies"] = ed;
      row["squeezing_cost_db"] = r.squeezing_cost_db;
      row["subtraction_probability"] =
          std::isfinite(r.subtraction_probability) ? json(r.subtraction_probability) : json(nullptr);
      row["purity"] = r.purity;
      row["ladder_op_count"] = r.ladder_op_count;
      row["iterations"] = r.iterations;
      row["converged"] = r.converged;
      row["failed_evaluations"] = r.failed_evaluations;
      row["best_params"] = r.best_params;
      row["energy_trace"] = r.energy_trace;
    } else {
      row["error"] = r.error;
    }
    rows.push_back(std::move(row));
  }
  json out = {{"schema_version", kResultSchemaVersion},
              {"config_hash", config_hash(config)},
              {"scan_parameter", config.scan ? to_string(config.scan->parameter) : "none"},
              {"config", resolved(config)},
              {"records", rows}};
  return out.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", temporary.string()));
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", temporary.string()));
  }
  std::error_code ec;
  std::filesystem::rename(temporary, path, ec);
  if (ec) {
    std::filesystem::remove(temporary, ec);
    throw std::runtime_error(fmt::format("cannot move results into '{}'", path.string()));
  }
}

void write_outputs(const std::filesystem::path& directory, const ExperimentConfig& config,
                   const std::vector<ResultRecord>& records) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create output directory '{}'", directory.string()));
  write_file_atomic(directory / "config.resolved.json", resolved_config_json(config));
  write_file_atomic(directory / "results.csv", records_csv(config, records));
  write_file_atomic(directory / "results.json", records_json(config, records));
}

}  // namespace cvvqe
