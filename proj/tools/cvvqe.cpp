#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "cvvqe/experiment.hpp"
#include "cvvqe/fock.hpp"
#include "cvvqe/models.hpp"
#include "cvvqe/validation.hpp"

namespace {

cvvqe::ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? cvvqe::parse_config("{}") : cvvqe::load_config(path);
}

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  auto config = cvvqe::load_config(config_path);
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.output_path = out_dir;

  const auto outcome = cvvqe::run_scan(config);
  cvvqe::write_outputs(config.output_path, config, outcome.records);

  for (const auto& r : outcome.records) {
    if (r.ok) {
      std::cout << fmt::format("point {} value {:g}: E_vqe = {:.10f} ({} iterations, {:.2f}s)\n", r.point,
                               r.scan_value, r.vqe_energy, r.iterations, r.wall_time_seconds);
    } else {
      std::cout << fmt::format("point {} value {:g}: FAILED: {}\n", r.point, r.scan_value, r.error);
    }
  }
  std::cout << fmt::format("wrote {}/results.csv (config hash {})\n", config.output_path, cvvqe::config_hash(config));
  return outcome.exit_code;
}

int ed_command(const std::string& config_path, const std::vector<int>& cutoffs, const std::string& out_dir) {
  auto config = config_or_default(config_path);
  if (!cutoffs.empty()) config.ed_cutoffs = cutoffs;
  std::string csv = "n_max,energy\n";
  for (const int n_max : config.ed_cutoffs) {
    csv += fmt::format("{},{:.17g}\n", n_max, cvvqe::bh_ground_energy(config.model, n_max));
  }
  std::cout << csv;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    cvvqe::write_file_atomic(std::filesystem::path(out_dir) / "ed.csv", csv);
  }
  return 0;
}

int validate_command(bool quick, bool trace, std::optional<std::uint64_t> seed, const std::string& fault) {
  cvvqe::ValidationOptions options;
  options.quick = quick;
  if (seed) options.seed = *seed;
  if (trace) options.trace = &std::cout;
  if (fault == "flip-normal-order-sign") {
    options.fault = cvvqe::ContractionFault::flip_normal_order_sign;
  } else if (!fault.empty()) {
    throw cvvqe::ConfigError(fmt::format("unknown fault '{}'", fault));
  }
  const auto report = cvvqe::run_validation(options);
  cvvqe::print_report(std::cout, report);
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable VQE simulator for the Bose-Hubbard chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "optimize every scan point and write CSV/JSON results");
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out_dir, "output directory (overrides output_path)");

  std::vector<int> cutoffs;
  auto* ed = app.add_subcommand("ed", "exact-diagonalization ground energies as n_max,energy rows");
  ed->add_option("--config", config_path, "experiment config (JSON); defaults if omitted")->check(CLI::ExistingFile);
  ed->add_option("--cutoffs", cutoffs, "per-site occupation cutoffs (overrides ed_cutoffs)");
  ed->add_option("--out", out_dir, "also write ed.csv into this directory");

  bool quick = false;
  bool trace = false;
  std::string fault;
  auto* validate = app.add_subcommand("validate", "run the built-in consistency checks");
  validate->add_flag("--quick", quick, "reduced case counts");
  validate->add_flag("--trace-matchings", trace, "print every matching of the closed-form monomials");
  validate->add_option("--seed", seed, "seed for the randomized checks");
  validate->add_option("--inject-fault", fault, "corrupt the contraction table")->group("");

  auto* dump = app.add_subcommand("dump-hamiltonian", "print the model Hamiltonian as a ladder polynomial");
  dump->add_option("--config", config_path, "experiment config (JSON); defaults if omitted")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(config_path, seed, out_dir);
    if (*ed) return ed_command(config_path, cutoffs, out_dir);
    if (*validate) return validate_command(quick, trace, seed, fault);
    if (*dump) {
      cvvqe::write_polynomial(std::cout, cvvqe::bose_hubbard_polynomial(config_or_default(config_path).model));
      return 0;
    }
  } catch (const cvvqe::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 1;
}
