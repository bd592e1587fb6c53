// radcrit: runs one configured computation and writes report.json plus CSVs.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "radcrit/cli.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/validate.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Criticality computations for radial p-Laplacian functionals"};
  std::string config_path, out, tol;
  std::uint64_t seed = 0;
  std::size_t levels = 0;
  bool list_suites = false;
  auto* cfg = app.add_option("--config", config_path, "run configuration (key = value)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized suites");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* tol_opt = app.add_option("--tol", tol, "solver residual tolerance override");
  auto* lev_opt = app.add_option("--levels", levels, "number of exhaustion levels")
                      ->check(CLI::PositiveNumber);
  app.add_flag("--list-suites", list_suites, "print the validation suites and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : radcrit::kExitValidation;
  }

  if (list_suites) {
    for (const auto& s : radcrit::validation_suites())
      std::cout << s.name << "  " << s.description << "\n";
    return 0;
  }
  if (cfg->count() == 0) {
    std::cerr << "radcrit: --config is required\n" << app.help();
    return radcrit::kExitValidation;
  }

  try {
    radcrit::RunConfig config = radcrit::load_config(config_path);
    if (seed_opt->count()) radcrit::apply_override(config, "seed", std::to_string(seed));
    if (out_opt->count()) radcrit::apply_override(config, "out", out);
    if (tol_opt->count()) {
      radcrit::parse_number(tol);
      radcrit::apply_override(config, "tol", tol);
    }
    if (lev_opt->count()) radcrit::apply_override(config, "levels", std::to_string(levels));
    const radcrit::RunResult r = radcrit::run(config, std::cerr);
    std::cout << radcrit::to_string(config.command) << ": " << r.summary << "\n"
              << "report: " << r.report_path << "\n";
    return r.exit_code;
  } catch (const radcrit::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return radcrit::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "radcrit: " << e.what() << "\n";
    return radcrit::kExitValidation;
  }
}
