#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gasflex/driver.hpp"

namespace {

void add_run_options(CLI::App* cmd, gasflex::RunConfig& config) {
  cmd->add_option("file", config.system_path, "system description file")->required();
  cmd->add_option("--points", config.expansion_point_count,
                  "Taylor expansion points per pipeline")
      ->capture_default_str();
  cmd->add_option("--eps-pr", config.pressure_resolution,
                  "pressure resolution [bar] behind the slope big-M")
      ->capture_default_str();
  cmd->add_flag("--no-tightening{false}", config.tightening,
                "drop the pressure-ordering and zero-difference tightening constraints");
  cmd->add_option("--split", config.split_points,
                  "split the horizon before these hours, handing linepack forward")
      ->delimiter(',');
  cmd->add_option("--flow-big-m", config.flow_big_m_override, "override the per-pipeline flow big-M");
  cmd->add_option("--slope-big-m", config.slope_big_m_override,
                  "override the per-pipeline slope big-M");
  cmd->add_option("--gap", config.solve_options.mip_gap, "relative MIP gap")
      ->capture_default_str();
  cmd->add_option("--time-limit", config.solve_options.time_limit_sec, "solve time limit [s]")
      ->capture_default_str();
  cmd->add_option("--backend", config.backend, "solver backend: simplex | external")
      ->capture_default_str();
  cmd->add_option("--solver", config.solver_command,
                  "external solver command (default: GASFLEX_SOLVER environment variable)");
  cmd->add_option("--out", config.output_dir, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integrated power-gas day-ahead scheduling with unidirectional and "
               "bidirectional gas flow models"};
  app.set_config("--config");
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a system file and list violations");
  validate->add_option("file", validate_path, "system description file")->required();

  gasflex::RunConfig solve_config;
  CLI::App* solve = app.add_subcommand("solve", "solve one or both gas flow models");
  solve->add_option("--mode", solve_config.mode, "uni | bi | both")->capture_default_str();
  add_run_options(solve, solve_config);

  gasflex::RunConfig compare_config;
  compare_config.mode = "both";
  CLI::App* compare =
      app.add_subcommand("compare", "solve both models and emit comparison reports");
  add_run_options(compare, compare_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gasflex::kExitInvalid;
  }

  if (validate->parsed()) return gasflex::cmd_validate(validate_path, std::cout);
  if (solve->parsed()) return gasflex::cmd_solve(solve_config, std::cout);
  return gasflex::cmd_compare(compare_config, std::cout);
}
