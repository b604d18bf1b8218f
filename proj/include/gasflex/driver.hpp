#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gasflex/analysis.hpp"
#include "gasflex/schedule.hpp"
#include "gasflex/solver.hpp"
#include "gasflex/system.hpp"

namespace gasflex {

// Stable CLI exit contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;     // invalid data or configuration
inline constexpr int kExitIo = 2;          // missing files, unwritable outputs
inline constexpr int kExitInfeasible = 3;  // model infeasible
inline constexpr int kExitSolver = 4;      // backend failure

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An infeasible (or otherwise unsolved) window of a split-horizon run.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string msg, int window) : std::runtime_error(std::move(msg)), window(window) {}
  int window;  // 1-based
};

struct RunConfig {
  std::string system_path;
  std::string mode = "uni";  // uni | bi | both
  int expansion_point_count = 5;
  double pressure_resolution = 0.1;
  double flow_big_m_override = 0.0;
  double slope_big_m_override = 0.0;
  bool tightening = true;
  std::vector<int> split_points;  // 1-based first hour of each new window
  SolveOptions solve_options;
  std::string backend = "simplex";
  std::string solver_command;
  std::string output_dir = ".";
};

void check_config(const RunConfig& config, int horizon);

/// One full solve of the chosen mode, honoring horizon splitting: windows are
/// solved in sequence, each seeded with the previous window's terminal
/// linepack, and the terminal floor is enforced only on the last window
/// against the original initial linepack.
ScheduleSolution solve_schedule(const IntegratedSystem& system, ModelMode mode,
                                const RunConfig& config, MilpSolver& solver);

int cmd_validate(const std::string& path, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_compare(const RunConfig& config, std::ostream& out);

}  // namespace gasflex
