#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gasflex/model_ir.hpp"

namespace gasflex {

/// Backend failure (missing executable, protocol error, numerical breakdown).
/// Distinct from an infeasible model, which is a regular solve outcome.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  double mip_gap = 1e-6;        // relative
  double time_limit_sec = 3600.0;
  int threads = 0;              // hint only
  std::uint64_t seed = 0;       // hint only
};

enum class SolveStatus { kOptimal, kFeasibleLimit, kInfeasible, kUnbounded, kError };

const char* to_string(SolveStatus s);

struct SolveStats {
  double wall_time_sec = 0.0;
  double gap_achieved = 0.0;
  std::int64_t simplex_iterations = 0;
  std::int64_t branch_nodes = 0;
};

struct RawSolution {
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  std::vector<double> values;       // by variable id; meaningful iff has_values()
  std::vector<bool> value_present;  // per id; file backends may omit variables
  SolveStats stats;
  std::string message;

  bool has_values() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kFeasibleLimit;
  }
};

/// Backend contract: blocking solve of one model. Implementations must be
/// safe to use from multiple threads on distinct models.
class MilpSolver {
 public:
  virtual ~MilpSolver() = default;
  virtual RawSolution solve(const OptModel& model, const SolveOptions& options) = 0;
  virtual std::string name() const = 0;
};

/// In-process backend: bounded-variable primal simplex plus depth-first
/// branch and bound on binary variables. Deterministic.
class SimplexMilpSolver final : public MilpSolver {
 public:
  RawSolution solve(const OptModel& model, const SolveOptions& options) override;
  std::string name() const override { return "simplex"; }
};

/// Reference file-exchange backend: writes the model as free MPS, invokes an
/// external solver command as `<command> <model.mps> <solution.out>`, and
/// parses the solution document (see docs/formats.md for the protocol).
class ExternalMilpSolver final : public MilpSolver {
 public:
  /// Empty command falls back to the GASFLEX_SOLVER environment variable.
  explicit ExternalMilpSolver(std::string command = "");

  RawSolution solve(const OptModel& model, const SolveOptions& options) override;
  std::string name() const override { return "external"; }

  const std::string& command() const { return command_; }

 private:
  std::string command_;
};

std::unique_ptr<MilpSolver> make_solver(const std::string& backend, const std::string& command = "");

}  // namespace gasflex
