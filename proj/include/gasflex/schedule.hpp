#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gasflex/formulation.hpp"
#include "gasflex/solver.hpp"
#include "gasflex/system.hpp"

namespace gasflex {

/// Raised when a raw solution cannot be turned into a typed schedule:
/// missing values, out-of-bounds values, or a non-binary direction value.
class ExtractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimal values of every decision variable per entity per hour. Vectors are
/// indexed [entity][hour]; bidirectional-only fields are empty in uni runs,
/// and entries without a backing variable (compressor-pipeline phi) are NaN.
struct ScheduleSolution {
  ModelMode mode = ModelMode::kUnidirectional;
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  int horizon = 0;
  SolveStats stats;

  std::vector<std::vector<double>> p, w, theta, f;
  std::vector<std::vector<double>> g, pr, q, q_in, q_out, h;
  std::vector<std::vector<double>> q_pos, q_neg, q_in_rev, q_out_rev, y, phi_from, phi_to;
};

ScheduleSolution extract_schedule(const FormulationArtifacts& artifacts, const RawSolution& raw,
                                  const IntegratedSystem& system);

/// Solution document round trip (JSON, schema_version 1, full precision).
std::string serialize_schedule(const ScheduleSolution& schedule, const IntegratedSystem& system);
ScheduleSolution parse_schedule(const std::string& text, const IntegratedSystem& system);

/// Stable per-entity keys used in solution and report documents.
std::vector<std::string> pipeline_keys(const IntegratedSystem& system);
std::vector<std::string> line_keys(const IntegratedSystem& system);

}  // namespace gasflex
