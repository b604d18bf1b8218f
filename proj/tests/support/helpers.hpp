#pragma once

#include "doctest.h"
#include "support/builders.hpp"

namespace gasflex::testing {

inline RawSolution solve_optimal(const OptModel& model, const SolveOptions& options = {}) {
  SimplexMilpSolver solver;
  RawSolution r = solver.solve(model, options);
  REQUIRE(r.status == SolveStatus::kOptimal);
  return r;
}

inline ScheduleSolution solve_and_extract(const IntegratedSystem& sys, ModelMode mode,
                                          const FormulationConfig& config = {}) {
  FormulationArtifacts art = build_model(sys, mode, config);
  RawSolution raw = solve_optimal(art.model);
  return extract_schedule(art, raw, sys);
}

}  // namespace gasflex::testing
