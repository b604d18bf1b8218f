#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasflex {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when a model is built or queried inconsistently (bad bounds,
/// unknown variable ids, duplicate terms).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarKind { kContinuous, kBinary };

using VarId = std::int32_t;

struct VariableSpec {
  VarKind kind = VarKind::kContinuous;
  double lower = -kInfinity;
  double upper = kInfinity;
  std::string name;
};

struct LinearTerm {
  VarId var = -1;
  double coef = 0.0;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

/// Solver-agnostic in-memory LP/MILP: dense consecutive variable ids,
/// row-wise constraints, minimize-only linear objective.
class OptModel {
 public:
  VarId add_variable(VariableSpec spec);
  int add_constraint(LinearConstraint c);

  void add_objective_term(VarId var, double coef);
  void set_objective(std::vector<LinearTerm> terms);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const { return num_binaries_; }

  const VariableSpec& variable(VarId id) const;
  const std::vector<VariableSpec>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<LinearTerm>& objective() const { return objective_; }

 private:
  void check_terms(const LinearConstraint& c) const;

  std::vector<VariableSpec> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<LinearTerm> objective_;
  int num_binaries_ = 0;
};

/// Writes the model as a free-format MPS document (minimization, integrality
/// markers for binaries, names preserved). Variables without a name get a
/// synthesized one; a note per synthesis is appended to `warnings` if given.
std::string write_mps(const OptModel& model, std::vector<std::string>* warnings = nullptr);

/// Variable names exactly as the MPS writer emits them (synthesized and
/// de-duplicated where needed); index == variable id.
std::vector<std::string> mps_variable_names(const OptModel& model);

}  // namespace gasflex
