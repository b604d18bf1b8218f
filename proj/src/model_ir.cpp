#include "gasflex/model_ir.hpp"

#include <cmath>
#include <unordered_set>

namespace gasflex {

VarId OptModel::add_variable(VariableSpec spec) {
  if (std::isnan(spec.lower) || std::isnan(spec.upper) || spec.lower > spec.upper) {
    throw ModelError("inconsistent bounds for variable '" + spec.name + "': [" +
                     std::to_string(spec.lower) + ", " + std::to_string(spec.upper) + "]");
  }
  if (spec.kind == VarKind::kBinary) {
    if (spec.lower < 0.0 || spec.upper > 1.0) {
      throw ModelError("binary variable '" + spec.name + "' must have bounds within [0,1]");
    }
    ++num_binaries_;
  }
  variables_.push_back(std::move(spec));
  return static_cast<VarId>(variables_.size()) - 1;
}

void OptModel::check_terms(const LinearConstraint& c) const {
  std::unordered_set<VarId> seen;
  for (const LinearTerm& t : c.terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw ModelError("constraint '" + c.name + "' references unknown variable id " +
                       std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) {
      throw ModelError("constraint '" + c.name + "' has non-finite coefficient on '" +
                       variables_[t.var].name + "'");
    }
    if (!seen.insert(t.var).second) {
      throw ModelError("duplicate term for variable '" + variables_[t.var].name +
                       "' in constraint '" + c.name + "'");
    }
  }
  if (!std::isfinite(c.rhs)) {
    throw ModelError("constraint '" + c.name + "' has non-finite rhs");
  }
}

int OptModel::add_constraint(LinearConstraint c) {
  check_terms(c);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

void OptModel::add_objective_term(VarId var, double coef) {
  if (var < 0 || var >= num_variables()) {
    throw ModelError("objective references unknown variable id " + std::to_string(var));
  }
  if (!std::isfinite(coef)) {
    throw ModelError("objective coefficient on '" + variables_[var].name + "' is not finite");
  }
  for (LinearTerm& t : objective_) {
    if (t.var == var) {
      t.coef += coef;
      return;
    }
  }
  objective_.push_back({var, coef});
}

void OptModel::set_objective(std::vector<LinearTerm> terms) {
  objective_.clear();
  for (const LinearTerm& t : terms) add_objective_term(t.var, t.coef);
}

const VariableSpec& OptModel::variable(VarId id) const {
  if (id < 0 || id >= num_variables()) {
    throw ModelError("unknown variable id " + std::to_string(id));
  }
  return variables_[id];
}

}  // namespace gasflex
