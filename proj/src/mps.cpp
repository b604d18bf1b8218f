#include <cctype>
#include <cstdio>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gasflex/model_ir.hpp"

namespace gasflex {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool needs_synthesis(const std::string& name) {
  if (name.empty()) return true;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

// MPS names must be unique and whitespace-free.
std::vector<std::string> resolve_names(const OptModel& model, std::vector<std::string>* warnings) {
  std::vector<std::string> out(model.num_variables());
  std::unordered_set<std::string> used;
  for (VarId id = 0; id < model.num_variables(); ++id) {
    std::string name = model.variable(id).name;
    if (needs_synthesis(name)) {
      name = "x" + std::to_string(id);
      if (warnings) warnings->push_back("variable id " + std::to_string(id) + ": synthesized name '" + name + "'");
    }
    while (!used.insert(name).second) {
      name += "__" + std::to_string(id);
      if (warnings) warnings->push_back("variable id " + std::to_string(id) + ": deduplicated name to '" + name + "'");
    }
    out[id] = std::move(name);
  }
  return out;
}

}  // namespace

std::vector<std::string> mps_variable_names(const OptModel& model) {
  return resolve_names(model, nullptr);
}

std::string write_mps(const OptModel& model, std::vector<std::string>* warnings) {
  const std::vector<std::string> var_names = resolve_names(model, warnings);

  std::vector<std::string> row_names(model.num_constraints());
  std::unordered_set<std::string> used_rows = {"OBJ"};
  for (int r = 0; r < model.num_constraints(); ++r) {
    std::string name = model.constraints()[r].name;
    if (needs_synthesis(name)) name = "c" + std::to_string(r);
    while (!used_rows.insert(name).second) name += "__" + std::to_string(r);
    row_names[r] = std::move(name);
  }

  // Column-wise entries: objective first, then constraint rows in order.
  struct Entry {
    const std::string* row;
    double coef;
  };
  static const std::string kObjRow = "OBJ";
  std::vector<std::vector<Entry>> columns(model.num_variables());
  for (const LinearTerm& t : model.objective()) {
    columns[t.var].push_back({&kObjRow, t.coef});
  }
  for (int r = 0; r < model.num_constraints(); ++r) {
    for (const LinearTerm& t : model.constraints()[r].terms) {
      columns[t.var].push_back({&row_names[r], t.coef});
    }
  }

  std::string doc;
  doc.reserve(256 + 64 * static_cast<size_t>(model.num_variables() + model.num_constraints()));
  doc += "NAME gasflex\nROWS\n N OBJ\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    char sense = 'L';
    switch (model.constraints()[r].sense) {
      case Sense::kLessEqual: sense = 'L'; break;
      case Sense::kEqual: sense = 'E'; break;
      case Sense::kGreaterEqual: sense = 'G'; break;
    }
    doc += std::string(" ") + sense + " " + row_names[r] + "\n";
  }

  doc += "COLUMNS\n";
  bool in_integer_block = false;
  int marker_count = 0;
  for (VarId id = 0; id < model.num_variables(); ++id) {
    const bool integral = model.variable(id).kind == VarKind::kBinary;
    if (integral != in_integer_block) {
      doc += "    MARKER" + std::to_string(marker_count++) + " 'MARKER' " +
             (integral ? "'INTORG'" : "'INTEND'") + "\n";
      in_integer_block = integral;
    }
    if (columns[id].empty()) {
      // Keep columns that appear in no row visible to the solver.
      doc += "    " + var_names[id] + " OBJ 0\n";
      continue;
    }
    for (const Entry& e : columns[id]) {
      doc += "    " + var_names[id] + " " + *e.row + " " + fmt(e.coef) + "\n";
    }
  }
  if (in_integer_block) {
    doc += "    MARKER" + std::to_string(marker_count++) + " 'MARKER' 'INTEND'\n";
  }

  doc += "RHS\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    doc += "    RHS " + row_names[r] + " " + fmt(model.constraints()[r].rhs) + "\n";
  }

  // Explicit bounds for every variable; MPS defaults are not relied upon.
  doc += "BOUNDS\n";
  for (VarId id = 0; id < model.num_variables(); ++id) {
    const VariableSpec& v = model.variable(id);
    const std::string& n = var_names[id];
    if (v.kind == VarKind::kBinary && v.lower == 0.0 && v.upper == 1.0) {
      doc += " BV BND " + n + "\n";
      continue;
    }
    const bool lo_finite = v.lower > -kInfinity;
    const bool up_finite = v.upper < kInfinity;
    if (lo_finite && up_finite && v.lower == v.upper) {
      doc += " FX BND " + n + " " + fmt(v.lower) + "\n";
      continue;
    }
    if (!lo_finite && !up_finite) {
      doc += " FR BND " + n + "\n";
      continue;
    }
    if (lo_finite) {
      doc += " LO BND " + n + " " + fmt(v.lower) + "\n";
    } else {
      doc += " MI BND " + n + "\n";
    }
    if (up_finite) {
      doc += " UP BND " + n + " " + fmt(v.upper) + "\n";
    }
  }
  doc += "ENDATA\n";
  return doc;
}

}  // namespace gasflex
