#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gasflex/formulation.hpp"
#include "gasflex/schedule.hpp"
#include "gasflex/solver.hpp"
#include "gasflex/system.hpp"

namespace gasflex::testing {

inline IntegratedSystem load_data(const std::string& name) {
  return load_system(std::string(GASFLEX_SOURCE_DIR) + "/data/" + name);
}

/// Copy of the model with the given variable grid pinned to a constant;
/// ids are preserved by dense re-insertion.
inline OptModel fix_grid(const OptModel& model, const std::vector<std::vector<VarId>>& grid,
                         double value) {
  std::vector<char> pin(model.num_variables(), 0);
  for (const auto& row : grid) {
    for (VarId id : row) {
      if (id >= 0) pin[id] = 1;
    }
  }
  OptModel out;
  for (VarId j = 0; j < model.num_variables(); ++j) {
    VariableSpec spec = model.variable(j);
    if (pin[j]) {
      spec.lower = value;
      spec.upper = value;
    }
    out.add_variable(std::move(spec));
  }
  for (const auto& c : model.constraints()) out.add_constraint(c);
  for (const auto& t : model.objective()) out.add_objective_term(t.var, t.coef);
  return out;
}

/// Terse in-test construction of integrated systems.
class SystemBuilder {
 public:
  explicit SystemBuilder(int horizon) { sys_.horizon = horizon; }

  SystemBuilder& pnode(std::string id, bool reference = false) {
    sys_.power.nodes.push_back({std::move(id), reference});
    return *this;
  }
  SystemBuilder& gnode(std::string id, double lo, double hi) {
    sys_.gas.nodes.push_back({std::move(id), lo, hi});
    return *this;
  }
  SystemBuilder& line(std::string from, std::string to, double b, double cap) {
    sys_.power.lines.push_back({std::move(from), std::move(to), b, cap, -1, -1});
    return *this;
  }
  SystemBuilder& gen(std::string id, std::string node, double pmax, double cost) {
    Generator g;
    g.id = std::move(id);
    g.node = std::move(node);
    g.pmax = pmax;
    g.cost = cost;
    sys_.power.generators.push_back(std::move(g));
    return *this;
  }
  SystemBuilder& gfpp(std::string id, std::string node, double pmax, double eta,
                      std::string gas_node) {
    Generator g;
    g.id = std::move(id);
    g.node = std::move(node);
    g.pmax = pmax;
    g.gfpp = true;
    g.conversion = eta;
    g.gas_node = std::move(gas_node);
    sys_.power.generators.push_back(std::move(g));
    return *this;
  }
  SystemBuilder& wind(std::string id, std::string node, std::vector<double> forecast) {
    sys_.power.wind_farms.push_back({std::move(id), std::move(node), std::move(forecast), -1});
    return *this;
  }
  SystemBuilder& eload(std::string id, std::string node, std::vector<double> demand) {
    sys_.power.loads.push_back({std::move(id), std::move(node), std::move(demand), -1});
    return *this;
  }
  SystemBuilder& pipe(std::string from, std::string to, double k, double s, double h0,
                      double gamma = 1.0) {
    Pipeline z;
    z.from = std::move(from);
    z.to = std::move(to);
    z.weymouth = k;
    z.linepack = s;
    z.initial_linepack = h0;
    z.compression = gamma;
    sys_.gas.pipelines.push_back(std::move(z));
    return *this;
  }
  SystemBuilder& supplier(std::string id, std::string node, double gmax, double cost) {
    sys_.gas.suppliers.push_back({std::move(id), std::move(node), gmax, cost, -1});
    return *this;
  }
  SystemBuilder& gload(std::string id, std::string node, std::vector<double> demand) {
    sys_.gas.loads.push_back({std::move(id), std::move(node), std::move(demand), -1});
    return *this;
  }

  IntegratedSystem build() {
    sys_.finalize();
    return sys_;
  }

 private:
  IntegratedSystem sys_;
};

}  // namespace gasflex::testing
