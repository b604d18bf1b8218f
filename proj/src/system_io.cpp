#include <cmath>
#include <fstream>
#include <sstream>

#include "gasflex/system.hpp"
#include "json.hpp"

namespace gasflex {

using nlohmann::json;

namespace {

const json& member(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw LoadError(path + "." + key + ": missing");
  return *it;
}

double number(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number()) throw LoadError(path + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<double>();
}

std::string text(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_string()) throw LoadError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& array(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_array()) throw LoadError(path + "." + key + ": expected an array");
  return v;
}

std::vector<double> series(const json& root, const char* group, const std::string& id,
                           int horizon) {
  const std::string path = std::string("series.") + group;
  const json& g = member(member(root, "series", "$"), group, "series");
  auto it = g.find(id);
  if (it == g.end()) throw LoadError(path + "." + id + ": missing series");
  if (!it->is_array()) throw LoadError(path + "." + id + ": expected an array");
  std::vector<double> out = it->get<std::vector<double>>();
  if (static_cast<int>(out.size()) != horizon) {
    throw LoadError(path + "." + id + ": series length " + std::to_string(out.size()) +
                    " does not match horizon " + std::to_string(horizon));
  }
  return out;
}

void check_units(const json& meta) {
  const json& units = member(meta, "units", "meta");
  const struct {
    const char* key;
    const char* expected;
  } want[] = {{"pressure", "bar"}, {"power", "MW"}, {"gas", "MWh/h"}};
  for (const auto& w : want) {
    const std::string got = text(units, w.key, "meta.units");
    if (got != w.expected) {
      throw LoadError(std::string("meta.units.") + w.key + ": unsupported unit '" + got +
                      "' (expected '" + w.expected + "')");
    }
  }
}

}  // namespace

void IntegratedSystem::finalize() {
  power_node_index.clear();
  gas_node_index.clear();
  reference_node = -1;
  for (size_t i = 0; i < power.nodes.size(); ++i) {
    if (!power_node_index.emplace(power.nodes[i].id, static_cast<int>(i)).second) {
      throw LoadError("power.nodes: duplicate id '" + power.nodes[i].id + "'");
    }
    if (power.nodes[i].reference && reference_node < 0) reference_node = static_cast<int>(i);
  }
  for (size_t i = 0; i < gas.nodes.size(); ++i) {
    if (!gas_node_index.emplace(gas.nodes[i].id, static_cast<int>(i)).second) {
      throw LoadError("gas.nodes: duplicate id '" + gas.nodes[i].id + "'");
    }
  }

  auto pnode = [&](const std::string& id, const std::string& path) {
    auto it = power_node_index.find(id);
    if (it == power_node_index.end()) throw LoadError(path + ": unknown power node '" + id + "'");
    return it->second;
  };
  auto gnode = [&](const std::string& id, const std::string& path) {
    auto it = gas_node_index.find(id);
    if (it == gas_node_index.end()) throw LoadError(path + ": unknown gas node '" + id + "'");
    return it->second;
  };

  const size_t np = power.nodes.size(), ng = gas.nodes.size();
  generators_at.assign(np, {});
  wind_at.assign(np, {});
  eloads_at.assign(np, {});
  lines_from.assign(np, {});
  lines_to.assign(np, {});
  suppliers_at.assign(ng, {});
  gfpps_at.assign(ng, {});
  gloads_at.assign(ng, {});
  pipes_from.assign(ng, {});
  pipes_to.assign(ng, {});

  for (size_t i = 0; i < power.lines.size(); ++i) {
    Line& l = power.lines[i];
    const std::string path = "power.lines[" + std::to_string(i) + "]";
    l.from_idx = pnode(l.from, path + ".from");
    l.to_idx = pnode(l.to, path + ".to");
    lines_from[l.from_idx].push_back(static_cast<int>(i));
    lines_to[l.to_idx].push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < power.generators.size(); ++i) {
    Generator& g = power.generators[i];
    const std::string path = "power.generators[" + std::to_string(i) + "]";
    g.node_idx = pnode(g.node, path + ".node");
    generators_at[g.node_idx].push_back(static_cast<int>(i));
    if (g.gfpp) {
      g.gas_node_idx = gnode(g.gas_node, path + ".gas_node");
      gfpps_at[g.gas_node_idx].push_back(static_cast<int>(i));
    }
  }
  for (size_t i = 0; i < power.wind_farms.size(); ++i) {
    WindFarm& w = power.wind_farms[i];
    w.node_idx = pnode(w.node, "power.wind[" + std::to_string(i) + "].node");
    wind_at[w.node_idx].push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < power.loads.size(); ++i) {
    ElectricLoad& l = power.loads[i];
    l.node_idx = pnode(l.node, "power.loads[" + std::to_string(i) + "].node");
    eloads_at[l.node_idx].push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < gas.pipelines.size(); ++i) {
    Pipeline& z = gas.pipelines[i];
    const std::string path = "gas.pipelines[" + std::to_string(i) + "]";
    z.from_idx = gnode(z.from, path + ".from");
    z.to_idx = gnode(z.to, path + ".to");
    pipes_from[z.from_idx].push_back(static_cast<int>(i));
    pipes_to[z.to_idx].push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < gas.suppliers.size(); ++i) {
    GasSupplier& k = gas.suppliers[i];
    k.node_idx = gnode(k.node, "gas.suppliers[" + std::to_string(i) + "].node");
    suppliers_at[k.node_idx].push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < gas.loads.size(); ++i) {
    GasLoad& d = gas.loads[i];
    d.node_idx = gnode(d.node, "gas.loads[" + std::to_string(i) + "].node");
    gloads_at[d.node_idx].push_back(static_cast<int>(i));
  }
}

IntegratedSystem parse_system(const std::string& document, const std::string& origin) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::exception& e) {
    throw LoadError(origin + ": not valid JSON: " + e.what());
  }

  const int version = static_cast<int>(number(root, "format_version", "$"));
  if (version != 1) {
    throw LoadError("format_version: unsupported version " + std::to_string(version));
  }
  const json& meta = member(root, "meta", "$");
  check_units(meta);

  IntegratedSystem sys;
  sys.name = meta.value("name", "");
  sys.horizon = static_cast<int>(number(root, "horizon", "$"));
  if (sys.horizon < 1) throw LoadError("horizon: must be at least 1");

  const json& power = member(root, "power", "$");
  {
    const json& nodes = array(power, "nodes", "power");
    for (size_t i = 0; i < nodes.size(); ++i) {
      const std::string path = "power.nodes[" + std::to_string(i) + "]";
      PowerNode n;
      n.id = text(nodes[i], "id", path);
      n.reference = nodes[i].value("reference", false);
      sys.power.nodes.push_back(std::move(n));
    }
    const json& lines = array(power, "lines", "power");
    for (size_t i = 0; i < lines.size(); ++i) {
      const std::string path = "power.lines[" + std::to_string(i) + "]";
      Line l;
      l.from = text(lines[i], "from", path);
      l.to = text(lines[i], "to", path);
      l.susceptance = number(lines[i], "susceptance", path);
      l.capacity = number(lines[i], "capacity", path);
      sys.power.lines.push_back(std::move(l));
    }
    const json& gens = array(power, "generators", "power");
    for (size_t i = 0; i < gens.size(); ++i) {
      const std::string path = "power.generators[" + std::to_string(i) + "]";
      Generator g;
      g.id = text(gens[i], "id", path);
      g.node = text(gens[i], "node", path);
      g.pmax = number(gens[i], "pmax", path);
      g.gfpp = gens[i].value("gfpp", false);
      if (g.gfpp) {
        g.conversion = number(gens[i], "conversion", path);
        g.gas_node = text(gens[i], "gas_node", path);
        g.cost = number_or(gens[i], "cost", 0.0);
      } else {
        g.cost = number(gens[i], "cost", path);
        if (gens[i].contains("conversion") || gens[i].contains("gas_node")) {
          throw LoadError(path + ": conversion/gas_node are only valid for gfpp generators");
        }
      }
      sys.power.generators.push_back(std::move(g));
    }
    const json& wind = array(power, "wind", "power");
    for (size_t i = 0; i < wind.size(); ++i) {
      const std::string path = "power.wind[" + std::to_string(i) + "]";
      WindFarm w;
      w.id = text(wind[i], "id", path);
      w.node = text(wind[i], "node", path);
      w.forecast = series(root, "wind", w.id, sys.horizon);
      sys.power.wind_farms.push_back(std::move(w));
    }
    const json& loads = array(power, "loads", "power");
    for (size_t i = 0; i < loads.size(); ++i) {
      const std::string path = "power.loads[" + std::to_string(i) + "]";
      ElectricLoad l;
      l.id = text(loads[i], "id", path);
      l.node = text(loads[i], "node", path);
      l.demand = series(root, "electric_load", l.id, sys.horizon);
      sys.power.loads.push_back(std::move(l));
    }
  }

  const json& gas = member(root, "gas", "$");
  {
    const json& nodes = array(gas, "nodes", "gas");
    for (size_t i = 0; i < nodes.size(); ++i) {
      const std::string path = "gas.nodes[" + std::to_string(i) + "]";
      GasNode n;
      n.id = text(nodes[i], "id", path);
      n.pr_min = number(nodes[i], "pr_min", path);
      n.pr_max = number(nodes[i], "pr_max", path);
      sys.gas.nodes.push_back(std::move(n));
    }
    const json& pipes = array(gas, "pipelines", "gas");
    for (size_t i = 0; i < pipes.size(); ++i) {
      const std::string path = "gas.pipelines[" + std::to_string(i) + "]";
      Pipeline z;
      z.from = text(pipes[i], "from", path);
      z.to = text(pipes[i], "to", path);
      z.weymouth = number(pipes[i], "weymouth", path);
      z.linepack = number(pipes[i], "linepack", path);
      z.initial_linepack = number(pipes[i], "initial_linepack", path);
      z.compression = number_or(pipes[i], "compression", 1.0);
      sys.gas.pipelines.push_back(std::move(z));
    }
    const json& sup = array(gas, "suppliers", "gas");
    for (size_t i = 0; i < sup.size(); ++i) {
      const std::string path = "gas.suppliers[" + std::to_string(i) + "]";
      GasSupplier k;
      k.id = text(sup[i], "id", path);
      k.node = text(sup[i], "node", path);
      k.gmax = number(sup[i], "gmax", path);
      k.cost = number(sup[i], "cost", path);
      sys.gas.suppliers.push_back(std::move(k));
    }
    const json& loads = array(gas, "loads", "gas");
    for (size_t i = 0; i < loads.size(); ++i) {
      const std::string path = "gas.loads[" + std::to_string(i) + "]";
      GasLoad d;
      d.id = text(loads[i], "id", path);
      d.node = text(loads[i], "node", path);
      d.demand = series(root, "gas_load", d.id, sys.horizon);
      sys.gas.loads.push_back(std::move(d));
    }
  }

  sys.finalize();
  return sys;
}

IntegratedSystem load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str(), path);
}

std::string serialize_system(const IntegratedSystem& sys) {
  json root;
  root["format_version"] = 1;
  root["meta"] = {{"name", sys.name},
                  {"units", {{"pressure", "bar"}, {"power", "MW"}, {"gas", "MWh/h"}}}};
  root["horizon"] = sys.horizon;
  root["series"] = json::object();

  json& power = root["power"];
  power["nodes"] = json::array();
  for (const auto& n : sys.power.nodes) {
    json e = {{"id", n.id}};
    if (n.reference) e["reference"] = true;
    power["nodes"].push_back(std::move(e));
  }
  power["lines"] = json::array();
  for (const auto& l : sys.power.lines) {
    power["lines"].push_back(
        {{"from", l.from}, {"to", l.to}, {"susceptance", l.susceptance}, {"capacity", l.capacity}});
  }
  power["generators"] = json::array();
  for (const auto& g : sys.power.generators) {
    json e = {{"id", g.id}, {"node", g.node}, {"pmax", g.pmax}};
    if (g.gfpp) {
      e["gfpp"] = true;
      e["conversion"] = g.conversion;
      e["gas_node"] = g.gas_node;
      if (g.cost != 0.0) e["cost"] = g.cost;
    } else {
      e["cost"] = g.cost;
    }
    power["generators"].push_back(std::move(e));
  }
  power["wind"] = json::array();
  for (const auto& w : sys.power.wind_farms) {
    power["wind"].push_back({{"id", w.id}, {"node", w.node}});
    root["series"]["wind"][w.id] = w.forecast;
  }
  power["loads"] = json::array();
  for (const auto& l : sys.power.loads) {
    power["loads"].push_back({{"id", l.id}, {"node", l.node}});
    root["series"]["electric_load"][l.id] = l.demand;
  }

  json& gas = root["gas"];
  gas["nodes"] = json::array();
  for (const auto& n : sys.gas.nodes) {
    gas["nodes"].push_back({{"id", n.id}, {"pr_min", n.pr_min}, {"pr_max", n.pr_max}});
  }
  gas["pipelines"] = json::array();
  for (const auto& z : sys.gas.pipelines) {
    json e = {{"from", z.from},
              {"to", z.to},
              {"weymouth", z.weymouth},
              {"linepack", z.linepack},
              {"initial_linepack", z.initial_linepack}};
    if (z.compression != 1.0) e["compression"] = z.compression;
    gas["pipelines"].push_back(std::move(e));
  }
  gas["suppliers"] = json::array();
  for (const auto& k : sys.gas.suppliers) {
    gas["suppliers"].push_back(
        {{"id", k.id}, {"node", k.node}, {"gmax", k.gmax}, {"cost", k.cost}});
  }
  gas["loads"] = json::array();
  for (const auto& d : sys.gas.loads) {
    gas["loads"].push_back({{"id", d.id}, {"node", d.node}});
    root["series"]["gas_load"][d.id] = d.demand;
  }

  return root.dump(2) + "\n";
}

std::vector<Violation> validate_system(const IntegratedSystem& sys) {
  std::vector<Violation> out;
  auto flag = [&](const std::string& entity, const std::string& rule) {
    out.push_back({entity, rule});
  };

  int refs = 0;
  for (const auto& n : sys.power.nodes) refs += n.reference ? 1 : 0;
  if (refs != 1) {
    flag("power.nodes", "exactly one reference node required, found " + std::to_string(refs));
  }
  for (const auto& l : sys.power.lines) {
    const std::string entity = "line " + l.from + "-" + l.to;
    if (!(l.capacity > 0)) flag(entity, "capacity must be positive");
    if (!std::isfinite(l.susceptance) || l.susceptance == 0.0) {
      flag(entity, "susceptance must be finite and nonzero");
    }
  }
  for (const auto& g : sys.power.generators) {
    if (g.pmax < 0) flag("generator " + g.id, "pmax must be nonnegative");
    if (g.gfpp && !(g.conversion > 0)) {
      flag("generator " + g.id, "conversion factor must be positive for a GFPP");
    }
  }
  for (const auto& w : sys.power.wind_farms) {
    for (double v : w.forecast) {
      if (v < 0) {
        flag("wind " + w.id, "forecast must be nonnegative");
        break;
      }
    }
  }
  for (const auto& n : sys.gas.nodes) {
    if (!(0 <= n.pr_min && n.pr_min <= n.pr_max)) {
      flag("gas node " + n.id, "pressure bounds must satisfy 0 <= pr_min <= pr_max");
    }
  }
  for (const auto& z : sys.gas.pipelines) {
    const std::string entity = "pipeline " + z.from + "-" + z.to;
    if (!(z.weymouth > 0)) flag(entity, "weymouth constant must be positive");
    if (!(z.linepack > 0)) flag(entity, "linepack constant must be positive");
    if (z.compression < 1.0) flag(entity, "compression ratio must be at least 1");
    if (z.from_idx == z.to_idx) flag(entity, "endpoints must be distinct");
    if (z.initial_linepack < 0) {
      flag(entity, "initial linepack must be nonnegative");
    } else if (z.from_idx >= 0 && z.to_idx >= 0) {
      // Reachability of H0 under h = S*(pr_m+pr_u)/2 at maximal pressures.
      const double h_max =
          z.linepack * (sys.gas.nodes[z.from_idx].pr_max + sys.gas.nodes[z.to_idx].pr_max) / 2.0;
      if (z.initial_linepack > h_max + 1e-9) {
        flag(entity,
             "initial linepack exceeds the maximum reachable linepack " + std::to_string(h_max));
      }
    }
  }
  for (const auto& k : sys.gas.suppliers) {
    if (k.gmax < 0) flag("supplier " + k.id, "gmax must be nonnegative");
  }
  for (const auto& d : sys.gas.loads) {
    for (double v : d.demand) {
      if (v < 0) {
        flag("gas load " + d.id, "demand must be nonnegative");
        break;
      }
    }
  }
  for (const auto& l : sys.power.loads) {
    for (double v : l.demand) {
      if (v < 0) {
        flag("electric load " + l.id, "demand must be nonnegative");
        break;
      }
    }
  }
  return out;
}

}  // namespace gasflex
