#include <cmath>
#include <limits>
#include <unordered_set>

#include "gasflex/schedule.hpp"
#include "json.hpp"

namespace gasflex {

using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kValueTol = 1e-6;

std::vector<std::string> unique_keys(std::vector<std::string> raw) {
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < raw.size(); ++i) {
    while (!seen.insert(raw[i]).second) raw[i] += "#" + std::to_string(i);
  }
  return raw;
}

}  // namespace

std::vector<std::string> pipeline_keys(const IntegratedSystem& sys) {
  std::vector<std::string> keys;
  keys.reserve(sys.gas.pipelines.size());
  for (const Pipeline& z : sys.gas.pipelines) keys.push_back(z.label());
  return unique_keys(std::move(keys));
}

std::vector<std::string> line_keys(const IntegratedSystem& sys) {
  std::vector<std::string> keys;
  keys.reserve(sys.power.lines.size());
  for (const Line& l : sys.power.lines) keys.push_back(l.from + "_" + l.to);
  return unique_keys(std::move(keys));
}

namespace {

// Pulls one [entity][hour] grid out of the raw value vector, enforcing
// presence and bound feasibility for every mapped variable.
std::vector<std::vector<double>> pull(const FormulationArtifacts& art, const RawSolution& raw,
                                      const std::vector<std::vector<VarId>>& ids) {
  std::vector<std::vector<double>> out(ids.size());
  for (size_t e = 0; e < ids.size(); ++e) {
    out[e].resize(ids[e].size(), kNan);
    for (size_t t = 0; t < ids[e].size(); ++t) {
      const VarId id = ids[e][t];
      if (id < 0) continue;
      const VariableSpec& spec = art.model.variable(id);
      if (!raw.value_present[id]) {
        throw ExtractError("solution is missing variable '" + spec.name + "'");
      }
      const double v = raw.values[id];
      if (v < spec.lower - kValueTol || v > spec.upper + kValueTol) {
        throw ExtractError("variable '" + spec.name + "' value " + std::to_string(v) +
                           " violates its bounds");
      }
      out[e][t] = v;
    }
  }
  return out;
}

}  // namespace

ScheduleSolution extract_schedule(const FormulationArtifacts& art, const RawSolution& raw,
                                  const IntegratedSystem& sys) {
  if (!raw.has_values()) {
    throw ExtractError(std::string("cannot extract a schedule from a solve with status '") +
                       to_string(raw.status) + "'");
  }
  ScheduleSolution out;
  out.mode = art.mode;
  out.status = raw.status;
  out.objective = raw.objective;
  out.horizon = sys.horizon;
  out.stats = raw.stats;

  out.p = pull(art, raw, art.p);
  out.w = pull(art, raw, art.w);
  out.theta = pull(art, raw, art.theta);
  out.f = pull(art, raw, art.f);
  out.g = pull(art, raw, art.g);
  out.pr = pull(art, raw, art.pr);
  out.q = pull(art, raw, art.q);
  out.q_in = pull(art, raw, art.q_in);
  out.q_out = pull(art, raw, art.q_out);
  out.h = pull(art, raw, art.h);

  if (art.mode == ModelMode::kBidirectional) {
    out.q_pos = pull(art, raw, art.q_pos);
    out.q_neg = pull(art, raw, art.q_neg);
    out.q_in_rev = pull(art, raw, art.q_in_rev);
    out.q_out_rev = pull(art, raw, art.q_out_rev);
    out.y = pull(art, raw, art.y);
    out.phi_from = pull(art, raw, art.phi_from);
    out.phi_to = pull(art, raw, art.phi_to);
    for (size_t z = 0; z < out.y.size(); ++z) {
      for (size_t t = 0; t < out.y[z].size(); ++t) {
        const double y = out.y[z][t];
        if (std::abs(y - std::round(y)) > kValueTol) {
          throw ExtractError("direction variable '" +
                             art.model.variable(art.y[z][t]).name + "' value " +
                             std::to_string(y) + " is not binary");
        }
      }
    }
  }
  return out;
}

namespace {

json grid_to_json(const std::vector<std::vector<double>>& grid,
                  const std::vector<std::string>& keys) {
  json out = json::object();
  for (size_t e = 0; e < grid.size(); ++e) out[keys[e]] = grid[e];
  return out;
}

std::vector<std::vector<double>> grid_from_json(const json& j, const std::vector<std::string>& keys,
                                                int horizon, const std::string& path) {
  std::vector<std::vector<double>> out(keys.size());
  for (size_t e = 0; e < keys.size(); ++e) {
    auto it = j.find(keys[e]);
    if (it == j.end()) throw LoadError(path + "." + keys[e] + ": missing");
    out[e].reserve(horizon);
    for (const json& v : *it) out[e].push_back(v.is_null() ? kNan : v.get<double>());
    if (static_cast<int>(out[e].size()) != horizon) {
      throw LoadError(path + "." + keys[e] + ": wrong series length");
    }
  }
  return out;
}

template <typename T>
std::vector<std::string> ids_of(const std::vector<T>& entities) {
  std::vector<std::string> out;
  out.reserve(entities.size());
  for (const T& e : entities) out.push_back(e.id);
  return out;
}

}  // namespace

std::string serialize_schedule(const ScheduleSolution& s, const IntegratedSystem& sys) {
  json root;
  root["schema_version"] = 1;
  root["mode"] = s.mode == ModelMode::kUnidirectional ? "uni" : "bi";
  root["status"] = to_string(s.status);
  root["objective"] = s.objective;
  root["horizon"] = s.horizon;
  root["stats"] = {{"wall_time_sec", s.stats.wall_time_sec},
                   {"gap", s.stats.gap_achieved},
                   {"simplex_iterations", s.stats.simplex_iterations},
                   {"branch_nodes", s.stats.branch_nodes}};

  const auto pipes = pipeline_keys(sys);
  const auto lines = line_keys(sys);
  json& v = root["values"];
  v["p"] = grid_to_json(s.p, ids_of(sys.power.generators));
  v["w"] = grid_to_json(s.w, ids_of(sys.power.wind_farms));
  v["theta"] = grid_to_json(s.theta, ids_of(sys.power.nodes));
  v["f"] = grid_to_json(s.f, lines);
  v["g"] = grid_to_json(s.g, ids_of(sys.gas.suppliers));
  v["pr"] = grid_to_json(s.pr, ids_of(sys.gas.nodes));
  v["q"] = grid_to_json(s.q, pipes);
  v["qin"] = grid_to_json(s.q_in, pipes);
  v["qout"] = grid_to_json(s.q_out, pipes);
  v["h"] = grid_to_json(s.h, pipes);
  if (s.mode == ModelMode::kBidirectional) {
    v["qpos"] = grid_to_json(s.q_pos, pipes);
    v["qneg"] = grid_to_json(s.q_neg, pipes);
    v["qin_rev"] = grid_to_json(s.q_in_rev, pipes);
    v["qout_rev"] = grid_to_json(s.q_out_rev, pipes);
    v["y"] = grid_to_json(s.y, pipes);
    v["phim"] = grid_to_json(s.phi_from, pipes);
    v["phiu"] = grid_to_json(s.phi_to, pipes);
  }
  return root.dump(2) + "\n";
}

ScheduleSolution parse_schedule(const std::string& text, const IntegratedSystem& sys) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw LoadError(std::string("solution document is not valid JSON: ") + e.what());
  }
  if (root.value("schema_version", 0) != 1) throw LoadError("unsupported solution schema_version");

  ScheduleSolution s;
  const std::string mode = root.value("mode", "uni");
  s.mode = mode == "bi" ? ModelMode::kBidirectional : ModelMode::kUnidirectional;
  const std::string status = root.value("status", "error");
  s.status = status == "optimal"          ? SolveStatus::kOptimal
             : status == "feasible_limit" ? SolveStatus::kFeasibleLimit
                                          : SolveStatus::kError;
  s.objective = root.value("objective", 0.0);
  s.horizon = root.value("horizon", 0);
  if (s.horizon != sys.horizon) throw LoadError("solution horizon does not match the system");
  if (root.contains("stats")) {
    const json& st = root["stats"];
    s.stats.wall_time_sec = st.value("wall_time_sec", 0.0);
    s.stats.gap_achieved = st.value("gap", 0.0);
    s.stats.simplex_iterations = st.value("simplex_iterations", std::int64_t{0});
    s.stats.branch_nodes = st.value("branch_nodes", std::int64_t{0});
  }

  const auto pipes = pipeline_keys(sys);
  const auto lines = line_keys(sys);
  const json& v = root.at("values");
  const int T = s.horizon;
  s.p = grid_from_json(v.at("p"), ids_of(sys.power.generators), T, "values.p");
  s.w = grid_from_json(v.at("w"), ids_of(sys.power.wind_farms), T, "values.w");
  s.theta = grid_from_json(v.at("theta"), ids_of(sys.power.nodes), T, "values.theta");
  s.f = grid_from_json(v.at("f"), lines, T, "values.f");
  s.g = grid_from_json(v.at("g"), ids_of(sys.gas.suppliers), T, "values.g");
  s.pr = grid_from_json(v.at("pr"), ids_of(sys.gas.nodes), T, "values.pr");
  s.q = grid_from_json(v.at("q"), pipes, T, "values.q");
  s.q_in = grid_from_json(v.at("qin"), pipes, T, "values.qin");
  s.q_out = grid_from_json(v.at("qout"), pipes, T, "values.qout");
  s.h = grid_from_json(v.at("h"), pipes, T, "values.h");
  if (s.mode == ModelMode::kBidirectional) {
    s.q_pos = grid_from_json(v.at("qpos"), pipes, T, "values.qpos");
    s.q_neg = grid_from_json(v.at("qneg"), pipes, T, "values.qneg");
    s.q_in_rev = grid_from_json(v.at("qin_rev"), pipes, T, "values.qin_rev");
    s.q_out_rev = grid_from_json(v.at("qout_rev"), pipes, T, "values.qout_rev");
    s.y = grid_from_json(v.at("y"), pipes, T, "values.y");
    s.phi_from = grid_from_json(v.at("phim"), pipes, T, "values.phim");
    s.phi_to = grid_from_json(v.at("phiu"), pipes, T, "values.phiu");
  }
  return s;
}

}  // namespace gasflex
