#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gasflex/driver.hpp"
#include "gasflex/formulation.hpp"
#include "json.hpp"

namespace gasflex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

FormulationConfig formulation_config(const RunConfig& config) {
  FormulationConfig fc;
  fc.expansion_point_count = config.expansion_point_count;
  fc.pressure_resolution = config.pressure_resolution;
  fc.tightening = config.tightening;
  fc.flow_big_m_override = config.flow_big_m_override;
  fc.slope_big_m_override = config.slope_big_m_override;
  return fc;
}

IntegratedSystem slice_window(const IntegratedSystem& sys, int start, int len,
                              const std::vector<double>& initial_linepack) {
  IntegratedSystem w = sys;
  w.horizon = len;
  auto cut = [&](std::vector<double>& series) {
    series = std::vector<double>(series.begin() + start, series.begin() + start + len);
  };
  for (auto& farm : w.power.wind_farms) cut(farm.forecast);
  for (auto& load : w.power.loads) cut(load.demand);
  for (auto& load : w.gas.loads) cut(load.demand);
  for (size_t z = 0; z < w.gas.pipelines.size(); ++z) {
    w.gas.pipelines[z].initial_linepack = initial_linepack[z];
  }
  return w;
}

void append_grid(std::vector<std::vector<double>>& into,
                 const std::vector<std::vector<double>>& part) {
  if (into.empty()) {
    into = part;
    return;
  }
  for (size_t e = 0; e < into.size(); ++e) {
    into[e].insert(into[e].end(), part[e].begin(), part[e].end());
  }
}

void append_window(ScheduleSolution& into, const ScheduleSolution& part) {
  append_grid(into.p, part.p);
  append_grid(into.w, part.w);
  append_grid(into.theta, part.theta);
  append_grid(into.f, part.f);
  append_grid(into.g, part.g);
  append_grid(into.pr, part.pr);
  append_grid(into.q, part.q);
  append_grid(into.q_in, part.q_in);
  append_grid(into.q_out, part.q_out);
  append_grid(into.h, part.h);
  append_grid(into.q_pos, part.q_pos);
  append_grid(into.q_neg, part.q_neg);
  append_grid(into.q_in_rev, part.q_in_rev);
  append_grid(into.q_out_rev, part.q_out_rev);
  append_grid(into.y, part.y);
  append_grid(into.phi_from, part.phi_from);
  append_grid(into.phi_to, part.phi_to);
  into.objective += part.objective;
  into.stats.wall_time_sec += part.stats.wall_time_sec;
  into.stats.simplex_iterations += part.stats.simplex_iterations;
  into.stats.branch_nodes += part.stats.branch_nodes;
  into.stats.gap_achieved = std::max(into.stats.gap_achieved, part.stats.gap_achieved);
  if (part.status == SolveStatus::kFeasibleLimit) into.status = SolveStatus::kFeasibleLimit;
}

}  // namespace

void check_config(const RunConfig& config, int horizon) {
  if (config.expansion_point_count < 1) {
    throw ConfigError("expansion point count must be at least 1");
  }
  if (!(config.pressure_resolution > 0)) {
    throw ConfigError("pressure resolution must be positive");
  }
  if (config.mode != "uni" && config.mode != "bi" && config.mode != "both") {
    throw ConfigError("mode must be one of uni, bi, both");
  }
  int prev = 1;
  for (int s : config.split_points) {
    if (s <= prev || s >= horizon) {
      throw ConfigError("split points must be strictly increasing and strictly inside (1, " +
                        std::to_string(horizon) + ")");
    }
    prev = s;
  }
}

ScheduleSolution solve_schedule(const IntegratedSystem& sys, ModelMode mode,
                                const RunConfig& config, MilpSolver& solver) {
  check_config(config, sys.horizon);

  std::vector<int> starts = {0};
  for (int s : config.split_points) starts.push_back(s - 1);
  starts.push_back(sys.horizon);

  std::vector<double> original_h0, handoff;
  for (const Pipeline& z : sys.gas.pipelines) original_h0.push_back(z.initial_linepack);
  handoff = original_h0;

  ScheduleSolution stitched;
  stitched.mode = mode;
  stitched.status = SolveStatus::kOptimal;
  stitched.horizon = sys.horizon;

  const int windows = static_cast<int>(starts.size()) - 1;
  for (int w = 0; w < windows; ++w) {
    const int start = starts[w];
    const int len = starts[w + 1] - starts[w];
    IntegratedSystem wsys = slice_window(sys, start, len, handoff);

    FormulationConfig fc = formulation_config(config);
    fc.terminal_floor_enabled = w == windows - 1;
    if (fc.terminal_floor_enabled && windows > 1) fc.terminal_floor_values = original_h0;

    FormulationArtifacts art = build_model(wsys, mode, fc);
    RawSolution raw = solver.solve(art.model, config.solve_options);
    if (raw.status == SolveStatus::kInfeasible || raw.status == SolveStatus::kUnbounded ||
        raw.status == SolveStatus::kError) {
      throw InfeasibleError("window " + std::to_string(w + 1) + " (hours " +
                                std::to_string(start + 1) + ".." + std::to_string(start + len) +
                                "): " + to_string(raw.status) +
                                (raw.message.empty() ? "" : " (" + raw.message + ")"),
                            w + 1);
    }
    ScheduleSolution part = extract_schedule(art, raw, wsys);
    for (size_t z = 0; z < sys.gas.pipelines.size(); ++z) handoff[z] = part.h[z][len - 1];
    append_window(stitched, part);
  }
  return stitched;
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[48];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return std::string("# generated: ") + buf + "\n";
}

std::string mode_suffix(ModelMode mode) {
  return mode == ModelMode::kUnidirectional ? "uni" : "bi";
}

void write_solution(const fs::path& dir, const ScheduleSolution& s, const IntegratedSystem& sys) {
  write_text(dir / ("solution_" + mode_suffix(s.mode) + ".json"), serialize_schedule(s, sys));
}

void write_flow_series(const fs::path& dir, const ScheduleSolution& s,
                       const IntegratedSystem& sys) {
  const auto keys = pipeline_keys(sys);
  std::string doc = timestamp_line();
  doc += "# gasflex flows v1\npipeline\thour\tq";
  const bool bi = s.mode == ModelMode::kBidirectional;
  if (bi) doc += "\tqpos\tqneg\ty";
  doc += "\n";
  for (size_t z = 0; z < keys.size(); ++z) {
    for (int t = 0; t < s.horizon; ++t) {
      doc += keys[z] + "\t" + std::to_string(t + 1) + "\t" + fmt(s.q[z][t]);
      if (bi) {
        doc += "\t" + fmt(s.q_pos[z][t]) + "\t" + fmt(s.q_neg[z][t]) + "\t" +
               fmt(std::lround(s.y[z][t]));
      }
      doc += "\n";
    }
  }
  write_text(dir / ("flows_" + mode_suffix(s.mode) + ".tsv"), doc);
}

void write_linepack_series(const fs::path& dir, const ScheduleSolution& s,
                           const IntegratedSystem& sys, const LinepackProfile& profile) {
  const auto keys = pipeline_keys(sys);
  std::string doc = timestamp_line();
  doc += "# gasflex linepack v1\npipeline\thour\th\tcharge\tdischarge\n";
  for (size_t z = 0; z < keys.size(); ++z) {
    for (int t = 0; t < s.horizon; ++t) {
      doc += keys[z] + "\t" + std::to_string(t + 1) + "\t" + fmt(s.h[z][t]) + "\t" +
             fmt(profile.charge[z][t]) + "\t" + fmt(profile.discharge[z][t]) + "\n";
    }
  }
  write_text(dir / ("linepack_" + mode_suffix(s.mode) + ".tsv"), doc);
}

void write_delta_report(const fs::path& dir, const ApproxErrorReport& report,
                        const IntegratedSystem& sys, ModelMode mode) {
  const auto keys = pipeline_keys(sys);
  std::string doc = timestamp_line();
  doc += "# gasflex approx-error v1\npipeline\thour\tdelta\tdefined\n";
  for (size_t z = 0; z < keys.size(); ++z) {
    for (size_t t = 0; t < report.delta[z].size(); ++t) {
      const DeltaEntry& e = report.delta[z][t];
      doc += keys[z] + "\t" + std::to_string(t + 1) + "\t" + (e.defined ? fmt(e.value) : "nan") +
             "\t" + (e.defined ? "1" : "0") + "\n";
    }
  }
  write_text(dir / ("approx_error_" + mode_suffix(mode) + ".tsv"), doc);
}

void write_direction_report(const fs::path& dir, const DirectionReport& report,
                            const IntegratedSystem& sys, ModelMode mode) {
  const auto keys = pipeline_keys(sys);
  std::string doc = timestamp_line();
  doc += "# gasflex directions v1\npipeline\thour\tflow\texact_flow\tconsistent\texempt\n";
  for (size_t z = 0; z < keys.size(); ++z) {
    for (size_t t = 0; t < report.status[z].size(); ++t) {
      const DirectionStatus& st = report.status[z][t];
      doc += keys[z] + "\t" + std::to_string(t + 1) + "\t" + fmt(st.flow) + "\t" +
             fmt(st.exact_flow) + "\t" + (st.consistent ? "1" : "0") + "\t" +
             (st.exempt ? "1" : "0") + "\n";
    }
  }
  write_text(dir / ("directions_" + mode_suffix(mode) + ".tsv"), doc);
}

void write_delta_diff(const fs::path& dir, const ApproxErrorReport& uni,
                      const ApproxErrorReport& bi, const IntegratedSystem& sys) {
  const auto keys = pipeline_keys(sys);
  std::string doc = timestamp_line();
  doc += "# gasflex delta-diff v1 (delta_uni - delta_bi)\npipeline";
  for (int t = 0; t < sys.horizon; ++t) doc += "\th" + std::to_string(t + 1);
  doc += "\n";
  for (size_t z = 0; z < keys.size(); ++z) {
    doc += keys[z];
    for (int t = 0; t < sys.horizon; ++t) {
      const DeltaEntry& a = uni.delta[z][t];
      const DeltaEntry& b = bi.delta[z][t];
      doc += "\t";
      doc += (a.defined && b.defined) ? fmt(a.value - b.value) : "nan";
    }
    doc += "\n";
  }
  write_text(dir / "delta_diff.tsv", doc);
}

void write_ramps(const fs::path& dir, const ComparisonReport& cmp, const IntegratedSystem& sys) {
  std::string doc = timestamp_line();
  doc += "# gasflex ramps v1 (percent of installed capacity)\ngenerator\thour\tramp_uni\tramp_bi\n";
  for (size_t i = 0; i < sys.power.generators.size(); ++i) {
    for (size_t t = 1; t < cmp.ramp_uni[i].size(); ++t) {
      doc += sys.power.generators[i].id + "\t" + std::to_string(t + 1) + "\t" +
             fmt(cmp.ramp_uni[i][t]) + "\t" + fmt(cmp.ramp_bi[i][t]) + "\n";
    }
  }
  write_text(dir / "ramps.tsv", doc);
}

json direction_changes_json(const DirectionReport& report, const std::vector<std::string>& keys) {
  json out = json::array();
  for (const DirectionChange& c : report.changes) {
    out.push_back({{"pipeline", keys[c.pipeline]},
                   {"hour", c.hour},
                   {"from", c.from_dir},
                   {"to", c.to_dir}});
  }
  return out;
}

}  // namespace

int cmd_validate(const std::string& path, std::ostream& out) {
  if (!fs::exists(path)) {
    out << "error: " << path << ": no such file\n";
    return kExitIo;
  }
  IntegratedSystem sys;
  try {
    sys = load_system(path);
  } catch (const LoadError& e) {
    out << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  const std::vector<Violation> violations = validate_system(sys);
  for (const Violation& v : violations) {
    out << "violation: " << v.entity << ": " << v.rule << "\n";
  }
  if (!violations.empty()) return kExitInvalid;
  out << "ok: " << path << " (" << sys.power.nodes.size() << " power nodes, "
      << sys.gas.nodes.size() << " gas nodes, horizon " << sys.horizon << ")\n";
  return kExitOk;
}

namespace {

IntegratedSystem load_checked(const RunConfig& config, std::ostream& out, int& rc) {
  rc = kExitOk;
  if (!fs::exists(config.system_path)) {
    out << "error: " << config.system_path << ": no such file\n";
    rc = kExitIo;
    return {};
  }
  IntegratedSystem sys;
  try {
    sys = load_system(config.system_path);
  } catch (const LoadError& e) {
    out << "error: " << e.what() << "\n";
    rc = kExitInvalid;
    return {};
  }
  const std::vector<Violation> violations = validate_system(sys);
  if (!violations.empty()) {
    for (const Violation& v : violations) out << "violation: " << v.entity << ": " << v.rule << "\n";
    rc = kExitInvalid;
    return {};
  }
  return sys;
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out) {
  int rc = kExitOk;
  IntegratedSystem sys = load_checked(config, out, rc);
  if (rc != kExitOk) return rc;

  try {
    check_config(config, sys.horizon);
    fs::create_directories(config.output_dir);
    auto solver = make_solver(config.backend, config.solver_command);
    std::vector<ModelMode> modes;
    if (config.mode == "uni" || config.mode == "both") modes.push_back(ModelMode::kUnidirectional);
    if (config.mode == "bi" || config.mode == "both") modes.push_back(ModelMode::kBidirectional);
    for (ModelMode mode : modes) {
      ScheduleSolution s = solve_schedule(sys, mode, config, *solver);
      write_solution(config.output_dir, s, sys);
      out << mode_suffix(mode) << ": " << to_string(s.status) << " objective " << fmt(s.objective)
          << " (wall " << fmt(s.stats.wall_time_sec) << "s, nodes " << s.stats.branch_nodes
          << ")\n";
    }
  } catch (const ConfigError& e) {
    out << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InfeasibleError& e) {
    out << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::ios_base::failure& e) {
    out << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormulationError& e) {
    out << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const SolveError& e) {
    out << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ExtractError& e) {
    out << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  int rc = kExitOk;
  IntegratedSystem sys = load_checked(config, out, rc);
  if (rc != kExitOk) return rc;

  try {
    check_config(config, sys.horizon);
    fs::create_directories(config.output_dir);
    const fs::path dir = config.output_dir;
    auto solver = make_solver(config.backend, config.solver_command);
    const auto keys = pipeline_keys(sys);

    json summary;
    summary["schema_version"] = 1;
    summary["system"] = sys.name;

    ScheduleSolution uni, bi;
    bool uni_ok = true, bi_ok = true;
    std::string uni_msg, bi_msg;
    try {
      uni = solve_schedule(sys, ModelMode::kUnidirectional, config, *solver);
    } catch (const InfeasibleError& e) {
      uni_ok = false;
      uni_msg = e.what();
    }
    try {
      bi = solve_schedule(sys, ModelMode::kBidirectional, config, *solver);
    } catch (const InfeasibleError& e) {
      bi_ok = false;
      bi_msg = e.what();
    }
    summary["uni"]["status"] = uni_ok ? to_string(uni.status) : "infeasible";
    summary["bi"]["status"] = bi_ok ? to_string(bi.status) : "infeasible";
    if (!uni_ok) summary["uni"]["detail"] = uni_msg;
    if (!bi_ok) summary["bi"]["detail"] = bi_msg;

    if (uni_ok) write_solution(dir, uni, sys);
    if (bi_ok) write_solution(dir, bi, sys);

    ApproxErrorReport err_uni, err_bi;
    if (uni_ok) {
      err_uni = approximation_error_delta(uni, sys);
      const DirectionReport dir_uni = verify_directions(uni, sys);
      write_flow_series(dir, uni, sys);
      write_linepack_series(dir, uni, sys, linepack_profile(uni, sys));
      write_delta_report(dir, err_uni, sys, ModelMode::kUnidirectional);
      write_direction_report(dir, dir_uni, sys, ModelMode::kUnidirectional);
      summary["uni"]["objective"] = uni.objective;
      summary["uni"]["xi"] = err_uni.xi;
      summary["uni"]["delta_undefined"] = err_uni.undefined_count;
      summary["uni"]["inconsistent_directions"] = dir_uni.inconsistent_count;
      summary["uni"]["direction_changes"] = direction_changes_json(dir_uni, keys);
    }
    if (bi_ok) {
      err_bi = approximation_error_delta(bi, sys);
      const DirectionReport dir_bi = verify_directions(bi, sys);
      write_flow_series(dir, bi, sys);
      write_linepack_series(dir, bi, sys, linepack_profile(bi, sys));
      write_delta_report(dir, err_bi, sys, ModelMode::kBidirectional);
      write_direction_report(dir, dir_bi, sys, ModelMode::kBidirectional);
      summary["bi"]["objective"] = bi.objective;
      summary["bi"]["xi"] = err_bi.xi;
      summary["bi"]["delta_undefined"] = err_bi.undefined_count;
      summary["bi"]["inconsistent_directions"] = dir_bi.inconsistent_count;
      summary["bi"]["direction_changes"] = direction_changes_json(dir_bi, keys);
    }

    if (uni_ok && bi_ok) {
      const ComparisonReport cmp = compare_runs(uni, bi, sys);
      write_delta_diff(dir, err_uni, err_bi, sys);
      write_ramps(dir, cmp, sys);
      summary["comparison"] = {
          {"cost_uni", cmp.cost_uni},
          {"cost_bi", cmp.cost_bi},
          {"savings_percent", cmp.savings_percent},
          {"gfpp_share_uni_percent", cmp.gfpp_share_uni},
          {"gfpp_share_bi_percent", cmp.gfpp_share_bi},
          {"linepack_total_charge_uni", cmp.linepack_uni.network_charge},
          {"linepack_total_discharge_uni", cmp.linepack_uni.network_discharge},
          {"linepack_total_charge_bi", cmp.linepack_bi.network_charge},
          {"linepack_total_discharge_bi", cmp.linepack_bi.network_discharge},
      };
      json per_pipe = json::array();
      for (size_t z = 0; z < keys.size(); ++z) {
        per_pipe.push_back({{"pipeline", keys[z]},
                            {"charge_uni", cmp.linepack_uni.total_charge[z]},
                            {"discharge_uni", cmp.linepack_uni.total_discharge[z]},
                            {"charge_bi", cmp.linepack_bi.total_charge[z]},
                            {"discharge_bi", cmp.linepack_bi.total_discharge[z]}});
      }
      summary["comparison"]["linepack_per_pipeline"] = per_pipe;
    }

    write_text(dir / "summary.json", summary.dump(2) + "\n");
    if (uni_ok && bi_ok) {
      out << "compare: savings " << fmt(summary["comparison"]["savings_percent"].get<double>())
          << "% (uni " << fmt(uni.objective) << ", bi " << fmt(bi.objective) << ")\n";
    } else {
      out << "compare: partial report (uni " << summary["uni"]["status"].get<std::string>()
          << ", bi " << summary["bi"]["status"].get<std::string>() << ")\n";
      return kExitInfeasible;
    }
  } catch (const ConfigError& e) {
    out << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::ios_base::failure& e) {
    out << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormulationError& e) {
    out << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const SolveError& e) {
    out << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ExtractError& e) {
    out << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace gasflex
