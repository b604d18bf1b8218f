#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gasflex/formulation.hpp"

namespace gasflex {

namespace {

std::string hour_tag(int t) { return "_t" + std::to_string(t + 1); }

double box_mid(double lo, double hi) { return 0.5 * (lo + hi); }

// Segment from the (PR^max_from, PR^min_to) corner toward the box midpoint,
// truncated so the from-to pressure gap keeps at least 1% of the corner gap.
std::vector<ExpansionPoint> segment_points(double from_min, double from_max, double to_min,
                                           double to_max, int count, const std::string& label) {
  if (count < 1) throw FormulationError("expansion point count must be at least 1");
  const double gap_corner = from_max - to_min;
  if (!(gap_corner > 1e-7 * std::max(1.0, from_max))) {
    throw FormulationError("pipeline " + label +
                           " cannot carry forward flow: no pressure point with PR_from > PR_to");
  }
  const double mid_from = box_mid(from_min, from_max);
  const double mid_to = box_mid(to_min, to_max);
  const double gap_mid = mid_from - mid_to;
  const double margin = 0.01 * gap_corner;
  double lambda_cap = 1.0;
  if (gap_mid < margin) {
    lambda_cap = 0.99 * (gap_corner - margin) / (gap_corner - gap_mid);
  }
  std::vector<ExpansionPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double lambda = lambda_cap * static_cast<double>(i) / count;
    out.push_back({from_max + lambda * (mid_from - from_max), to_min + lambda * (mid_to - to_min)});
  }
  return out;
}

}  // namespace

std::vector<ExpansionPoint> expansion_points(const Pipeline& pipe, int count,
                                             const IntegratedSystem& system) {
  const GasNode& from = system.gas.nodes[pipe.from_idx];
  const GasNode& to = system.gas.nodes[pipe.to_idx];
  return segment_points(from.pr_min, from.pr_max, to.pr_min, to.pr_max, count, pipe.label());
}

ExpansionPointSet make_expansion_points(const IntegratedSystem& system, int count) {
  ExpansionPointSet set;
  set.forward.reserve(system.gas.pipelines.size());
  set.reverse.reserve(system.gas.pipelines.size());
  for (const Pipeline& z : system.gas.pipelines) {
    if (z.has_compressor()) {
      // Compressor pipelines are not governed by the Weymouth planes.
      set.forward.push_back({});
      set.reverse.push_back({});
      continue;
    }
    set.forward.push_back(expansion_points(z, count, system));
    const GasNode& from = system.gas.nodes[z.from_idx];
    const GasNode& to = system.gas.nodes[z.to_idx];
    // Mirror with the endpoint boxes swapped; empty when the boxes preclude
    // reverse operation (pr_to can never exceed pr_from).
    if (to.pr_max - from.pr_min > 1e-7 * std::max(1.0, to.pr_max)) {
      set.reverse.push_back(segment_points(to.pr_min, to.pr_max, from.pr_min, from.pr_max, count,
                                           z.to + "_" + z.from));
    } else {
      set.reverse.push_back({});
    }
  }
  return set;
}

std::pair<double, double> weymouth_plane_coefficients(double weymouth_k, double pr_from,
                                                      double pr_to) {
  if (!(weymouth_k > 0)) throw FormulationError("weymouth constant must be positive");
  if (!(pr_from > pr_to) || pr_to < 0) {
    throw FormulationError("degenerate expansion point (" + std::to_string(pr_from) + ", " +
                           std::to_string(pr_to) + ")");
  }
  const double den = std::sqrt(pr_from * pr_from - pr_to * pr_to);
  return {weymouth_k * pr_from / den, weymouth_k * pr_to / den};
}

BigMConfig derive_big_m(const IntegratedSystem& system, const FormulationConfig& config) {
  BigMConfig out;
  const size_t nz = system.gas.pipelines.size();
  out.flow.resize(nz);
  out.pressure.resize(nz);
  out.slope.resize(nz);

  // Network throughput bound for compressor pipelines, whose flow is not
  // capped by any Weymouth plane: total hourly supply plus total releasable
  // linepack.
  double throughput = 0.0;
  for (const GasSupplier& k : system.gas.suppliers) throughput += k.gmax;
  for (const Pipeline& z : system.gas.pipelines) {
    throughput += z.linepack *
                  (system.gas.nodes[z.from_idx].pr_max + system.gas.nodes[z.to_idx].pr_max) / 2.0;
  }

  for (size_t i = 0; i < nz; ++i) {
    const Pipeline& z = system.gas.pipelines[i];
    const double pr_hi =
        std::max(system.gas.nodes[z.from_idx].pr_max, system.gas.nodes[z.to_idx].pr_max);
    double flow = z.has_compressor() ? std::max(z.weymouth * pr_hi, throughput)
                                     : z.weymouth * pr_hi;
    if (config.flow_big_m_override > 0) flow = config.flow_big_m_override;
    flow *= config.flow_big_m_scale;
    out.flow[i] = flow;
    out.pressure[i] = pr_hi;
    out.slope[i] = config.slope_big_m_override > 0
                       ? config.slope_big_m_override
                       : flow / std::max(config.pressure_resolution, 1e-9);
  }
  return out;
}

namespace {

struct Ctx {
  const IntegratedSystem& sys;
  FormulationArtifacts& art;
  int horizon;

  OptModel& model() { return art.model; }

  VarId cvar(double lo, double up, std::string name) {
    return model().add_variable({VarKind::kContinuous, lo, up, std::move(name)});
  }
  VarId bvar(std::string name) {
    return model().add_variable({VarKind::kBinary, 0, 1, std::move(name)});
  }
  void row(std::vector<LinearTerm> terms, Sense sense, double rhs, std::string name) {
    model().add_constraint({std::move(terms), sense, rhs, std::move(name)});
  }
};

std::vector<std::vector<VarId>> grid(size_t entities, int horizon) {
  return std::vector<std::vector<VarId>>(entities, std::vector<VarId>(horizon, -1));
}

}  // namespace

void build_common_gas_block(const IntegratedSystem& sys, FormulationArtifacts& art) {
  Ctx ctx{sys, art, sys.horizon};
  const int T = sys.horizon;

  art.g = grid(sys.gas.suppliers.size(), T);
  for (size_t k = 0; k < sys.gas.suppliers.size(); ++k) {
    const GasSupplier& sup = sys.gas.suppliers[k];
    for (int t = 0; t < T; ++t) {
      art.g[k][t] = ctx.cvar(0.0, sup.gmax, "g_" + sup.id + hour_tag(t));
    }
  }
  art.pr = grid(sys.gas.nodes.size(), T);
  for (size_t m = 0; m < sys.gas.nodes.size(); ++m) {
    const GasNode& node = sys.gas.nodes[m];
    for (int t = 0; t < T; ++t) {
      art.pr[m][t] = ctx.cvar(node.pr_min, node.pr_max, "pr_" + node.id + hour_tag(t));
    }
  }
  // Compression ratio rows only where a compressor exists; an ordinary
  // pipeline's pressure ordering is the tightening block's business.
  for (const Pipeline& z : sys.gas.pipelines) {
    if (!z.has_compressor()) continue;
    for (int t = 0; t < T; ++t) {
      ctx.row({{art.pr[z.to_idx][t], 1.0}, {art.pr[z.from_idx][t], -z.compression}},
              Sense::kLessEqual, 0.0, "comp_" + z.label() + hour_tag(t));
    }
  }
}

void build_power_block(const IntegratedSystem& sys, FormulationArtifacts& art) {
  if (sys.reference_node < 0) throw FormulationError("missing reference node");
  Ctx ctx{sys, art, sys.horizon};
  const int T = sys.horizon;
  const double pi = std::numbers::pi;

  art.p = grid(sys.power.generators.size(), T);
  for (size_t i = 0; i < sys.power.generators.size(); ++i) {
    const Generator& gen = sys.power.generators[i];
    for (int t = 0; t < T; ++t) {
      art.p[i][t] = ctx.cvar(0.0, gen.pmax, "p_" + gen.id + hour_tag(t));
    }
  }
  art.w = grid(sys.power.wind_farms.size(), T);
  for (size_t j = 0; j < sys.power.wind_farms.size(); ++j) {
    const WindFarm& farm = sys.power.wind_farms[j];
    for (int t = 0; t < T; ++t) {
      art.w[j][t] = ctx.cvar(0.0, farm.forecast[t], "w_" + farm.id + hour_tag(t));
    }
  }
  art.theta = grid(sys.power.nodes.size(), T);
  for (size_t n = 0; n < sys.power.nodes.size(); ++n) {
    const bool ref = static_cast<int>(n) == sys.reference_node;
    for (int t = 0; t < T; ++t) {
      art.theta[n][t] = ctx.cvar(ref ? 0.0 : -pi, ref ? 0.0 : pi,
                                 "theta_" + sys.power.nodes[n].id + hour_tag(t));
    }
  }
  art.f = grid(sys.power.lines.size(), T);
  for (size_t l = 0; l < sys.power.lines.size(); ++l) {
    const Line& line = sys.power.lines[l];
    const std::string tag = line.from + "_" + line.to;
    for (int t = 0; t < T; ++t) {
      art.f[l][t] = ctx.cvar(-line.capacity, line.capacity, "f_" + tag + hour_tag(t));
      ctx.row({{art.f[l][t], 1.0},
               {art.theta[line.from_idx][t], -line.susceptance},
               {art.theta[line.to_idx][t], line.susceptance}},
              Sense::kEqual, 0.0, "flowdef_" + tag + hour_tag(t));
    }
  }
  for (size_t n = 0; n < sys.power.nodes.size(); ++n) {
    for (int t = 0; t < T; ++t) {
      std::vector<LinearTerm> terms;
      for (int i : sys.generators_at[n]) terms.push_back({art.p[i][t], 1.0});
      for (int j : sys.wind_at[n]) terms.push_back({art.w[j][t], 1.0});
      for (int l : sys.lines_from[n]) terms.push_back({art.f[l][t], -1.0});
      for (int l : sys.lines_to[n]) terms.push_back({art.f[l][t], 1.0});
      double demand = 0.0;
      for (int d : sys.eloads_at[n]) demand += sys.power.loads[d].demand[t];
      ctx.row(std::move(terms), Sense::kEqual, demand,
              "powbal_" + sys.power.nodes[n].id + hour_tag(t));
    }
  }
}

void build_objective(const IntegratedSystem& sys, FormulationArtifacts& art) {
  if (art.p.size() != sys.power.generators.size() || art.g.size() != sys.gas.suppliers.size()) {
    throw FormulationError("power and gas blocks must be built before the objective");
  }
  const int T = sys.horizon;
  for (int t = 0; t < T; ++t) {
    for (size_t i = 0; i < sys.power.generators.size(); ++i) {
      const Generator& gen = sys.power.generators[i];
      if (gen.gfpp) continue;  // GFPP cost enters through its gas offtake
      art.model.add_objective_term(art.p[i][t], gen.cost);
    }
    for (size_t k = 0; k < sys.gas.suppliers.size(); ++k) {
      art.model.add_objective_term(art.g[k][t], sys.gas.suppliers[k].cost);
    }
  }
}

namespace {

// Gas balance at every node: supply minus GFPP offtake minus net flow sent
// into adjacent pipelines equals demand. `reverse` wires the extra
// direction-specific in/outflows of the bidirectional model.
void add_gas_balance(Ctx& ctx, bool reverse) {
  const IntegratedSystem& sys = ctx.sys;
  FormulationArtifacts& art = ctx.art;
  for (size_t m = 0; m < sys.gas.nodes.size(); ++m) {
    for (int t = 0; t < ctx.horizon; ++t) {
      std::vector<LinearTerm> terms;
      for (int k : sys.suppliers_at[m]) terms.push_back({art.g[k][t], 1.0});
      for (int i : sys.gfpps_at[m]) {
        terms.push_back({art.p[i][t], -sys.power.generators[i].conversion});
      }
      for (int z : sys.pipes_from[m]) {
        terms.push_back({art.q_in[z][t], -1.0});
        if (reverse) terms.push_back({art.q_out_rev[z][t], 1.0});
      }
      for (int z : sys.pipes_to[m]) {
        terms.push_back({art.q_out[z][t], 1.0});
        if (reverse) terms.push_back({art.q_in_rev[z][t], -1.0});
      }
      double demand = 0.0;
      for (int d : sys.gloads_at[m]) demand += sys.gas.loads[d].demand[t];
      ctx.row(std::move(terms), Sense::kEqual, demand,
              "gasbal_" + sys.gas.nodes[m].id + hour_tag(t));
    }
  }
}

double terminal_floor(const IntegratedSystem& sys, const FormulationConfig& config, int z) {
  if (!config.terminal_floor_values.empty()) return config.terminal_floor_values[z];
  return sys.gas.pipelines[z].initial_linepack;
}

}  // namespace

void build_unidirectional_gas_block(const IntegratedSystem& sys, FormulationArtifacts& art,
                                    const ExpansionPointSet& points, const BigMConfig& big_m,
                                    const FormulationConfig& config) {
  if (art.pr.size() != sys.gas.nodes.size()) {
    throw FormulationError("common gas block must be built first");
  }
  if (!config.terminal_floor_values.empty() &&
      config.terminal_floor_values.size() != sys.gas.pipelines.size()) {
    throw FormulationError("terminal floor override must cover every pipeline");
  }
  Ctx ctx{sys, art, sys.horizon};
  const int T = sys.horizon;
  const size_t nz = sys.gas.pipelines.size();

  art.q = grid(nz, T);
  art.q_in = grid(nz, T);
  art.q_out = grid(nz, T);
  art.h = grid(nz, T);
  for (size_t z = 0; z < nz; ++z) {
    const Pipeline& pipe = sys.gas.pipelines[z];
    const std::string tag = pipe.label();
    if (!pipe.has_compressor() && points.forward[z].empty()) {
      throw FormulationError("pipeline " + tag + ": empty expansion point set");
    }
    for (int t = 0; t < T; ++t) {
      art.q[z][t] = ctx.cvar(0.0, kInfinity, "q_" + tag + hour_tag(t));
      art.q_in[z][t] = ctx.cvar(0.0, kInfinity, "qin_" + tag + hour_tag(t));
      art.q_out[z][t] = ctx.cvar(0.0, kInfinity, "qout_" + tag + hour_tag(t));
      art.h[z][t] = ctx.cvar(0.0, kInfinity, "h_" + tag + hour_tag(t));
    }

    for (int t = 0; t < T; ++t) {
      // Flow as the average of pipeline in- and outflow.
      ctx.row({{art.q[z][t], 1.0}, {art.q_in[z][t], -0.5}, {art.q_out[z][t], -0.5}},
              Sense::kEqual, 0.0, "avg_" + tag + hour_tag(t));
      // Linepack mass tracks the average end pressure.
      ctx.row({{art.h[z][t], 1.0},
               {art.pr[pipe.from_idx][t], -pipe.linepack / 2.0},
               {art.pr[pipe.to_idx][t], -pipe.linepack / 2.0}},
              Sense::kEqual, 0.0, "lpdef_" + tag + hour_tag(t));
      // Intertemporal balance; hour 1 starts from the fixed initial level.
      if (t == 0) {
        ctx.row({{art.h[z][t], 1.0}, {art.q_in[z][t], -1.0}, {art.q_out[z][t], 1.0}},
                Sense::kEqual, pipe.initial_linepack, "lpdyn_" + tag + hour_tag(t));
      } else {
        ctx.row({{art.h[z][t], 1.0},
                 {art.h[z][t - 1], -1.0},
                 {art.q_in[z][t], -1.0},
                 {art.q_out[z][t], 1.0}},
                Sense::kEqual, 0.0, "lpdyn_" + tag + hour_tag(t));
      }
    }
    if (config.terminal_floor_enabled) {
      ctx.row({{art.h[z][T - 1], 1.0}}, Sense::kGreaterEqual,
              terminal_floor(sys, config, static_cast<int>(z)), "lpfloor_" + tag);
    }

    if (pipe.has_compressor()) continue;  // no planes, no tightening

    for (int t = 0; t < T; ++t) {
      const VarId pm = art.pr[pipe.from_idx][t];
      const VarId pu = art.pr[pipe.to_idx][t];
      if (config.tightening) {
        ctx.row({{pm, 1.0}, {pu, -1.0}}, Sense::kGreaterEqual, 0.0, "ord_" + tag + hour_tag(t));
        ctx.row({{art.q[z][t], 1.0}, {pm, -big_m.slope[z]}, {pu, big_m.slope[z]}},
                Sense::kLessEqual, 0.0, "slope_" + tag + hour_tag(t));
      }
      for (size_t v = 0; v < points.forward[z].size(); ++v) {
        const ExpansionPoint& pt = points.forward[z][v];
        const auto [cm, cu] = weymouth_plane_coefficients(pipe.weymouth, pt.pr_from, pt.pr_to);
        ctx.row({{art.q[z][t], 1.0}, {pm, -cm}, {pu, cu}}, Sense::kLessEqual, 0.0,
                "wey_" + tag + "_v" + std::to_string(v) + hour_tag(t));
      }
    }
  }

  add_gas_balance(ctx, /*reverse=*/false);
}

void build_bidirectional_gas_block(const IntegratedSystem& sys, FormulationArtifacts& art,
                                   const ExpansionPointSet& points, const BigMConfig& big_m,
                                   const FormulationConfig& config) {
  if (art.pr.size() != sys.gas.nodes.size()) {
    throw FormulationError("common gas block must be built first");
  }
  if (!config.terminal_floor_values.empty() &&
      config.terminal_floor_values.size() != sys.gas.pipelines.size()) {
    throw FormulationError("terminal floor override must cover every pipeline");
  }
  Ctx ctx{sys, art, sys.horizon};
  const int T = sys.horizon;
  const size_t nz = sys.gas.pipelines.size();

  art.q = grid(nz, T);
  art.q_in = grid(nz, T);
  art.q_out = grid(nz, T);
  art.h = grid(nz, T);
  art.q_pos = grid(nz, T);
  art.q_neg = grid(nz, T);
  art.q_in_rev = grid(nz, T);
  art.q_out_rev = grid(nz, T);
  art.y = grid(nz, T);
  art.phi_from = grid(nz, T);
  art.phi_to = grid(nz, T);

  for (size_t z = 0; z < nz; ++z) {
    const Pipeline& pipe = sys.gas.pipelines[z];
    const std::string tag = pipe.label();
    const std::string rtag = pipe.to + "_" + pipe.from;
    const bool compressor = pipe.has_compressor();
    if (!compressor && points.forward[z].empty()) {
      throw FormulationError("pipeline " + tag + ": empty expansion point set");
    }
    const bool reversible = !compressor && !points.reverse[z].empty();
    const double m_flow = big_m.flow[z];
    const double m_pr = big_m.pressure[z];
    const GasNode& from = sys.gas.nodes[pipe.from_idx];
    const GasNode& to = sys.gas.nodes[pipe.to_idx];

    for (int t = 0; t < T; ++t) {
      const std::string ht = hour_tag(t);
      // Compressor pipelines stay unidirectional; boxes that preclude
      // reverse pressure ordering pin the direction binary as well.
      const double q_lo = compressor ? 0.0 : -m_flow;
      art.q[z][t] = ctx.cvar(q_lo, m_flow, "q_" + tag + ht);
      art.q_in[z][t] = ctx.cvar(0.0, kInfinity, "qin_" + tag + ht);
      art.q_out[z][t] = ctx.cvar(0.0, kInfinity, "qout_" + tag + ht);
      art.h[z][t] = ctx.cvar(0.0, kInfinity, "h_" + tag + ht);
      art.q_pos[z][t] = ctx.cvar(0.0, m_flow, "qpos_" + tag + ht);
      art.q_neg[z][t] = ctx.cvar(0.0, m_flow, "qneg_" + tag + ht);
      art.q_in_rev[z][t] = ctx.cvar(0.0, kInfinity, "qin_" + rtag + ht);
      art.q_out_rev[z][t] = ctx.cvar(0.0, kInfinity, "qout_" + rtag + ht);
      // A compressor pipeline is forced forward by q >= 0, and a pipeline
      // whose boxes preclude reverse pressure ordering cannot flow backward;
      // pinning y = 1 in both cases spares the search useless branches.
      const VarId y = compressor || !reversible
                          ? art.model.add_variable({VarKind::kBinary, 1, 1, "y_" + tag + ht})
                          : ctx.bvar("y_" + tag + ht);
      art.y[z][t] = y;
      if (!compressor) {
        art.phi_from[z][t] = ctx.cvar(0.0, from.pr_max, "phim_" + tag + ht);
        art.phi_to[z][t] = ctx.cvar(0.0, to.pr_max, "phiu_" + tag + ht);
      }

      // Net flow split into direction-specific parts, one active at a time.
      ctx.row({{art.q[z][t], 1.0}, {art.q_pos[z][t], -1.0}, {art.q_neg[z][t], 1.0}},
              Sense::kEqual, 0.0, "qdef_" + tag + ht);
      ctx.row({{art.q_pos[z][t], 1.0}, {y, -m_flow}}, Sense::kLessEqual, 0.0, "dirp_" + tag + ht);
      ctx.row({{art.q_neg[z][t], 1.0}, {y, m_flow}}, Sense::kLessEqual, m_flow,
              "dirn_" + tag + ht);
      ctx.row({{art.q_pos[z][t], 1.0}, {art.q_in[z][t], -0.5}, {art.q_out[z][t], -0.5}},
              Sense::kEqual, 0.0, "avgf_" + tag + ht);
      ctx.row({{art.q_neg[z][t], 1.0}, {art.q_in_rev[z][t], -0.5}, {art.q_out_rev[z][t], -0.5}},
              Sense::kEqual, 0.0, "avgr_" + tag + ht);

      // Linepack balance over both directions' in/outflows.
      if (t == 0) {
        ctx.row({{art.h[z][t], 1.0},
                 {art.q_in[z][t], -1.0},
                 {art.q_out[z][t], 1.0},
                 {art.q_in_rev[z][t], -1.0},
                 {art.q_out_rev[z][t], 1.0}},
                Sense::kEqual, pipe.initial_linepack, "lpdyn_" + tag + ht);
      } else {
        ctx.row({{art.h[z][t], 1.0},
                 {art.h[z][t - 1], -1.0},
                 {art.q_in[z][t], -1.0},
                 {art.q_out[z][t], 1.0},
                 {art.q_in_rev[z][t], -1.0},
                 {art.q_out_rev[z][t], 1.0}},
                Sense::kEqual, 0.0, "lpdyn_" + tag + ht);
      }
      ctx.row({{art.h[z][t], 1.0},
               {art.pr[pipe.from_idx][t], -pipe.linepack / 2.0},
               {art.pr[pipe.to_idx][t], -pipe.linepack / 2.0}},
              Sense::kEqual, 0.0, "lpdef_" + tag + ht);
    }
    if (config.terminal_floor_enabled) {
      ctx.row({{art.h[z][T - 1], 1.0}}, Sense::kGreaterEqual,
              terminal_floor(sys, config, static_cast<int>(z)), "lpfloor_" + tag);
    }

    if (compressor) continue;

    for (int t = 0; t < T; ++t) {
      const std::string ht = hour_tag(t);
      const VarId pm = art.pr[pipe.from_idx][t];
      const VarId pu = art.pr[pipe.to_idx][t];
      const VarId y = art.y[z][t];
      const VarId fm = art.phi_from[z][t];
      const VarId fu = art.phi_to[z][t];

      // Binary expansion phi = pr * y; the nonnegativity halves of the
      // paper's box constraints are the variables' own lower bounds.
      ctx.row({{fm, 1.0}, {y, -m_pr}}, Sense::kLessEqual, 0.0, "bexp1_" + tag + ht);
      ctx.row({{fm, 1.0}, {pm, -1.0}, {y, m_pr}}, Sense::kLessEqual, m_pr, "bexp2_" + tag + ht);
      ctx.row({{fm, 1.0}, {pm, -1.0}, {y, -m_pr}}, Sense::kGreaterEqual, -m_pr,
              "bexp3_" + tag + ht);
      ctx.row({{fu, 1.0}, {y, -m_pr}}, Sense::kLessEqual, 0.0, "bexp4_" + tag + ht);
      ctx.row({{fu, 1.0}, {pu, -1.0}, {y, m_pr}}, Sense::kLessEqual, m_pr, "bexp5_" + tag + ht);
      ctx.row({{fu, 1.0}, {pu, -1.0}, {y, -m_pr}}, Sense::kGreaterEqual, -m_pr,
              "bexp6_" + tag + ht);

      if (config.tightening) {
        // Direction-consistent pressure ordering and slope caps.
        ctx.row({{fm, 1.0}, {fu, -1.0}}, Sense::kGreaterEqual, 0.0, "ord1_" + tag + ht);
        ctx.row({{pu, 1.0}, {pm, -1.0}, {fu, -1.0}, {fm, 1.0}}, Sense::kGreaterEqual, 0.0,
                "ord0_" + tag + ht);
        ctx.row({{art.q_pos[z][t], 1.0}, {fm, -big_m.slope[z]}, {fu, big_m.slope[z]}},
                Sense::kLessEqual, 0.0, "slopef_" + tag + ht);
        ctx.row({{art.q_neg[z][t], 1.0},
                 {pu, -big_m.slope[z]},
                 {pm, big_m.slope[z]},
                 {fu, big_m.slope[z]},
                 {fm, -big_m.slope[z]}},
                Sense::kLessEqual, 0.0, "sloper_" + tag + ht);
      }

      // Direction-gated Taylor planes. The deactivation constant is computed
      // per plane: large enough to free the whole pressure box, no larger.
      for (size_t v = 0; v < points.forward[z].size(); ++v) {
        const ExpansionPoint& pt = points.forward[z][v];
        const auto [cm, cu] = weymouth_plane_coefficients(pipe.weymouth, pt.pr_from, pt.pr_to);
        const double deact = std::max(0.0, cu * to.pr_max - cm * from.pr_min);
        ctx.row({{art.q_pos[z][t], 1.0}, {pm, -cm}, {pu, cu}, {y, deact}}, Sense::kLessEqual,
                deact, "weyf_" + tag + "_v" + std::to_string(v) + ht);
      }
      for (size_t v = 0; v < points.reverse[z].size(); ++v) {
        const ExpansionPoint& pt = points.reverse[z][v];
        const auto [cu, cm] = weymouth_plane_coefficients(pipe.weymouth, pt.pr_from, pt.pr_to);
        const double deact = std::max(0.0, cm * from.pr_max - cu * to.pr_min);
        ctx.row({{art.q_neg[z][t], 1.0}, {pu, -cu}, {pm, cm}, {y, -deact}}, Sense::kLessEqual,
                0.0, "weyr_" + tag + "_v" + std::to_string(v) + ht);
      }
    }
  }

  add_gas_balance(ctx, /*reverse=*/true);
}

FormulationArtifacts build_model(const IntegratedSystem& sys, ModelMode mode,
                                 const FormulationConfig& config) {
  FormulationArtifacts art;
  art.mode = mode;
  const ExpansionPointSet points = make_expansion_points(sys, config.expansion_point_count);
  const BigMConfig big_m = derive_big_m(sys, config);
  build_common_gas_block(sys, art);
  build_power_block(sys, art);
  if (mode == ModelMode::kUnidirectional) {
    build_unidirectional_gas_block(sys, art, points, big_m, config);
  } else {
    build_bidirectional_gas_block(sys, art, points, big_m, config);
  }
  build_objective(sys, art);
  return art;
}

}  // namespace gasflex
