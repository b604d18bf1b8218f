#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "gasflex/model_ir.hpp"
#include "gasflex/system.hpp"

namespace gasflex {

class FormulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelMode { kUnidirectional, kBidirectional };

struct FormulationConfig {
  int expansion_point_count = 5;
  double pressure_resolution = 0.1;  // eps_pr [bar]; M_slope = M_flow / eps_pr
  bool tightening = true;

  // Optional big-M overrides; 0 keeps the derived value. The scale factor
  // multiplies derived flow constants (used by big-M regression tests).
  double flow_big_m_override = 0.0;
  double slope_big_m_override = 0.0;
  double flow_big_m_scale = 1.0;

  // Terminal linepack floor h_T >= floor. Disabled for intermediate windows
  // of a split horizon; values override the default (the pipeline's initial
  // linepack) so the final window can honor the original level.
  bool terminal_floor_enabled = true;
  std::vector<double> terminal_floor_values;  // empty: use initial linepack
};

struct ExpansionPoint {
  double pr_from = 0.0;
  double pr_to = 0.0;
};

/// Taylor expansion points per pipeline. Forward points satisfy
/// pr_from > pr_to >= 0; reverse points are the mirrored set used by the
/// bidirectional model. A pipeline whose pressure boxes admit no reverse
/// operation has an empty reverse list (its direction binary gets fixed).
struct ExpansionPointSet {
  std::vector<std::vector<ExpansionPoint>> forward;
  std::vector<std::vector<ExpansionPoint>> reverse;
};

struct BigMConfig {
  std::vector<double> flow;      // per pipeline, gas units/h
  std::vector<double> pressure;  // per pipeline, bar
  std::vector<double> slope;     // per pipeline, gas units per bar
};

/// Built model plus the (symbol, entity, hour) -> variable-id maps for every
/// decision variable. Entries are -1 where a symbol does not exist in the
/// chosen mode. All per-entity vectors are indexed [entity][hour].
struct FormulationArtifacts {
  ModelMode mode = ModelMode::kUnidirectional;
  OptModel model;

  std::vector<std::vector<VarId>> p, w;      // generators, wind farms
  std::vector<std::vector<VarId>> theta, f;  // power nodes, lines
  std::vector<std::vector<VarId>> g, pr;     // suppliers, gas nodes
  std::vector<std::vector<VarId>> q, q_in, q_out, h;  // pipelines

  // Bidirectional only.
  std::vector<std::vector<VarId>> q_pos, q_neg, q_in_rev, q_out_rev, y, phi_from, phi_to;
};

/// Points on the segment from the (PR^max_from, PR^min_to) corner toward the
/// box midpoint, spread so the tangency rays cover the pressure box.
/// Deterministic; doubling the count refines the set in place (supersets).
std::vector<ExpansionPoint> expansion_points(const Pipeline& pipe, int count,
                                             const IntegratedSystem& system);
ExpansionPointSet make_expansion_points(const IntegratedSystem& system, int count);

/// Tangent-plane coefficients (c_from, c_to) of the relaxed Weymouth flow at
/// a fixed pressure point: q <= c_from * pr_from - c_to * pr_to.
std::pair<double, double> weymouth_plane_coefficients(double weymouth_k, double pr_from,
                                                      double pr_to);

BigMConfig derive_big_m(const IntegratedSystem& system, const FormulationConfig& config = {});

void build_common_gas_block(const IntegratedSystem& system, FormulationArtifacts& artifacts);
void build_power_block(const IntegratedSystem& system, FormulationArtifacts& artifacts);
void build_objective(const IntegratedSystem& system, FormulationArtifacts& artifacts);
void build_unidirectional_gas_block(const IntegratedSystem& system,
                                    FormulationArtifacts& artifacts,
                                    const ExpansionPointSet& points, const BigMConfig& big_m,
                                    const FormulationConfig& config);
void build_bidirectional_gas_block(const IntegratedSystem& system,
                                   FormulationArtifacts& artifacts,
                                   const ExpansionPointSet& points, const BigMConfig& big_m,
                                   const FormulationConfig& config);

FormulationArtifacts build_model(const IntegratedSystem& system, ModelMode mode,
                                 const FormulationConfig& config = {});

}  // namespace gasflex
