#pragma once

#include <string>
#include <vector>

#include "gasflex/schedule.hpp"
#include "gasflex/system.hpp"

namespace gasflex {

struct DeltaEntry {
  double value = 0.0;
  bool defined = false;
};

/// Per pipeline-hour normalized Weymouth residual and its network RMS
/// aggregate. The denominator is oriented along the optimal flow direction
/// and taken in absolute value; near-zero denominators mark the entry
/// undefined instead of producing 0/0.
struct ApproxErrorReport {
  std::vector<std::vector<DeltaEntry>> delta;  // [pipeline][hour]
  double xi = 0.0;
  int undefined_count = 0;
  bool all_undefined = false;
};

ApproxErrorReport approximation_error_delta(const ScheduleSolution& schedule,
                                            const IntegratedSystem& system,
                                            double eps_den = 1e-9);
/// RMS over defined entries, normalized by |T| * |Z| (undefined contribute 0).
double approximation_error_xi(const ApproxErrorReport& report, const IntegratedSystem& system);

struct DirectionStatus {
  double flow = 0.0;        // q* (signed, declared orientation)
  double exact_flow = 0.0;  // sign(pr_m^2 - pr_u^2) * K * sqrt(|pr_m^2 - pr_u^2|)
  bool consistent = true;
  bool exempt = false;  // compressor pipelines
};

struct DirectionChange {
  int pipeline = 0;
  int hour = 0;  // 1-based hour where the new direction takes effect
  int from_dir = 1, to_dir = 0;
};

struct DirectionReport {
  std::vector<std::vector<DirectionStatus>> status;  // [pipeline][hour]
  std::vector<DirectionChange> changes;
  int inconsistent_count = 0;

  bool all_consistent() const { return inconsistent_count == 0; }
};

/// Flow-direction consistency against the exact Weymouth relation, plus the
/// direction-change events of a bidirectional run. tol_flow is per pipeline;
/// empty uses 1e-6 * M_flow.
DirectionReport verify_directions(const ScheduleSolution& schedule,
                                  const IntegratedSystem& system,
                                  std::vector<double> tol_flow = {});

struct LinepackProfile {
  std::vector<std::vector<double>> charge, discharge;  // [pipeline][hour]
  std::vector<double> total_charge, total_discharge;   // per pipeline
  double network_charge = 0.0, network_discharge = 0.0;
};

LinepackProfile linepack_profile(const ScheduleSolution& schedule,
                                 const IntegratedSystem& system);

struct ComparisonReport {
  double cost_uni = 0.0, cost_bi = 0.0;
  double savings_percent = 0.0;
  double gfpp_share_uni = 0.0, gfpp_share_bi = 0.0;  // percent of electric demand
  LinepackProfile linepack_uni, linepack_bi;
  // Hourly production change as a percentage of installed capacity; entry 0 is 0.
  std::vector<std::vector<double>> ramp_uni, ramp_bi;  // [generator][hour]
};

ComparisonReport compare_runs(const ScheduleSolution& uni, const ScheduleSolution& bi,
                              const IntegratedSystem& system);

}  // namespace gasflex
