#include <cmath>
#include <stdexcept>

#include "gasflex/analysis.hpp"
#include "gasflex/formulation.hpp"

namespace gasflex {

namespace {

int sign_with_tol(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

}  // namespace

ApproxErrorReport approximation_error_delta(const ScheduleSolution& s,
                                            const IntegratedSystem& sys, double eps_den) {
  ApproxErrorReport out;
  const size_t nz = sys.gas.pipelines.size();
  out.delta.assign(nz, std::vector<DeltaEntry>(s.horizon));
  for (size_t z = 0; z < nz; ++z) {
    const Pipeline& pipe = sys.gas.pipelines[z];
    for (int t = 0; t < s.horizon; ++t) {
      DeltaEntry& e = out.delta[z][t];
      if (pipe.has_compressor()) {
        ++out.undefined_count;  // not Weymouth-governed
        continue;
      }
      const double q = s.q[z][t];
      const double pm = s.pr[pipe.from_idx][t];
      const double pu = s.pr[pipe.to_idx][t];
      // Squared-pressure difference oriented along the optimal flow.
      double dsq = pm * pm - pu * pu;
      if (q < 0) {
        dsq = -dsq;
      } else if (std::abs(q) < 1e-12) {
        dsq = std::abs(dsq);
      }
      const double den = pipe.weymouth * pipe.weymouth * dsq;
      if (std::abs(den) < eps_den) {
        ++out.undefined_count;
        continue;
      }
      e.defined = true;
      e.value = std::abs(q * q - den) / std::abs(den);
    }
  }
  out.xi = approximation_error_xi(out, sys);
  out.all_undefined = true;
  for (const auto& row : out.delta) {
    for (const DeltaEntry& e : row) {
      if (e.defined) out.all_undefined = false;
    }
  }
  return out;
}

double approximation_error_xi(const ApproxErrorReport& report, const IntegratedSystem& sys) {
  const double cells =
      static_cast<double>(sys.gas.pipelines.size()) * static_cast<double>(sys.horizon);
  if (cells == 0) return 0.0;
  double sum = 0.0;
  for (const auto& row : report.delta) {
    for (const DeltaEntry& e : row) {
      if (e.defined) sum += e.value * e.value;
    }
  }
  return std::sqrt(sum / cells);
}

DirectionReport verify_directions(const ScheduleSolution& s, const IntegratedSystem& sys,
                                  std::vector<double> tol_flow) {
  if (tol_flow.empty()) {
    const BigMConfig big_m = derive_big_m(sys);
    tol_flow.resize(big_m.flow.size());
    for (size_t z = 0; z < big_m.flow.size(); ++z) tol_flow[z] = 1e-6 * big_m.flow[z];
  }
  DirectionReport out;
  const size_t nz = sys.gas.pipelines.size();
  out.status.assign(nz, std::vector<DirectionStatus>(s.horizon));
  for (size_t z = 0; z < nz; ++z) {
    const Pipeline& pipe = sys.gas.pipelines[z];
    for (int t = 0; t < s.horizon; ++t) {
      DirectionStatus& st = out.status[z][t];
      st.flow = s.q[z][t];
      const double pm = s.pr[pipe.from_idx][t];
      const double pu = s.pr[pipe.to_idx][t];
      const double dsq = pm * pm - pu * pu;
      st.exact_flow = (dsq >= 0 ? 1.0 : -1.0) * pipe.weymouth * std::sqrt(std::abs(dsq));
      if (pipe.has_compressor()) {
        st.exempt = true;
        st.consistent = true;
        continue;
      }
      const int flow_sign = sign_with_tol(st.flow, tol_flow[z]);
      const int exact_sign = sign_with_tol(dsq, 1e-9 * std::max(1.0, pm * pm + pu * pu));
      st.consistent = flow_sign == 0 || flow_sign == exact_sign;
      if (!st.consistent) ++out.inconsistent_count;
    }
    if (!s.y.empty()) {
      for (int t = 1; t < s.horizon; ++t) {
        const int prev = static_cast<int>(std::lround(s.y[z][t - 1]));
        const int cur = static_cast<int>(std::lround(s.y[z][t]));
        if (prev != cur) {
          out.changes.push_back({static_cast<int>(z), t + 1, prev, cur});
        }
      }
    }
  }
  return out;
}

LinepackProfile linepack_profile(const ScheduleSolution& s, const IntegratedSystem& sys) {
  LinepackProfile out;
  const size_t nz = sys.gas.pipelines.size();
  out.charge.assign(nz, std::vector<double>(s.horizon, 0.0));
  out.discharge.assign(nz, std::vector<double>(s.horizon, 0.0));
  out.total_charge.assign(nz, 0.0);
  out.total_discharge.assign(nz, 0.0);
  for (size_t z = 0; z < nz; ++z) {
    double prev = sys.gas.pipelines[z].initial_linepack;
    for (int t = 0; t < s.horizon; ++t) {
      const double diff = s.h[z][t] - prev;
      out.charge[z][t] = std::max(0.0, diff);
      out.discharge[z][t] = std::max(0.0, -diff);
      out.total_charge[z] += out.charge[z][t];
      out.total_discharge[z] += out.discharge[z][t];
      prev = s.h[z][t];
    }
    out.network_charge += out.total_charge[z];
    out.network_discharge += out.total_discharge[z];
  }
  return out;
}

ComparisonReport compare_runs(const ScheduleSolution& uni, const ScheduleSolution& bi,
                              const IntegratedSystem& sys) {
  if (uni.horizon != sys.horizon || bi.horizon != sys.horizon ||
      uni.p.size() != sys.power.generators.size() || bi.p.size() != sys.power.generators.size() ||
      uni.q.size() != sys.gas.pipelines.size() || bi.q.size() != sys.gas.pipelines.size()) {
    throw std::invalid_argument("schedules do not belong to the given system");
  }

  ComparisonReport out;
  out.cost_uni = uni.objective;
  out.cost_bi = bi.objective;
  out.savings_percent =
      out.cost_uni != 0.0 ? (out.cost_uni - out.cost_bi) / out.cost_uni * 100.0 : 0.0;

  double total_demand = 0.0;
  for (const ElectricLoad& l : sys.power.loads) {
    for (double d : l.demand) total_demand += d;
  }
  auto gfpp_share = [&](const ScheduleSolution& s) {
    if (total_demand <= 0) return 0.0;
    double production = 0.0;
    for (size_t i = 0; i < sys.power.generators.size(); ++i) {
      if (!sys.power.generators[i].gfpp) continue;
      for (int t = 0; t < s.horizon; ++t) production += s.p[i][t];
    }
    return production / total_demand * 100.0;
  };
  out.gfpp_share_uni = gfpp_share(uni);
  out.gfpp_share_bi = gfpp_share(bi);

  out.linepack_uni = linepack_profile(uni, sys);
  out.linepack_bi = linepack_profile(bi, sys);

  auto ramps = [&](const ScheduleSolution& s) {
    std::vector<std::vector<double>> out_r(sys.power.generators.size(),
                                           std::vector<double>(s.horizon, 0.0));
    for (size_t i = 0; i < sys.power.generators.size(); ++i) {
      const double pmax = sys.power.generators[i].pmax;
      if (pmax <= 0) continue;
      for (int t = 1; t < s.horizon; ++t) {
        out_r[i][t] = (s.p[i][t] - s.p[i][t - 1]) / pmax * 100.0;
      }
    }
    return out_r;
  };
  out.ramp_uni = ramps(uni);
  out.ramp_bi = ramps(bi);
  return out;
}

}  // namespace gasflex
