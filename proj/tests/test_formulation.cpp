#include <cmath>
#include <random>

#include "doctest.h"
#include "gasflex/formulation.hpp"
#include "gasflex/schedule.hpp"
#include "support/helpers.hpp"

using namespace gasflex;
using namespace gasflex::testing;

namespace {

// Exact relaxed Weymouth flow cap, the function the planes linearize.
double exact_flow(double k, double pm, double pu) {
  return k * std::sqrt(std::max(0.0, pm * pm - pu * pu));
}

IntegratedSystem single_pipe_system(int horizon, std::vector<double> demand, double k = 0.5,
                                    double s = 0.4, double h0 = 16.0) {
  return SystemBuilder(horizon)
      .pnode("n1", true)
      .gen("G1", "n1", 1.0, 5.0)
      .eload("L1", "n1", std::vector<double>(horizon, 0.0))
      .gnode("m1", 10, 70)
      .gnode("m2", 10, 70)
      .pipe("m1", "m2", k, s, h0)
      .supplier("GS1", "m1", 50.0, 4.0)
      .gload("GD1", "m2", std::move(demand))
      .build();
}

}  // namespace

TEST_CASE("plane coefficients match the closed form") {
  const auto [cm, cu] = weymouth_plane_coefficients(1.0, 2.0, 1.0);
  CHECK(cm == doctest::Approx(1.1547005383792515).epsilon(1e-12));
  CHECK(cu == doctest::Approx(0.5773502691896258).epsilon(1e-12));
  // Tangency at the expansion point itself.
  CHECK(2.0 * cm - 1.0 * cu == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  const auto [am, au] = weymouth_plane_coefficients(1.0, 1.0, 0.0);
  CHECK(am == doctest::Approx(1.0));
  CHECK(au == doctest::Approx(0.0));

  CHECK_THROWS_WITH_AS(weymouth_plane_coefficients(1.0, 1.0, 1.0),
                       doctest::Contains("degenerate"), FormulationError);
  CHECK_THROWS_AS(weymouth_plane_coefficients(1.0, 1.0, 2.0), FormulationError);
}

TEST_CASE("planes are an outer approximation, tight along the tangency ray") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double k = 0.1 + 5.0 * u01(rng);
    const double pmax_m = 20.0 + 80.0 * u01(rng);
    const double pmax_u = 20.0 + 80.0 * u01(rng);
    const double exp_m = pmax_m * (0.3 + 0.7 * u01(rng));
    const double exp_u = exp_m * 0.95 * u01(rng);
    const auto [cm, cu] = weymouth_plane_coefficients(k, exp_m, exp_u);

    for (int i = 0; i < 400; ++i) {
      const double pm = pmax_m * u01(rng);
      const double pu = pm * u01(rng);  // pm >= pu >= 0
      const double plane = cm * pm - cu * pu;
      CHECK(plane >= exact_flow(k, pm, pu) - 1e-9);
    }
    for (int i = 0; i < 50; ++i) {
      const double t = 0.02 + 0.98 * u01(rng);
      const double plane = cm * (t * exp_m) - cu * (t * exp_u);
      const double exact = exact_flow(k, t * exp_m, t * exp_u);
      CHECK(plane == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("expansion points stay inside the box with positive denominators") {
  IntegratedSystem sys = SystemBuilder(1)
                             .pnode("n1", true)
                             .gnode("m1", 0, 100)
                             .gnode("m2", 0, 100)
                             .pipe("m1", "m2", 1.0, 1.0, 10.0)
                             .supplier("GS1", "m1", 1, 1)
                             .build();
  const Pipeline& z = sys.gas.pipelines[0];

  SUBCASE("count one lands on the high-gap corner") {
    const auto pts = expansion_points(z, 1, sys);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].pr_from == doctest::Approx(100.0));
    CHECK(pts[0].pr_to == doctest::Approx(0.0));
    CHECK(pts[0].pr_from > pts[0].pr_to);
  }
  SUBCASE("five distinct points, all usable") {
    const auto pts = expansion_points(z, 5, sys);
    REQUIRE(pts.size() == 5);
    for (size_t i = 0; i < pts.size(); ++i) {
      CHECK(pts[i].pr_from > pts[i].pr_to);
      CHECK(pts[i].pr_from <= 100.0);
      CHECK(pts[i].pr_to >= 0.0);
      CHECK_NOTHROW(weymouth_plane_coefficients(1.0, pts[i].pr_from, pts[i].pr_to));
      for (size_t j = i + 1; j < pts.size(); ++j) {
        CHECK((pts[i].pr_from != pts[j].pr_from || pts[i].pr_to != pts[j].pr_to));
      }
    }
  }
  SUBCASE("doubling the count refines the set in place") {
    const auto small = expansion_points(z, 2, sys);
    const auto large = expansion_points(z, 4, sys);
    for (const auto& p : small) {
      bool found = false;
      for (const auto& q : large) {
        found = found || (std::abs(p.pr_from - q.pr_from) < 1e-12 &&
                          std::abs(p.pr_to - q.pr_to) < 1e-12);
      }
      CHECK(found);
    }
  }
}

TEST_CASE("a box that admits no forward point is rejected") {
  IntegratedSystem sys = SystemBuilder(1)
                             .pnode("n1", true)
                             .gnode("m1", 0, 50)
                             .gnode("m2", 60, 80)
                             .pipe("m1", "m2", 1.0, 1.0, 30.0)
                             .supplier("GS1", "m1", 1, 1)
                             .build();
  CHECK_THROWS_WITH_AS(expansion_points(sys.gas.pipelines[0], 3, sys),
                       doctest::Contains("cannot carry forward flow"), FormulationError);
}

TEST_CASE("derived big-M constants") {
  IntegratedSystem sys = SystemBuilder(1)
                             .pnode("n1", true)
                             .gnode("m1", 10, 80)
                             .gnode("m2", 10, 80)
                             .gnode("m3", 10, 70)
                             .pipe("m1", "m2", 1.0, 1.0, 45.0)
                             .pipe("m2", "m3", 2.0, 1.0, 45.0)
                             .supplier("GS1", "m1", 100, 1)
                             .build();
  FormulationConfig config;
  const BigMConfig big_m = derive_big_m(sys, config);
  CHECK(big_m.flow[0] == doctest::Approx(80.0));   // K * PR^max
  CHECK(big_m.flow[1] == doctest::Approx(160.0));  // 2 * 80
  CHECK(big_m.pressure[0] == doctest::Approx(80.0));
  CHECK(big_m.pressure[1] == doctest::Approx(80.0));  // higher-bound endpoint
  CHECK(big_m.slope[0] == doctest::Approx(big_m.flow[0] / config.pressure_resolution));

  IntegratedSystem asym = SystemBuilder(1)
                              .pnode("n1", true)
                              .gnode("m1", 10, 77)
                              .gnode("m2", 10, 70)
                              .pipe("m1", "m2", 1.0, 1.0, 45.0)
                              .supplier("GS1", "m1", 100, 1)
                              .build();
  CHECK(derive_big_m(asym, config).pressure[0] == doctest::Approx(77.0));
}

TEST_CASE("objective covers non-GFPP production and gas supply only") {
  IntegratedSystem sys = SystemBuilder(2)
                             .pnode("n1", true)
                             .gen("G1", "n1", 10, 10.0)
                             .eload("L1", "n1", {0, 0})
                             .gnode("m1", 10, 70)
                             .gnode("m2", 10, 70)
                             .pipe("m1", "m2", 0.5, 0.4, 16.0)
                             .supplier("GS1", "m1", 10, 3.0)
                             .gload("GD1", "m2", {0, 0})
                             .build();
  FormulationArtifacts art = build_model(sys, ModelMode::kUnidirectional);
  CHECK(art.model.objective().size() == 4);  // 2 hours x (one generator + one supplier)

  // Zero demand everywhere: the all-zero schedule is feasible and optimal.
  RawSolution r = solve_optimal(art.model);
  CHECK(r.objective == doctest::Approx(0.0));

  IntegratedSystem all_gfpp = SystemBuilder(2)
                                  .pnode("n1", true)
                                  .gfpp("G1", "n1", 10, 2.0, "m1")
                                  .eload("L1", "n1", {1, 1})
                                  .gnode("m1", 10, 70)
                                  .gnode("m2", 10, 70)
                                  .pipe("m1", "m2", 0.5, 0.4, 16.0)
                                  .supplier("GS1", "m1", 10, 3.0)
                                  .gload("GD1", "m2", {0, 0})
                                  .build();
  FormulationArtifacts art2 = build_model(all_gfpp, ModelMode::kUnidirectional);
  CHECK(art2.model.objective().size() == 2);  // gas-supply terms only
}

TEST_CASE("power flow equation and merit order") {
  SUBCASE("one line, flow follows the angle difference") {
    IntegratedSystem sys = SystemBuilder(1)
                               .pnode("n1", true)
                               .pnode("n2")
                               .line("n1", "n2", 10.0, 100.0)
                               .gen("G1", "n1", 5, 10.0)
                               .eload("L1", "n2", {1.0})
                               .gnode("m1", 10, 70)
                               .supplier("GS1", "m1", 1, 1)
                               .build();
    ScheduleSolution s = solve_and_extract(sys, ModelMode::kUnidirectional);
    CHECK(s.f[0][0] == doctest::Approx(1.0));
    CHECK(s.theta[0][0] == doctest::Approx(0.0));   // reference
    CHECK(s.theta[1][0] == doctest::Approx(-0.1));  // f = B(theta_n - theta_r)
    CHECK(s.p[0][0] == doctest::Approx(1.0));
  }
  SUBCASE("islanded load makes the model infeasible at solve time") {
    IntegratedSystem sys = SystemBuilder(1)
                               .pnode("n1", true)
                               .pnode("n2")
                               .gen("G1", "n1", 5, 10.0)
                               .eload("L1", "n2", {1.0})
                               .gnode("m1", 10, 70)
                               .supplier("GS1", "m1", 1, 1)
                               .build();
    FormulationArtifacts art = build_model(sys, ModelMode::kUnidirectional);
    SimplexMilpSolver solver;
    CHECK(solver.solve(art.model, {}).status == SolveStatus::kInfeasible);
  }
  SUBCASE("cheaper generator is dispatched first") {
    IntegratedSystem sys = SystemBuilder(1)
                               .pnode("n1", true)
                               .gen("G1", "n1", 10, 10.0)
                               .gen("G2", "n1", 10, 20.0)
                               .eload("L1", "n1", {15.0})
                               .gnode("m1", 10, 70)
                               .supplier("GS1", "m1", 1, 1)
                               .build();
    ScheduleSolution s = solve_and_extract(sys, ModelMode::kUnidirectional);
    CHECK(s.p[0][0] == doctest::Approx(10.0));
    CHECK(s.p[1][0] == doctest::Approx(5.0));
    CHECK(s.objective == doctest::Approx(200.0));
  }
  SUBCASE("missing reference node is rejected at build time") {
    IntegratedSystem sys = SystemBuilder(1)
                               .pnode("n1")
                               .gen("G1", "n1", 5, 10.0)
                               .eload("L1", "n1", {1.0})
                               .gnode("m1", 10, 70)
                               .supplier("GS1", "m1", 1, 1)
                               .build();
    CHECK_THROWS_WITH_AS(build_model(sys, ModelMode::kUnidirectional),
                         doctest::Contains("reference"), FormulationError);
  }
}

TEST_CASE("compression ratio admits boost up to Gamma and no further") {
  auto compressor_case = [](double gamma) {
    // Pressures pinned by bounds: pr_m1 = 40, pr_m2 = 60; feasible iff 60 <= Gamma*40.
    return SystemBuilder(1)
        .pnode("n1", true)
        .gnode("m1", 40, 40)
        .gnode("m2", 60, 60)
        .pipe("m1", "m2", 0.5, 0.2, 10.0, gamma)
        .supplier("GS1", "m1", 10, 2.0)
        .gload("GD1", "m2", {1.0})
        .build();
  };
  SimplexMilpSolver solver;
  FormulationArtifacts feasible = build_model(compressor_case(1.5), ModelMode::kUnidirectional);
  CHECK(solver.solve(feasible.model, {}).status == SolveStatus::kOptimal);
  FormulationArtifacts infeasible = build_model(compressor_case(1.3), ModelMode::kUnidirectional);
  CHECK(solver.solve(infeasible.model, {}).status == SolveStatus::kInfeasible);
}

TEST_CASE("steady state: flat pressures, flow equals load, linepack at its initial level") {
  IntegratedSystem sys = single_pipe_system(1, {2.0});
  ScheduleSolution s = solve_and_extract(sys, ModelMode::kUnidirectional);
  CHECK(s.h[0][0] == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(s.q[0][0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.q_in[0][0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.q_out[0][0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(8.0));

  // Telescoping over a longer horizon: terminal linepack returns to H0.
  IntegratedSystem sys3 = single_pipe_system(3, {2.0, 2.0, 2.0});
  ScheduleSolution s3 = solve_and_extract(sys3, ModelMode::kUnidirectional);
  CHECK(s3.h[0][2] == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(s3.objective == doctest::Approx(24.0));
  double prev = 16.0;
  for (int t = 0; t < 3; ++t) {
    CHECK(s3.h[0][t] - prev - s3.q_in[0][t] + s3.q_out[0][t] == doctest::Approx(0.0).epsilon(1e-9));
    prev = s3.h[0][t];
  }
}

TEST_CASE("supplier at capacity binds when demand exceeds the cheap unit") {
  IntegratedSystem sys = SystemBuilder(1)
                             .pnode("n1", true)
                             .gnode("m1", 10, 70)
                             .gnode("m2", 10, 70)
                             .pipe("m1", "m2", 0.5, 0.4, 16.0)
                             .supplier("GS1", "m1", 0.4, 1.0)
                             .supplier("GS2", "m1", 10.0, 5.0)
                             .gload("GD1", "m2", {1.0})
                             .build();
  ScheduleSolution s = solve_and_extract(sys, ModelMode::kUnidirectional);
  CHECK(s.g[0][0] == doctest::Approx(0.4));
  CHECK(s.g[1][0] == doctest::Approx(0.6));
}

TEST_CASE("tightening forces zero flow under zero pressure difference") {
  IntegratedSystem sys = load_data("tightening_counterexample.json");

  FormulationConfig tightened;
  ScheduleSolution on = solve_and_extract(sys, ModelMode::kUnidirectional, tightened);
  CHECK(on.objective == doctest::Approx(5.0).epsilon(1e-9));  // expensive local supply
  CHECK(on.q[0][0] == doctest::Approx(0.0).epsilon(1e-9));

  FormulationConfig relaxed;
  relaxed.tightening = false;
  ScheduleSolution off = solve_and_extract(sys, ModelMode::kUnidirectional, relaxed);
  CHECK(off.objective == doctest::Approx(0.5).epsilon(1e-9));  // leak through the plane
  CHECK(off.q[0][0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(off.pr[0][0] == doctest::Approx(50.0));
  CHECK(off.pr[1][0] == doctest::Approx(50.0));
}

TEST_CASE("unidirectional artifacts have no binaries; bidirectional one per pipeline-hour") {
  IntegratedSystem sys = load_data("reversal_toy.json");
  FormulationArtifacts uni = build_model(sys, ModelMode::kUnidirectional);
  CHECK(uni.model.num_binaries() == 0);
  FormulationArtifacts bi = build_model(sys, ModelMode::kBidirectional);
  CHECK(bi.model.num_binaries() == static_cast<int>(sys.gas.pipelines.size()) * sys.horizon);
}

TEST_CASE("fixing every direction forward reproduces the unidirectional model") {
  for (const char* name : {"minimal.json", "reversal_toy.json"}) {
    CAPTURE(name);
    IntegratedSystem sys = load_data(name);
    ScheduleSolution uni = solve_and_extract(sys, ModelMode::kUnidirectional);
    FormulationArtifacts bi = build_model(sys, ModelMode::kBidirectional);
    OptModel pinned = fix_grid(bi.model, bi.y, 1.0);
    RawSolution r = solve_optimal(pinned);
    CHECK(std::abs(r.objective - uni.objective) <=
          1e-6 * std::max(1.0, std::abs(uni.objective)));
  }
}

TEST_CASE("a pipeline pinned to reverse operation behaves like its mirror") {
  IntegratedSystem sys = SystemBuilder(1)
                             .pnode("n1", true)
                             .gnode("m1", 5, 60)
                             .gnode("m2", 5, 60)
                             .pipe("m1", "m2", 0.1, 0.1, 3.0)
                             .supplier("GS1", "m1", 5, 10.0)
                             .supplier("GS2", "m2", 5, 1.0)
                             .gload("GD1", "m1", {1.0})
                             .build();
  FormulationArtifacts bi = build_model(sys, ModelMode::kBidirectional);
  OptModel pinned = fix_grid(bi.model, bi.y, 0.0);
  RawSolution r = solve_optimal(pinned);
  ScheduleSolution s = extract_schedule(bi, r, sys);
  CHECK(s.q[0][0] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(s.q_pos[0][0] == doctest::Approx(0.0));
  CHECK(s.q_neg[0][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.phi_from[0][0] == doctest::Approx(0.0));
  CHECK(s.phi_to[0][0] == doctest::Approx(0.0));
  CHECK(s.pr[1][0] >= s.pr[0][0] - 1e-9);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the reversal instance flips a direction and beats the unidirectional cost") {
  IntegratedSystem sys = load_data("reversal_toy.json");
  ScheduleSolution uni = solve_and_extract(sys, ModelMode::kUnidirectional);
  ScheduleSolution bi = solve_and_extract(sys, ModelMode::kBidirectional);
  CHECK(bi.objective < uni.objective * (1.0 - 0.005));  // at least half a percent cheaper
  bool flipped = false;
  for (size_t z = 0; z < bi.y.size(); ++z) {
    for (int t = 1; t < bi.horizon; ++t) {
      flipped = flipped || std::lround(bi.y[z][t]) != std::lround(bi.y[z][t - 1]);
    }
  }
  CHECK(flipped);
}

TEST_CASE("default flow big-M never binds; halving it hurts") {
  IntegratedSystem sys = load_data("reversal_toy.json");
  FormulationConfig config;
  const BigMConfig big_m = derive_big_m(sys, config);
  ScheduleSolution bi = solve_and_extract(sys, ModelMode::kBidirectional, config);
  for (size_t z = 0; z < bi.q_pos.size(); ++z) {
    for (int t = 0; t < bi.horizon; ++t) {
      CHECK(bi.q_pos[z][t] <= big_m.flow[z] * (1.0 - 1e-6));
      CHECK(bi.q_neg[z][t] <= big_m.flow[z] * (1.0 - 1e-6));
    }
  }

  FormulationConfig halved = config;
  halved.flow_big_m_scale = 0.5;
  FormulationArtifacts art = build_model(sys, ModelMode::kBidirectional, halved);
  SimplexMilpSolver solver;
  RawSolution r = solver.solve(art.model, {});
  const bool worse = r.status == SolveStatus::kInfeasible ||
                     (r.status == SolveStatus::kOptimal && r.objective > bi.objective + 1e-6);
  CHECK(worse);
}

TEST_CASE("monotone tightening: more expansion points never cheapen the relaxation") {
  IntegratedSystem sys = load_data("reversal_toy.json");
  double prev = -1e300;
  for (int count : {1, 2, 4, 8}) {
    FormulationConfig config;
    config.expansion_point_count = count;
    ScheduleSolution s = solve_and_extract(sys, ModelMode::kUnidirectional, config);
    CHECK(s.objective >= prev - 1e-9 * std::max(1.0, std::abs(prev)));
    prev = s.objective;
  }
}
