#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gasflex/model_ir.hpp"
#include "gasflex/solver.hpp"

using namespace gasflex;

namespace {

// Random bounded LPs/MILPs built around a known feasible interior point, so
// feasibility is guaranteed by construction.
OptModel random_model(std::uint64_t seed, int num_binary) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nvars_d(3, 12), nrows_d(2, 10);
  std::uniform_real_distribution<double> coef_d(-3.0, 3.0), frac_d(0.0, 1.0);

  const int n = nvars_d(rng);
  const int m = nrows_d(rng);
  OptModel model;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    double lo = 0.0, up = 10.0;
    const double r = frac_d(rng);
    if (j >= num_binary) {
      if (r < 0.2) lo = -5.0;
      if (r > 0.8) up = kInfinity;
    }
    const VarKind kind = j < num_binary ? VarKind::kBinary : VarKind::kContinuous;
    if (kind == VarKind::kBinary) {
      lo = 0.0;
      up = 1.0;
    }
    model.add_variable({kind, lo, up, "v" + std::to_string(j)});
    const double hi = std::isinf(up) ? lo + 10.0 : up;
    x0[j] = kind == VarKind::kBinary ? std::round(frac_d(rng)) : lo + frac_d(rng) * (hi - lo);
  }
  for (int r = 0; r < m; ++r) {
    LinearConstraint c;
    double lhs_at_x0 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (frac_d(rng) < 0.5) continue;
      const double a = coef_d(rng);
      if (a == 0.0) continue;
      c.terms.push_back({j, a});
      lhs_at_x0 += a * x0[j];
    }
    if (c.terms.empty()) c.terms.push_back({0, 1.0}), lhs_at_x0 = x0[0];
    const double sel = frac_d(rng);
    if (sel < 0.4) {
      c.sense = Sense::kLessEqual;
      c.rhs = lhs_at_x0 + frac_d(rng) * 2.0;
    } else if (sel < 0.8) {
      c.sense = Sense::kGreaterEqual;
      c.rhs = lhs_at_x0 - frac_d(rng) * 2.0;
    } else {
      c.sense = Sense::kEqual;
      c.rhs = lhs_at_x0;
    }
    c.name = "r" + std::to_string(r);
    model.add_constraint(std::move(c));
  }
  // Nonnegative costs on unbounded-above columns keep the LP bounded.
  for (int j = 0; j < n; ++j) {
    const bool unbounded = std::isinf(model.variable(j).upper);
    double cost = coef_d(rng);
    if (unbounded) cost = std::abs(cost) + 0.01;
    model.add_objective_term(j, cost);
  }
  return model;
}

// Exhaustive oracle: every binary pattern solved as a fixed LP.
RawSolution enumerate_milp(const OptModel& model, const SolveOptions& options) {
  std::vector<VarId> bins;
  for (VarId j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).kind == VarKind::kBinary &&
        model.variable(j).lower < model.variable(j).upper) {
      bins.push_back(j);
    }
  }
  REQUIRE(bins.size() <= 16);
  SimplexMilpSolver lp;
  RawSolution best;
  best.status = SolveStatus::kInfeasible;
  for (std::uint64_t mask = 0; mask < (1ULL << bins.size()); ++mask) {
    // Apply the pattern through bounds; a binary with lower == upper is not branched.
    OptModel pattern_model;
    for (VarId j = 0; j < model.num_variables(); ++j) {
      VariableSpec spec = model.variable(j);
      for (size_t k = 0; k < bins.size(); ++k) {
        if (bins[k] == j) {
          const double v = (mask >> k) & 1 ? 1.0 : 0.0;
          spec.lower = spec.upper = v;
        }
      }
      pattern_model.add_variable(spec);
    }
    for (const auto& c : model.constraints()) pattern_model.add_constraint(c);
    for (const auto& t : model.objective()) pattern_model.add_objective_term(t.var, t.coef);
    RawSolution r = lp.solve(pattern_model, options);
    if (r.status == SolveStatus::kOptimal &&
        (best.status != SolveStatus::kOptimal || r.objective < best.objective)) {
      best = r;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("minimize x subject to x >= 3") {
  OptModel m;
  const VarId x = m.add_variable({VarKind::kContinuous, 0, kInfinity, "x"});
  m.add_constraint({{{x, 1}}, Sense::kGreaterEqual, 3, "floor"});
  m.add_objective_term(x, 1.0);
  SimplexMilpSolver s;
  RawSolution r = s.solve(m, {});
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(r.values[x] == doctest::Approx(3.0));
}

TEST_CASE("contradictory rows are infeasible, not an error") {
  OptModel m;
  const VarId x = m.add_variable({VarKind::kContinuous, -kInfinity, kInfinity, "x"});
  m.add_constraint({{{x, 1}}, Sense::kGreaterEqual, 3, ""});
  m.add_constraint({{{x, 1}}, Sense::kLessEqual, 2, ""});
  m.add_objective_term(x, 1.0);
  SimplexMilpSolver s;
  CHECK(s.solve(m, {}).status == SolveStatus::kInfeasible);
}

TEST_CASE("unbounded direction detected") {
  OptModel m;
  const VarId x = m.add_variable({VarKind::kContinuous, 0, kInfinity, "x"});
  m.add_objective_term(x, -1.0);
  SimplexMilpSolver s;
  CHECK(s.solve(m, {}).status == SolveStatus::kUnbounded);
}

TEST_CASE("two-constraint textbook LP") {
  // min 2x+3y st x+2y >= 4, 3x+y >= 6, x,y >= 0 -> (1.6, 1.2), objective 6.8
  OptModel m;
  const VarId x = m.add_variable({VarKind::kContinuous, 0, kInfinity, "x"});
  const VarId y = m.add_variable({VarKind::kContinuous, 0, kInfinity, "y"});
  m.add_constraint({{{x, 1}, {y, 2}}, Sense::kGreaterEqual, 4, ""});
  m.add_constraint({{{x, 3}, {y, 1}}, Sense::kGreaterEqual, 6, ""});
  m.set_objective({{x, 2}, {y, 3}});
  SimplexMilpSolver s;
  RawSolution r = s.solve(m, {});
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(6.8));
  CHECK(r.values[x] == doctest::Approx(1.6));
  CHECK(r.values[y] == doctest::Approx(1.2));
}

TEST_CASE("equality row with negative-bound variable") {
  OptModel m;
  const VarId x = m.add_variable({VarKind::kContinuous, -5, 5, "x"});
  const VarId y = m.add_variable({VarKind::kContinuous, -kInfinity, kInfinity, "y"});
  m.add_constraint({{{x, 1}, {y, 1}}, Sense::kEqual, 1, ""});
  m.set_objective({{x, 1}, {y, 2}});
  SimplexMilpSolver s;
  RawSolution r = s.solve(m, {});
  // y unbounded below with positive cost via the equality: y = 1 - x, obj = x + 2(1-x) = 2 - x.
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-3.0));
  CHECK(r.values[x] == doctest::Approx(5.0));
}

TEST_CASE("binary knapsack solved exactly") {
  // max 5a+4b+3c st 2a+3b+c <= 5 -> min negated; optimum a=c=1, b=1? check:
  // patterns: a+c = 3 weight, value 8; a+b = 5 weight, value 9; a+b+c weight 6 infeasible.
  // best = a,b -> 9.
  OptModel m;
  const VarId a = m.add_variable({VarKind::kBinary, 0, 1, "a"});
  const VarId b = m.add_variable({VarKind::kBinary, 0, 1, "b"});
  const VarId c = m.add_variable({VarKind::kBinary, 0, 1, "c"});
  m.add_constraint({{{a, 2}, {b, 3}, {c, 1}}, Sense::kLessEqual, 5, ""});
  m.set_objective({{a, -5}, {b, -4}, {c, -3}});
  SimplexMilpSolver s;
  RawSolution r = s.solve(m, {});
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-9.0));
  CHECK(r.values[a] == doctest::Approx(1.0));
  CHECK(r.values[b] == doctest::Approx(1.0));
  CHECK(r.values[c] == doctest::Approx(0.0));
}

TEST_CASE("random LPs agree with the external reference backend") {
  SimplexMilpSolver inproc;
  ExternalMilpSolver ext(GASFLEX_SOLVE_MPS);
  int optimal_count = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    CAPTURE(seed);
    OptModel m = random_model(seed, 0);
    RawSolution a = inproc.solve(m, {});
    RawSolution b = ext.solve(m, {});
    REQUIRE(a.status != SolveStatus::kError);
    CHECK(a.status == b.status);
    if (a.status == SolveStatus::kOptimal && b.status == SolveStatus::kOptimal) {
      ++optimal_count;
      CHECK(std::abs(a.objective - b.objective) <=
            2e-6 * std::max(1.0, std::abs(a.objective)));
    }
  }
  CHECK(optimal_count >= 8);  // the generator should produce mostly solvable LPs
}

TEST_CASE("random MILPs match exhaustive enumeration and the reference backend") {
  SimplexMilpSolver inproc;
  ExternalMilpSolver ext(GASFLEX_SOLVE_MPS);
  int optimal_count = 0;
  for (std::uint64_t seed = 100; seed < 108; ++seed) {
    CAPTURE(seed);
    OptModel m = random_model(seed, 4);
    RawSolution bb = inproc.solve(m, {});
    RawSolution oracle = enumerate_milp(m, {});
    REQUIRE(bb.status != SolveStatus::kError);
    CHECK(bb.status == oracle.status);
    if (bb.status == SolveStatus::kOptimal) {
      ++optimal_count;
      CHECK(std::abs(bb.objective - oracle.objective) <=
            1e-6 * std::max(1.0, std::abs(oracle.objective)));
      RawSolution extsol = ext.solve(m, {});
      REQUIRE(extsol.status == SolveStatus::kOptimal);
      CHECK(std::abs(bb.objective - extsol.objective) <=
            2e-6 * std::max(1.0, std::abs(oracle.objective)));
      for (VarId j = 0; j < m.num_variables(); ++j) {
        if (m.variable(j).kind == VarKind::kBinary) {
          CHECK(std::abs(bb.values[j] - std::round(bb.values[j])) <= 1e-6);
        }
      }
    }
  }
  CHECK(optimal_count >= 5);
}

TEST_CASE("fixed binaries are honored without branching") {
  OptModel m;
  const VarId y = m.add_variable({VarKind::kBinary, 1, 1, "y"});
  const VarId x = m.add_variable({VarKind::kContinuous, 0, 10, "x"});
  m.add_constraint({{{x, 1}, {y, -5}}, Sense::kGreaterEqual, 0, ""});  // x >= 5y
  m.set_objective({{x, 1}});
  SimplexMilpSolver s;
  RawSolution r = s.solve(m, {});
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(5.0));
  CHECK(r.stats.branch_nodes == 1);
}
