#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gasflex/model_ir.hpp"
#include "gasflex/solver.hpp"

namespace gasflex {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleLimit: return "feasible_limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Column-compressed structural matrix; slack columns are implicit unit
// vectors and never stored.
struct ColMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;  // cols + 1
  std::vector<int> idx;
  std::vector<double> val;
};

struct LpData {
  int m = 0;       // rows
  int n = 0;       // structural columns
  ColMatrix a;     // scaled
  std::vector<double> b;     // scaled rhs
  std::vector<double> cost;  // structural costs (objective)
  std::vector<double> lo, up;  // size n + m (slacks appended)
};

// Assembles rows as  a.x + s = b  with slack bounds encoding the sense.
LpData build_lp(const OptModel& model, const std::vector<double>& lo_override,
                const std::vector<double>& up_override) {
  const int m = model.num_constraints();
  const int n = model.num_variables();
  LpData lp;
  lp.m = m;
  lp.n = n;
  lp.b.resize(m);
  lp.cost.assign(n, 0.0);
  for (const LinearTerm& t : model.objective()) lp.cost[t.var] += t.coef;

  lp.lo.resize(n + m);
  lp.up.resize(n + m);
  for (int j = 0; j < n; ++j) {
    lp.lo[j] = lo_override[j];
    lp.up[j] = up_override[j];
  }

  // Row scaling by the largest structural coefficient magnitude.
  std::vector<double> scale(m, 1.0);
  for (int r = 0; r < m; ++r) {
    double mx = 0.0;
    for (const LinearTerm& t : model.constraints()[r].terms) mx = std::max(mx, std::abs(t.coef));
    scale[r] = mx > 1e-12 ? 1.0 / mx : 1.0;
  }

  std::vector<int> col_count(n, 0);
  for (int r = 0; r < m; ++r) {
    for (const LinearTerm& t : model.constraints()[r].terms) ++col_count[t.var];
  }
  lp.a.rows = m;
  lp.a.cols = n;
  lp.a.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) lp.a.start[j + 1] = lp.a.start[j] + col_count[j];
  lp.a.idx.resize(lp.a.start[n]);
  lp.a.val.resize(lp.a.start[n]);
  std::vector<int> fill(lp.a.start.begin(), lp.a.start.end() - 1);
  for (int r = 0; r < m; ++r) {
    const LinearConstraint& c = model.constraints()[r];
    lp.b[r] = c.rhs * scale[r];
    for (const LinearTerm& t : c.terms) {
      const int pos = fill[t.var]++;
      lp.a.idx[pos] = r;
      lp.a.val[pos] = t.coef * scale[r];
    }
    switch (c.sense) {
      case Sense::kLessEqual:
        lp.lo[n + r] = 0.0;
        lp.up[n + r] = kInf;
        break;
      case Sense::kGreaterEqual:
        lp.lo[n + r] = -kInf;
        lp.up[n + r] = 0.0;
        break;
      case Sense::kEqual:
        lp.lo[n + r] = 0.0;
        lp.up[n + r] = 0.0;
        break;
    }
  }
  return lp;
}

enum class LpResult { kOptimal, kInfeasible, kUnbounded, kIterLimit, kNumerical };

// Primal simplex for  min c.x  s.t.  A.x + s = b,  l <= (x,s) <= u.
// Dense explicit basis inverse, two-phase with composite phase-1 costs,
// bound flips, Bland fallback under stalling.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LpData& lp) : lp_(lp), m_(lp.m), n_(lp.n) {}

  LpResult solve(std::vector<double>& x_out, double& obj_out, std::int64_t& iters_out) {
    init();
    const std::int64_t iter_limit = 20000 + 200LL * (m_ + n_);
    int phase = 1;
    std::int64_t iter = 0;
    int degenerate_run = 0;
    bool bland = false;

    for (;; ++iter) {
      if (iter >= iter_limit) {
        iters_out = iter;
        return LpResult::kIterLimit;
      }
      if (pivots_since_refactor_ >= 40) {
        if (!refactor()) return LpResult::kNumerical;
      }

      const double infeas = infeasibility();
      const double feas_tol = kFeasTol * (1.0 + b_norm_);
      if (phase == 1 && infeas <= feas_tol) phase = 2;
      if (phase == 2 && infeas > feas_tol) phase = 1;  // lost feasibility, repair

      compute_duals(phase);
      int entering = -1, dir = 0;
      price(phase, bland, entering, dir);
      if (entering < 0) {
        // Conclude only against a freshly factorized basis.
        if (pivots_since_refactor_ > 0) {
          if (!refactor()) return LpResult::kNumerical;
          continue;
        }
        iters_out = iter;
        if (phase == 1) return LpResult::kInfeasible;
        if (infeasibility() > 1e-6 * (1.0 + b_norm_)) return LpResult::kNumerical;
        finalize(x_out, obj_out);
        return LpResult::kOptimal;
      }

      ftran(entering);

      double t_best = kInf;
      int block_row = -1;
      int block_at_upper = 0;
      ratio_test(phase, dir, kPivotTol, t_best, block_row, block_at_upper);
      if (block_row < 0) {
        // Nothing blocked at the strong-pivot threshold; admit weak pivots
        // before concluding anything about unboundedness.
        ratio_test(phase, dir, kPivotTolWeak, t_best, block_row, block_at_upper);
      }

      const double span = lp_.up[entering] - lp_.lo[entering];
      const bool flip_blocks = span < t_best;
      const double step = flip_blocks ? span : t_best;

      if (!std::isfinite(step)) {
        iters_out = iter;
        return phase == 1 ? LpResult::kNumerical : LpResult::kUnbounded;
      }

      if (step <= kDegenTol) {
        if (++degenerate_run > std::max(60, m_)) bland = true;
      } else if (step > 1e-7) {
        // Only a clearly non-degenerate step counts as leaving the vertex;
        // releasing Bland's rule on noise-sized steps can cycle.
        degenerate_run = 0;
        bland = false;
      }

      apply_step(entering, dir, step);
      if (flip_blocks) {
        status_[entering] = status_[entering] == kAtLower ? kAtUpper : kAtLower;
      } else {
        pivot(entering, dir, step, block_row, block_at_upper);
      }
    }
  }

 private:
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-7;      // preferred pivot magnitude
  static constexpr double kPivotTolWeak = 1e-11;  // last resort before "unbounded"
  static constexpr double kDegenTol = 1e-12;
  static constexpr int kAtLower = 0, kAtUpper = 1, kAtFree = 2, kBasic = 3;

  int total() const { return n_ + m_; }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case kAtLower: return lp_.lo[j];
      case kAtUpper: return lp_.up[j];
      default: return 0.0;
    }
  }

  void init() {
    basis_.resize(m_);
    status_.assign(total(), kAtLower);
    for (int j = 0; j < total(); ++j) {
      const double lo = lp_.lo[j], up = lp_.up[j];
      if (lo <= -kInf && up >= kInf) {
        status_[j] = kAtFree;
      } else if (lo <= -kInf) {
        status_[j] = kAtUpper;
      } else if (up >= kInf) {
        status_[j] = kAtLower;
      } else {
        status_[j] = std::abs(lo) <= std::abs(up) ? kAtLower : kAtUpper;
      }
    }
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      status_[n_ + i] = kBasic;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
    b_norm_ = 0.0;
    for (double v : lp_.b) b_norm_ = std::max(b_norm_, std::abs(v));
    recompute_basics();
    pivots_since_refactor_ = 0;
    y_.resize(m_);
    w_.resize(m_);
  }

  void recompute_basics() {
    std::vector<double> r = lp_.b;
    for (int j = 0; j < total(); ++j) {
      if (status_[j] == kBasic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      if (j < n_) {
        for (int p = lp_.a.start[j]; p < lp_.a.start[j + 1]; ++p) r[lp_.a.idx[p]] -= lp_.a.val[p] * v;
      } else {
        r[j - n_] -= v;
      }
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += row[k] * r[k];
      xb_[i] = s;
    }
  }

  double infeasibility() const {
    double sum = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (xb_[i] < lp_.lo[j]) sum += lp_.lo[j] - xb_[i];
      if (xb_[i] > lp_.up[j]) sum += xb_[i] - lp_.up[j];
    }
    return sum;
  }

  void compute_duals(int phase) {
    std::fill(y_.begin(), y_.end(), 0.0);
    const double tol = kFeasTol * (1.0 + b_norm_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      double cb;
      if (phase == 1) {
        cb = xb_[i] < lp_.lo[j] - tol ? -1.0 : (xb_[i] > lp_.up[j] + tol ? 1.0 : 0.0);
      } else {
        cb = j < n_ ? lp_.cost[j] : 0.0;
      }
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) y_[k] += cb * row[k];
    }
  }

  double reduced_cost(int phase, int j) const {
    double d = phase == 2 && j < n_ ? lp_.cost[j] : 0.0;
    if (j < n_) {
      for (int p = lp_.a.start[j]; p < lp_.a.start[j + 1]; ++p) d -= y_[lp_.a.idx[p]] * lp_.a.val[p];
    } else {
      d -= y_[j - n_];
    }
    return d;
  }

  void price(int phase, bool bland, int& entering, int& dir) const {
    entering = -1;
    dir = 0;
    double best = kDualTol;
    for (int j = 0; j < total(); ++j) {
      if (status_[j] == kBasic) continue;
      if (lp_.lo[j] == lp_.up[j]) continue;  // fixed, never enters
      const double d = reduced_cost(phase, j);
      double score = 0.0;
      int cand_dir = 0;
      if (status_[j] == kAtLower && d < -kDualTol) {
        score = -d;
        cand_dir = 1;
      } else if (status_[j] == kAtUpper && d > kDualTol) {
        score = d;
        cand_dir = -1;
      } else if (status_[j] == kAtFree && std::abs(d) > kDualTol) {
        score = std::abs(d);
        cand_dir = d < 0 ? 1 : -1;
      } else {
        continue;
      }
      if (bland) {
        entering = j;
        dir = cand_dir;
        return;
      }
      if (score > best) {
        best = score;
        entering = j;
        dir = cand_dir;
      }
    }
  }

  void ftran(int e) {
    std::fill(w_.begin(), w_.end(), 0.0);
    if (e < n_) {
      for (int p = lp_.a.start[e]; p < lp_.a.start[e + 1]; ++p) {
        const int i = lp_.a.idx[p];
        const double a = lp_.a.val[p];
        for (int r = 0; r < m_; ++r) w_[r] += binv_[static_cast<size_t>(r) * m_ + i] * a;
      }
    } else {
      const int i = e - n_;
      for (int r = 0; r < m_; ++r) w_[r] = binv_[static_cast<size_t>(r) * m_ + i];
    }
  }

  void ratio_test(int phase, int dir, double piv_tol, double& t_best, int& block_row,
                  int& block_at_upper) const {
    t_best = kInf;
    block_row = -1;
    block_at_upper = 0;
    const double tol = kFeasTol * (1.0 + b_norm_);
    double best_piv = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double rate = -dir * w_[i];
      if (std::abs(rate) <= piv_tol) continue;
      const int j = basis_[i];
      const double lo = lp_.lo[j], up = lp_.up[j];
      double t = kInf;
      int at_upper = 0;
      if (phase == 1 && xb_[i] < lo - tol) {
        if (rate > 0.0) t = (lo - xb_[i]) / rate;  // rises to its violated lower bound
      } else if (phase == 1 && xb_[i] > up + tol) {
        if (rate < 0.0) {
          t = (up - xb_[i]) / rate;
          at_upper = 1;
        }
      } else if (rate > 0.0) {
        if (up < kInf) {
          t = (up - xb_[i]) / rate;
          at_upper = 1;
        }
      } else {
        if (lo > -kInf) t = (lo - xb_[i]) / rate;
      }
      if (t >= kInf) continue;
      t = std::max(t, 0.0);
      const double piv = std::abs(w_[i]);
      // Prefer numerically strong pivots among (near-)ties.
      const double tie = 1e-7 * t_best + 1e-10;
      if (t < t_best - tie || (t <= t_best + tie && piv > best_piv)) {
        t_best = std::min(t, t_best);
        block_row = i;
        block_at_upper = at_upper;
        best_piv = piv;
      }
    }
  }

  void apply_step(int entering, int dir, double step) {
    entering_value_ = nonbasic_value(entering) + dir * step;
    if (step == 0.0) return;
    for (int i = 0; i < m_; ++i) xb_[i] -= dir * step * w_[i];
  }

  void pivot(int entering, int /*dir*/, double /*step*/, int row, int at_upper) {
    const int leaving = basis_[row];
    status_[leaving] = at_upper ? kAtUpper : kAtLower;
    basis_[row] = entering;
    status_[entering] = kBasic;

    const double piv = w_[row];
    double* brow = &binv_[static_cast<size_t>(row) * m_];
    for (int k = 0; k < m_; ++k) brow[k] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = w_[i];
      if (f == 0.0) continue;
      double* irow = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) irow[k] -= f * brow[k];
    }
    xb_[row] = entering_value_;
    ++pivots_since_refactor_;
  }

  // Rebuilds the inverse from the basis columns (Gauss-Jordan, partial
  // pivoting) and refreshes basic values to cut accumulated drift.
  bool refactor() {
    const int m = m_;
    std::vector<double> mat(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      const int j = basis_[i];
      if (j < n_) {
        for (int p = lp_.a.start[j]; p < lp_.a.start[j + 1]; ++p) {
          mat[static_cast<size_t>(lp_.a.idx[p]) * m + i] = lp_.a.val[p];
        }
      } else {
        mat[static_cast<size_t>(j - n_) * m + i] = 1.0;
      }
    }
    std::vector<double>& inv = binv_;
    inv.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<size_t>(i) * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
      int piv_row = col;
      double piv = std::abs(mat[static_cast<size_t>(col) * m + col]);
      for (int r = col + 1; r < m; ++r) {
        const double v = std::abs(mat[static_cast<size_t>(r) * m + col]);
        if (v > piv) {
          piv = v;
          piv_row = r;
        }
      }
      if (piv < 1e-12) return false;
      if (piv_row != col) {
        for (int k = 0; k < m; ++k) {
          std::swap(mat[static_cast<size_t>(piv_row) * m + k], mat[static_cast<size_t>(col) * m + k]);
          std::swap(inv[static_cast<size_t>(piv_row) * m + k], inv[static_cast<size_t>(col) * m + k]);
        }
      }
      const double d = mat[static_cast<size_t>(col) * m + col];
      for (int k = 0; k < m; ++k) {
        mat[static_cast<size_t>(col) * m + k] /= d;
        inv[static_cast<size_t>(col) * m + k] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = mat[static_cast<size_t>(r) * m + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          mat[static_cast<size_t>(r) * m + k] -= f * mat[static_cast<size_t>(col) * m + k];
          inv[static_cast<size_t>(r) * m + k] -= f * inv[static_cast<size_t>(col) * m + k];
        }
      }
    }
    pivots_since_refactor_ = 0;
    recompute_basics();
    return true;
  }

  void finalize(std::vector<double>& x_out, double& obj_out) {
    x_out.assign(total(), 0.0);
    for (int j = 0; j < total(); ++j) {
      if (status_[j] != kBasic) x_out[j] = nonbasic_value(j);
    }
    for (int i = 0; i < m_; ++i) {
      double v = xb_[i];
      const int j = basis_[i];
      // Snap basic values marginally outside their box back onto it.
      if (v < lp_.lo[j]) v = lp_.lo[j];
      if (v > lp_.up[j]) v = lp_.up[j];
      x_out[j] = v;
    }
    obj_out = 0.0;
    for (int j = 0; j < n_; ++j) obj_out += lp_.cost[j] * x_out[j];
  }

  const LpData& lp_;
  int m_, n_;
  std::vector<int> basis_;
  std::vector<int> status_;
  std::vector<double> binv_, xb_, y_, w_;
  double entering_value_ = 0.0;
  double b_norm_ = 0.0;
  int pivots_since_refactor_ = 0;
};

struct LpOutcome {
  LpResult result;
  double objective = 0.0;
  std::vector<double> x;  // structural + slacks
  std::int64_t iterations = 0;
};

LpOutcome solve_lp(const OptModel& model, const std::vector<double>& lo,
                   const std::vector<double>& up) {
  LpData lp = build_lp(model, lo, up);
  BoundedSimplex simplex(lp);
  LpOutcome out;
  out.result = simplex.solve(out.x, out.objective, out.iterations);
  return out;
}

double fractionality(double v) { return std::abs(v - std::round(v)); }

}  // namespace

RawSolution SimplexMilpSolver::solve(const OptModel& model, const SolveOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  RawSolution out;
  const int n = model.num_variables();
  std::vector<double> root_lo(n), root_up(n);
  for (int j = 0; j < n; ++j) {
    root_lo[j] = model.variable(j).lower;
    root_up[j] = model.variable(j).upper;
  }
  std::vector<int> branch_vars;
  for (int j = 0; j < n; ++j) {
    if (model.variable(j).kind == VarKind::kBinary && root_lo[j] < root_up[j]) {
      branch_vars.push_back(j);
    }
  }

  // Depth-first branch and bound; nodes re-solve from scratch (no warm start).
  struct Node {
    std::vector<std::pair<int, double>> fixings;
    double parent_bound;
  };
  std::vector<Node> stack;
  stack.push_back({{}, -kInf});

  double incumbent_obj = kInf;
  std::vector<double> incumbent_x;
  const double int_tol = 1e-7;
  bool hit_limit = false;
  std::int64_t nodes = 0;

  while (!stack.empty()) {
    if (elapsed() > options.time_limit_sec || nodes > 2000000) {
      hit_limit = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    const bool have_incumbent = std::isfinite(incumbent_obj);
    const double prune_eps =
        options.mip_gap * std::max(1.0, have_incumbent ? std::abs(incumbent_obj) : 1.0);
    if (have_incumbent && node.parent_bound >= incumbent_obj - prune_eps) continue;

    std::vector<double> lo = root_lo, up = root_up;
    for (const auto& [var, val] : node.fixings) {
      lo[var] = val;
      up[var] = val;
    }
    LpOutcome lp = solve_lp(model, lo, up);
    out.stats.simplex_iterations += lp.iterations;

    if (lp.result == LpResult::kInfeasible) continue;
    if (lp.result == LpResult::kUnbounded) {
      if (node.fixings.empty()) {
        out.status = SolveStatus::kUnbounded;
        out.message = "LP relaxation unbounded";
        out.stats.wall_time_sec = elapsed();
        out.stats.branch_nodes = nodes;
        return out;
      }
      continue;  // bounded elsewhere; treat as unhelpful subtree
    }
    if (lp.result != LpResult::kOptimal) {
      throw SolveError(std::string("simplex breakdown (") +
                       (lp.result == LpResult::kIterLimit ? "iteration limit" : "numerical") +
                       ") after " + std::to_string(nodes) + " nodes");
    }
    if (have_incumbent && lp.objective >= incumbent_obj - prune_eps) continue;

    // Most fractional binary; first index wins ties.
    int branch = -1;
    double best_frac = int_tol;
    for (int j : branch_vars) {
      if (lo[j] == up[j]) continue;
      const double f = fractionality(lp.x[j]);
      if (f > best_frac) {
        best_frac = f;
        branch = j;
      }
    }
    if (branch < 0) {
      // Integer feasible.
      if (lp.objective < incumbent_obj) {
        incumbent_obj = lp.objective;
        incumbent_x = lp.x;
      }
      continue;
    }

    const double frac_val = lp.x[branch];
    const double near = std::round(frac_val);
    const double far = 1.0 - near;
    Node far_child{node.fixings, lp.objective};
    far_child.fixings.emplace_back(branch, far);
    Node near_child{std::move(node.fixings), lp.objective};
    near_child.fixings.emplace_back(branch, near);
    stack.push_back(std::move(far_child));
    stack.push_back(std::move(near_child));  // LIFO: explored first
  }

  out.stats.wall_time_sec = elapsed();
  out.stats.branch_nodes = nodes;

  if (!std::isfinite(incumbent_obj)) {
    if (hit_limit) {
      out.status = SolveStatus::kError;
      out.message = "limit reached with no incumbent";
    } else {
      out.status = SolveStatus::kInfeasible;
      out.message = "no feasible point";
    }
    return out;
  }

  double remaining_bound = kInf;
  if (hit_limit) {
    for (const Node& nd : stack) remaining_bound = std::min(remaining_bound, nd.parent_bound);
  }
  out.status = hit_limit ? SolveStatus::kFeasibleLimit : SolveStatus::kOptimal;
  out.objective = incumbent_obj;
  out.values.assign(incumbent_x.begin(), incumbent_x.begin() + n);
  out.value_present.assign(n, true);
  out.stats.gap_achieved =
      hit_limit && std::isfinite(remaining_bound)
          ? std::max(0.0, (incumbent_obj - remaining_bound) / std::max(1.0, std::abs(incumbent_obj)))
          : 0.0;
  return out;
}

}  // namespace gasflex
