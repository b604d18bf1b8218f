#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gasflex/model_ir.hpp"
#include "gasflex/solver.hpp"

namespace gasflex {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  bool keep = false;

  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "gasflex-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw SolveError("cannot create temporary directory");
    path = tmpl;
    keep = std::getenv("GASFLEX_KEEP_TMP") != nullptr;
  }
  ~TempDir() {
    if (!keep) {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  }
};

SolveStatus parse_status(const std::string& token) {
  if (token == "optimal") return SolveStatus::kOptimal;
  if (token == "feasible_limit" || token == "limit") return SolveStatus::kFeasibleLimit;
  if (token == "infeasible") return SolveStatus::kInfeasible;
  if (token == "unbounded") return SolveStatus::kUnbounded;
  return SolveStatus::kError;
}

}  // namespace

ExternalMilpSolver::ExternalMilpSolver(std::string command) : command_(std::move(command)) {
  if (command_.empty()) {
    if (const char* env = std::getenv("GASFLEX_SOLVER")) command_ = env;
  }
}

RawSolution ExternalMilpSolver::solve(const OptModel& model, const SolveOptions& options) {
  if (command_.empty()) {
    throw SolveError("no external solver configured (set GASFLEX_SOLVER or pass --solver)");
  }

  TempDir dir;
  const fs::path mps_path = dir.path / "model.mps";
  const fs::path sol_path = dir.path / "model.sol";
  const fs::path log_path = dir.path / "solver.log";
  {
    std::ofstream out(mps_path, std::ios::binary);
    out << write_mps(model);
    if (!out) throw SolveError("cannot write " + mps_path.string());
  }

  char opts[96];
  std::snprintf(opts, sizeof opts, " %.6g %.12g", options.time_limit_sec, options.mip_gap);
  const std::string cmd = command_ + " '" + mps_path.string() + "' '" + sol_path.string() + "'" +
                          opts + " > '" + log_path.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::string log = read_file(log_path);
    if (log.size() > 800) log = "..." + log.substr(log.size() - 800);
    throw SolveError("external solver failed (exit " + std::to_string(rc) + "): " + log);
  }

  std::ifstream sol(sol_path);
  if (!sol) throw SolveError("external solver produced no solution file");

  const std::vector<std::string> names = mps_variable_names(model);
  std::unordered_map<std::string, VarId> by_name;
  by_name.reserve(names.size());
  for (VarId id = 0; id < static_cast<VarId>(names.size()); ++id) by_name[names[id]] = id;

  RawSolution out;
  out.values.assign(model.num_variables(), 0.0);
  out.value_present.assign(model.num_variables(), false);
  bool saw_status = false;

  std::string line;
  while (std::getline(sol, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key.empty() || key[0] == '#') continue;
    if (key == "status") {
      std::string v;
      ls >> v;
      out.status = parse_status(v);
      saw_status = true;
    } else if (key == "objective") {
      ls >> out.objective;
    } else if (key == "gap") {
      ls >> out.stats.gap_achieved;
    } else if (key == "var") {
      std::string name;
      double value = 0.0;
      if (ls >> name >> value) {
        auto it = by_name.find(name);
        if (it != by_name.end()) {
          out.values[it->second] = value;
          out.value_present[it->second] = true;
        }
      }
    }
  }
  if (!saw_status) throw SolveError("solution file missing status line");
  return out;
}

std::unique_ptr<MilpSolver> make_solver(const std::string& backend, const std::string& command) {
  if (backend.empty() || backend == "simplex" || backend == "inprocess") {
    return std::make_unique<SimplexMilpSolver>();
  }
  if (backend == "external") return std::make_unique<ExternalMilpSolver>(command);
  throw SolveError("unknown solver backend '" + backend + "'");
}

}  // namespace gasflex
