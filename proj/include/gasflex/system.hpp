#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gasflex {

/// Raised on malformed system documents: schema violations, dangling node
/// references, series-length mismatches. Messages are path-qualified.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PowerNode {
  std::string id;
  bool reference = false;
};

struct Line {
  std::string from, to;
  double susceptance = 0.0;  // per-unit
  double capacity = 0.0;     // MW
  int from_idx = -1, to_idx = -1;
};

struct Generator {
  std::string id, node;
  double pmax = 0.0;  // MW
  double cost = 0.0;  // currency/MWh, enters the objective for non-GFPPs only
  bool gfpp = false;
  double conversion = 0.0;  // gas units per MWh, GFPPs only
  std::string gas_node;     // GFPPs only
  int node_idx = -1, gas_node_idx = -1;
};

struct WindFarm {
  std::string id, node;
  std::vector<double> forecast;  // MW per hour
  int node_idx = -1;
};

struct ElectricLoad {
  std::string id, node;
  std::vector<double> demand;  // MW per hour
  int node_idx = -1;
};

struct GasNode {
  std::string id;
  double pr_min = 0.0, pr_max = 0.0;  // bar
};

struct Pipeline {
  std::string from, to;       // declared orientation = fixed direction of the LP model
  double weymouth = 0.0;      // K
  double linepack = 0.0;      // S
  double initial_linepack = 0.0;  // H0
  double compression = 1.0;   // Gamma >= 1; > 1 marks a compressor pipeline
  int from_idx = -1, to_idx = -1;

  bool has_compressor() const { return compression > 1.0; }
  std::string label() const { return from + "_" + to; }
};

struct GasSupplier {
  std::string id, node;
  double gmax = 0.0;
  double cost = 0.0;
  int node_idx = -1;
};

struct GasLoad {
  std::string id, node;
  std::vector<double> demand;
  int node_idx = -1;
};

struct PowerNetwork {
  std::vector<PowerNode> nodes;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<WindFarm> wind_farms;
  std::vector<ElectricLoad> loads;
};

struct GasNetwork {
  std::vector<GasNode> nodes;
  std::vector<Pipeline> pipelines;
  std::vector<GasSupplier> suppliers;
  std::vector<GasLoad> loads;
};

/// Static system description plus derived membership indices. Immutable
/// after load; safe to share across concurrent solves.
struct IntegratedSystem {
  std::string name;
  int horizon = 0;  // |T|
  PowerNetwork power;
  GasNetwork gas;

  int reference_node = -1;
  std::unordered_map<std::string, int> power_node_index, gas_node_index;

  // Per power node n.
  std::vector<std::vector<int>> generators_at, wind_at, eloads_at;
  std::vector<std::vector<int>> lines_from, lines_to;
  // Per gas node m.
  std::vector<std::vector<int>> suppliers_at, gfpps_at, gloads_at;
  std::vector<std::vector<int>> pipes_from, pipes_to;

  /// Resolves string references into indices and rebuilds membership sets.
  /// Throws LoadError on dangling references.
  void finalize();
};

struct Violation {
  std::string entity;
  std::string rule;
};

IntegratedSystem load_system(const std::string& path);
IntegratedSystem parse_system(const std::string& text, const std::string& origin = "<memory>");
std::string serialize_system(const IntegratedSystem& system);
std::vector<Violation> validate_system(const IntegratedSystem& system);

}  // namespace gasflex
