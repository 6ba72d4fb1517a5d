#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qfound/circuit.hpp"
#include "qfound/device.hpp"

namespace qfound {

/// Undirected, connected qubit adjacency graph.
class CouplingGraph {
 public:
  CouplingGraph(int num_qubits, const std::vector<std::pair<int, int>>& edges);
  static CouplingGraph from_device(const DeviceModel& device);

  int num_qubits() const { return n_; }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  bool adjacent(int a, int b) const;
  int degree(int q) const;
  int distance(int a, int b) const { return dist_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  // Shortest path a -> b inclusive of both ends; ties break toward lower indices.
  std::vector<int> shortest_path(int a, int b) const;

 private:
  int n_;
  std::set<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> dist_;
};

struct TranspiledCircuit {
  Circuit circuit;                 // over physical qubits, basis gates + measure
  std::vector<int> initial_layout; // logical -> physical before the first gate
  std::vector<int> final_layout;   // logical -> physical after the last SWAP
  int swap_count = 0;
  int num_logical = 0;
};

bool is_basis_gate(GateKind kind);

// Rewrites every gate into {U1, U2, U3, CNOT}; equal to the input up to a
// global phase. CCX uses the 6-CNOT Clifford+T network.
Circuit decompose_to_basis(const Circuit& circuit);

// Merges runs of adjacent single-qubit basis gates on one qubit into one U3.
Circuit fuse_single_qubit_gates(const Circuit& circuit);

// Greedy SWAP insertion along BFS shortest paths. Without an explicit layout
// the logical qubit with the most two-qubit interactions is placed on the
// highest-degree physical qubit; everything else keeps the identity map.
TranspiledCircuit route(const Circuit& circuit, const CouplingGraph& graph,
                        const std::optional<std::vector<int>>& initial_layout = std::nullopt);

std::vector<int> default_layout(const Circuit& circuit, const CouplingGraph& graph);

struct TranspileOptions {
  bool fuse_single_qubit = false;
  std::optional<std::vector<int>> initial_layout;
};

TranspiledCircuit transpile(const Circuit& circuit, const DeviceModel& device, const TranspileOptions& options = {});

struct FidelityEstimate {
  double fidelity = 1.0;
  double error = 0.0;
};

// Product of (1 - rate) over every gate and every measured qubit's readout.
FidelityEstimate estimate_fidelity(const Circuit& basis_circuit, const DeviceModel& device);
inline FidelityEstimate estimate_fidelity(const TranspiledCircuit& t, const DeviceModel& device) {
  return estimate_fidelity(t.circuit, device);
}

std::map<std::string, int> gate_counts(const Circuit& circuit);

// Logical unitary realized by a routed circuit: ancilla physical qubits start
// in |0>, and the output is read back through final_layout. Throws if the
// routed circuit leaks amplitude out of the ancilla-zero subspace.
UnitaryMatrix effective_unitary(const TranspiledCircuit& t);

// Relabels physical-qubit count keys to logical-qubit order via final_layout.
CountsHistogram to_logical_counts(const CountsHistogram& physical, const TranspiledCircuit& t);
Distribution to_logical_distribution(const Distribution& physical, const TranspiledCircuit& t);
// Readout error of the physical qubit holding each measured logical qubit,
// in ascending logical order.
std::vector<ReadoutError> logical_readout(const TranspiledCircuit& t, const DeviceModel& device);

Circuit strip_measurements(const Circuit& circuit);

}  // namespace qfound
