#include "qfound/transpiler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace qfound {

namespace {

constexpr double kPi = std::numbers::pi;

void emit_ccx(Circuit& out, int a, int b, int c) {
  const auto h = gates::u2(0.0, kPi);
  const auto t = gates::u1(kPi / 4.0);
  const auto tdg = gates::u1(-kPi / 4.0);
  out.gate(h, {c});
  out.cx(b, c);
  out.gate(tdg, {c});
  out.cx(a, c);
  out.gate(t, {c});
  out.cx(b, c);
  out.gate(tdg, {c});
  out.cx(a, c);
  out.gate(t, {b});
  out.gate(t, {c});
  out.gate(h, {c});
  out.cx(a, b);
  out.gate(t, {a});
  out.gate(tdg, {b});
  out.cx(a, b);
}

// U3 angles reproducing `m` up to a global phase.
GateDef u3_from_matrix(const Eigen::Matrix2cd& m) {
  const double theta = 2.0 * std::atan2(std::abs(m(1, 0)), std::abs(m(0, 0)));
  constexpr double eps = 1e-12;
  double phi = 0.0;
  double lambda = 0.0;
  if (std::abs(m(0, 0)) > eps && std::abs(m(1, 0)) > eps) {
    const double g = std::arg(m(0, 0));
    phi = std::arg(m(1, 0)) - g;
    lambda = std::arg(-m(0, 1)) - g;
  } else if (std::abs(m(0, 0)) > eps) {
    lambda = std::arg(m(1, 1)) - std::arg(m(0, 0));
  } else {
    const double g = std::arg(-m(0, 1));
    phi = std::arg(m(1, 0)) - g;
  }
  return gates::u3(theta, phi, lambda);
}

bool is_identity_up_to_phase(const Eigen::Matrix2cd& m) {
  return std::abs(m(0, 1)) < 1e-12 && std::abs(m(1, 0)) < 1e-12 && std::abs(m(0, 0) - m(1, 1)) < 1e-12;
}

}  // namespace

// ---------- CouplingGraph ----------

CouplingGraph::CouplingGraph(int num_qubits, const std::vector<std::pair<int, int>>& edges) : n_(num_qubits) {
  if (num_qubits < 1) throw std::invalid_argument("coupling graph needs at least one qubit");
  adj_.assign(static_cast<std::size_t>(n_), {});
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::invalid_argument("coupling edge index out of range");
    if (a == b) throw std::invalid_argument("coupling edge is a self-loop");
    if (a > b) std::swap(a, b);
    if (edges_.insert({a, b}).second) {
      adj_[static_cast<std::size_t>(a)].push_back(b);
      adj_[static_cast<std::size_t>(b)].push_back(a);
    }
  }
  for (auto& v : adj_) std::sort(v.begin(), v.end());

  dist_.assign(static_cast<std::size_t>(n_), std::vector<int>(static_cast<std::size_t>(n_), -1));
  for (int s = 0; s < n_; ++s) {
    auto& d = dist_[static_cast<std::size_t>(s)];
    std::deque<int> queue{s};
    d[static_cast<std::size_t>(s)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj_[static_cast<std::size_t>(u)]) {
        if (d[static_cast<std::size_t>(v)] < 0) {
          d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    if (std::any_of(d.begin(), d.end(), [](int x) { return x < 0; }))
      throw std::invalid_argument("coupling graph is disconnected");
  }
}

CouplingGraph CouplingGraph::from_device(const DeviceModel& device) {
  return CouplingGraph(device.num_qubits, device.coupling);
}

bool CouplingGraph::adjacent(int a, int b) const { return edges_.count({std::min(a, b), std::max(a, b)}) > 0; }

int CouplingGraph::degree(int q) const { return static_cast<int>(adj_.at(static_cast<std::size_t>(q)).size()); }

std::vector<int> CouplingGraph::shortest_path(int a, int b) const {
  std::vector<int> path{a};
  int cur = a;
  while (cur != b) {
    for (int v : adj_[static_cast<std::size_t>(cur)]) {
      if (distance(v, b) == distance(cur, b) - 1) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

// ---------- passes ----------

bool is_basis_gate(GateKind kind) {
  return kind == GateKind::kU1 || kind == GateKind::kU2 || kind == GateKind::kU3 || kind == GateKind::kCnot;
}

Circuit decompose_to_basis(const Circuit& circuit) {
  Circuit out(circuit.num_qubits(), circuit.num_clbits(), circuit.name());
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind != InstructionKind::kGate) {
      out.append(inst);
      continue;
    }
    const auto& q = inst.qubits;
    const auto& p = inst.gate->params();
    switch (inst.gate->kind()) {
      case GateKind::kH: out.gate(gates::u2(0.0, kPi), q); break;
      case GateKind::kX: out.gate(gates::u3(kPi, 0.0, kPi), q); break;
      case GateKind::kRy: out.gate(gates::u3(p[0], 0.0, 0.0), q); break;
      case GateKind::kU1:
      case GateKind::kU2:
      case GateKind::kU3:
      case GateKind::kCnot: out.append(inst); break;
      case GateKind::kSwap:
        out.cx(q[0], q[1]);
        out.cx(q[1], q[0]);
        out.cx(q[0], q[1]);
        break;
      case GateKind::kCcx: emit_ccx(out, q[0], q[1], q[2]); break;
    }
  }
  return out;
}

Circuit fuse_single_qubit_gates(const Circuit& circuit) {
  Circuit out(circuit.num_qubits(), circuit.num_clbits(), circuit.name());
  std::vector<std::optional<Eigen::Matrix2cd>> pending(static_cast<std::size_t>(circuit.num_qubits()));

  auto flush = [&](int q) {
    auto& slot = pending[static_cast<std::size_t>(q)];
    if (slot && !is_identity_up_to_phase(*slot)) out.gate(u3_from_matrix(*slot), {q});
    slot.reset();
  };

  for (const auto& inst : circuit.instructions()) {
    if (inst.kind == InstructionKind::kGate && inst.gate->arity() == 1) {
      if (!is_basis_gate(inst.gate->kind()))
        throw std::invalid_argument("fuse_single_qubit_gates expects a basis-decomposed circuit");
      auto& slot = pending[static_cast<std::size_t>(inst.qubits[0])];
      const Eigen::Matrix2cd m = matrix_of(*inst.gate).matrix();
      slot = slot ? Eigen::Matrix2cd(m * *slot) : m;
      continue;
    }
    if (inst.kind == InstructionKind::kBarrier && inst.qubits.empty()) {
      for (int q = 0; q < circuit.num_qubits(); ++q) flush(q);
    } else {
      for (int q : inst.qubits) flush(q);
    }
    out.append(inst);
  }
  for (int q = 0; q < circuit.num_qubits(); ++q) flush(q);
  return out;
}

std::vector<int> default_layout(const Circuit& circuit, const CouplingGraph& graph) {
  const int logical = circuit.num_qubits();
  if (logical > graph.num_qubits()) throw std::invalid_argument("circuit has more qubits than the coupling graph");
  std::vector<int> layout(static_cast<std::size_t>(logical));
  for (int l = 0; l < logical; ++l) layout[static_cast<std::size_t>(l)] = l;

  std::vector<int> degree(static_cast<std::size_t>(logical), 0);
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind == InstructionKind::kGate && inst.qubits.size() >= 2) {
      for (int q : inst.qubits) ++degree[static_cast<std::size_t>(q)];
    }
  }
  // Ties go to the highest logical index.
  int l_star = 0;
  for (int l = 1; l < logical; ++l) {
    if (degree[static_cast<std::size_t>(l)] >= degree[static_cast<std::size_t>(l_star)]) l_star = l;
  }
  if (degree[static_cast<std::size_t>(l_star)] == 0) return layout;

  int p_star = 0;
  for (int p = 1; p < graph.num_qubits(); ++p) {
    if (graph.degree(p) > graph.degree(p_star)) p_star = p;
  }
  if (p_star < logical) {
    std::swap(layout[static_cast<std::size_t>(l_star)], layout[static_cast<std::size_t>(p_star)]);
  } else {
    layout[static_cast<std::size_t>(l_star)] = p_star;
  }
  return layout;
}

TranspiledCircuit route(const Circuit& circuit, const CouplingGraph& graph,
                        const std::optional<std::vector<int>>& initial_layout) {
  const int logical = circuit.num_qubits();
  const int physical = graph.num_qubits();
  if (logical > physical) throw std::invalid_argument("circuit has more qubits than the coupling graph");
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind == InstructionKind::kGate && !is_basis_gate(inst.gate->kind()))
      throw std::invalid_argument("route requires a basis-decomposed circuit (found '" +
                                  std::string(inst.gate->name()) + "')");
  }

  std::vector<int> layout = initial_layout ? *initial_layout : default_layout(circuit, graph);
  if (static_cast<int>(layout.size()) != logical)
    throw std::invalid_argument("layout size does not match circuit qubit count");
  std::vector<int> phys_to_log(static_cast<std::size_t>(physical), -1);
  for (int l = 0; l < logical; ++l) {
    const int p = layout[static_cast<std::size_t>(l)];
    if (p < 0 || p >= physical) throw std::invalid_argument("layout maps to unknown physical qubit");
    if (phys_to_log[static_cast<std::size_t>(p)] >= 0) throw std::invalid_argument("layout conflict on physical qubit " + std::to_string(p));
    phys_to_log[static_cast<std::size_t>(p)] = l;
  }
  // Unused physical qubits carry ancilla ids logical, logical + 1, ...
  std::vector<int> log_to_phys = layout;
  for (int p = 0, next = logical; p < physical; ++p) {
    if (phys_to_log[static_cast<std::size_t>(p)] < 0) {
      phys_to_log[static_cast<std::size_t>(p)] = next++;
      log_to_phys.push_back(p);
    }
  }

  TranspiledCircuit result{Circuit(physical, circuit.num_clbits(), circuit.name()), layout, {}, 0, logical};
  Circuit& out = result.circuit;
  std::vector<Instruction> measures;

  auto phys = [&](int l) { return log_to_phys[static_cast<std::size_t>(l)]; };
  auto do_swap = [&](int pa, int pb) {
    out.cx(pa, pb);
    out.cx(pb, pa);
    out.cx(pa, pb);
    const int la = phys_to_log[static_cast<std::size_t>(pa)];
    const int lb = phys_to_log[static_cast<std::size_t>(pb)];
    std::swap(phys_to_log[static_cast<std::size_t>(pa)], phys_to_log[static_cast<std::size_t>(pb)]);
    log_to_phys[static_cast<std::size_t>(la)] = pb;
    log_to_phys[static_cast<std::size_t>(lb)] = pa;
    ++result.swap_count;
  };

  const auto& insts = circuit.instructions();
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const auto& inst = insts[i];
    switch (inst.kind) {
      case InstructionKind::kMeasure:
        // Terminal measurements commute past later gates on other qubits.
        measures.push_back(inst);
        break;
      case InstructionKind::kBarrier: {
        std::vector<int> mapped;
        for (int q : inst.qubits) mapped.push_back(phys(q));
        out.barrier(mapped);
        break;
      }
      case InstructionKind::kGate: {
        if (inst.qubits.size() == 1) {
          out.gate(*inst.gate, {phys(inst.qubits[0])});
          break;
        }
        const int a = inst.qubits[0];
        const int b = inst.qubits[1];
        while (!graph.adjacent(phys(a), phys(b))) {
          const auto path = graph.shortest_path(phys(a), phys(b));
          do_swap(path[0], path[1]);
        }
        out.gate(*inst.gate, {phys(a), phys(b)});
        break;
      }
    }
  }
  for (const auto& m : measures) out.measure(phys(m.qubits[0]), m.clbit);

  result.final_layout.assign(log_to_phys.begin(), log_to_phys.begin() + logical);
  return result;
}

TranspiledCircuit transpile(const Circuit& circuit, const DeviceModel& device, const TranspileOptions& options) {
  Circuit basis = decompose_to_basis(circuit);
  if (options.fuse_single_qubit) basis = fuse_single_qubit_gates(basis);
  return route(basis, CouplingGraph::from_device(device), options.initial_layout);
}

FidelityEstimate estimate_fidelity(const Circuit& basis_circuit, const DeviceModel& device) {
  double f = 1.0;
  for (const auto& inst : basis_circuit.instructions()) {
    if (inst.kind != InstructionKind::kGate) continue;
    const auto kind = inst.gate->kind();
    if (!is_basis_gate(kind)) throw std::invalid_argument("estimate_fidelity expects basis gates only");
    f *= 1.0 - (kind == GateKind::kCnot ? device.cnot_error : device.single_qubit_error);
  }
  for (int q : basis_circuit.measured_qubits()) {
    if (q >= device.num_qubits) throw std::invalid_argument("measured qubit not present on device");
    const auto& ro = device.readout[static_cast<std::size_t>(q)];
    f *= 1.0 - 0.5 * (ro.p01 + ro.p10);
  }
  return {f, 1.0 - f};
}

std::map<std::string, int> gate_counts(const Circuit& circuit) {
  std::map<std::string, int> counts;
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind == InstructionKind::kGate) ++counts[std::string(inst.gate->name())];
    if (inst.kind == InstructionKind::kMeasure) ++counts["measure"];
  }
  return counts;
}

Circuit strip_measurements(const Circuit& circuit) {
  Circuit out(circuit.num_qubits(), circuit.num_clbits(), circuit.name());
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind != InstructionKind::kMeasure) out.append(inst);
  }
  return out;
}

UnitaryMatrix effective_unitary(const TranspiledCircuit& t) {
  const int logical = t.num_logical;
  const int physical = t.circuit.num_qubits();
  const UnitaryMatrix u = unitary_of(strip_measurements(t.circuit));

  auto bit = [](std::uint64_t idx, int width, int q) { return (idx >> (width - 1 - q)) & 1u; };
  std::vector<bool> holds_logical(static_cast<std::size_t>(physical), false);
  for (int p : t.final_layout) holds_logical[static_cast<std::size_t>(p)] = true;

  const Eigen::Index dim = Eigen::Index{1} << logical;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
    std::uint64_t in = 0;
    for (int l = 0; l < logical; ++l) {
      if (bit(x, logical, l)) in |= std::uint64_t{1} << (physical - 1 - t.initial_layout[static_cast<std::size_t>(l)]);
    }
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << physical); ++y) {
      const Complex amp = u(static_cast<int>(y), static_cast<int>(in));
      bool ancilla_zero = true;
      for (int p = 0; p < physical; ++p) {
        if (!holds_logical[static_cast<std::size_t>(p)] && bit(y, physical, p)) ancilla_zero = false;
      }
      if (!ancilla_zero) {
        if (std::abs(amp) > 1e-9) throw std::runtime_error("routed circuit leaks amplitude into ancilla qubits");
        continue;
      }
      std::uint64_t outl = 0;
      for (int l = 0; l < logical; ++l) {
        outl = (outl << 1) | bit(y, physical, t.final_layout[static_cast<std::size_t>(l)]);
      }
      m(static_cast<Eigen::Index>(outl), static_cast<Eigen::Index>(x)) = amp;
    }
  }
  return UnitaryMatrix(m, 1e-10);
}

namespace {

struct MeasurementMap {
  std::vector<int> physical;        // measured physical qubits, ascending
  std::vector<std::size_t> position;  // physical[k] -> bit position in logical key
  std::vector<int> logical;         // measured logical qubits, ascending
};

MeasurementMap measurement_map(const TranspiledCircuit& t) {
  MeasurementMap m;
  m.physical = t.circuit.measured_qubits();
  std::vector<int> logical_of(static_cast<std::size_t>(t.circuit.num_qubits()), -1);
  for (int l = 0; l < t.num_logical; ++l) logical_of[static_cast<std::size_t>(t.final_layout[static_cast<std::size_t>(l)])] = l;

  std::vector<int> logical_measured;
  for (int p : m.physical) {
    const int l = logical_of[static_cast<std::size_t>(p)];
    if (l < 0) throw std::invalid_argument("measured physical qubit holds no logical qubit");
    logical_measured.push_back(l);
  }
  m.logical = logical_measured;
  std::sort(m.logical.begin(), m.logical.end());
  for (int l : logical_measured) {
    m.position.push_back(static_cast<std::size_t>(std::lower_bound(m.logical.begin(), m.logical.end(), l) - m.logical.begin()));
  }
  return m;
}

std::string permute_key(const std::string& key, const MeasurementMap& m) {
  if (key.size() != m.physical.size()) throw std::invalid_argument("count key width mismatch");
  std::string mapped(key.size(), '0');
  for (std::size_t k = 0; k < key.size(); ++k) mapped[m.position[k]] = key[k];
  return mapped;
}

}  // namespace

CountsHistogram to_logical_counts(const CountsHistogram& physical, const TranspiledCircuit& t) {
  const MeasurementMap m = measurement_map(t);
  CountsHistogram out;
  out.shots = physical.shots;
  for (const auto& [key, n] : physical.counts) out.counts[permute_key(key, m)] += n;
  return out;
}

Distribution to_logical_distribution(const Distribution& physical, const TranspiledCircuit& t) {
  const MeasurementMap m = measurement_map(t);
  if (physical.num_bits != static_cast<int>(m.physical.size())) throw std::invalid_argument("distribution width mismatch");
  Distribution out{physical.num_bits, std::vector<double>(physical.p.size(), 0.0)};
  for (std::size_t i = 0; i < physical.p.size(); ++i) {
    out.p[index_of(permute_key(bitstring(i, physical.num_bits), m))] += physical.p[i];
  }
  return out;
}

std::vector<ReadoutError> logical_readout(const TranspiledCircuit& t, const DeviceModel& device) {
  const MeasurementMap m = measurement_map(t);
  std::vector<ReadoutError> out(m.physical.size());
  for (std::size_t k = 0; k < m.physical.size(); ++k) out[m.position[k]] = device.readout.at(static_cast<std::size_t>(m.physical[k]));
  return out;
}

}  // namespace qfound
