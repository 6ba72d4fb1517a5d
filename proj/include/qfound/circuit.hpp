#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfound/gates.hpp"
#include "qfound/state.hpp"

namespace qfound {

enum class InstructionKind { kGate, kMeasure, kBarrier };

struct Instruction {
  InstructionKind kind = InstructionKind::kBarrier;
  std::optional<GateDef> gate;
  std::vector<int> qubits;
  int clbit = -1;

  static Instruction gate_op(GateDef gate, std::vector<int> qubits);
  static Instruction measure(int qubit, int clbit);
  // Empty qubit list is expanded to every qubit on append.
  static Instruction barrier(std::vector<int> qubits = {});

  bool operator==(const Instruction&) const = default;
};

/// Gate list over a fixed quantum/classical register. Measurements are
/// terminal: once a qubit is measured no further gate may touch it.
class Circuit {
 public:
  explicit Circuit(int num_qubits, int num_clbits = 0, std::string name = {});

  int num_qubits() const { return num_qubits_; }
  int num_clbits() const { return num_clbits_; }
  const std::string& name() const { return name_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  std::size_t size() const { return instructions_.size(); }

  void set_name(std::string name) { name_ = std::move(name); }

  // Validates against the registers and the terminal-measurement rule.
  Circuit& append(Instruction inst);

  Circuit& gate(GateDef g, std::vector<int> qubits) { return append(Instruction::gate_op(std::move(g), std::move(qubits))); }
  Circuit& h(int q) { return gate(gates::h(), {q}); }
  Circuit& x(int q) { return gate(gates::x(), {q}); }
  Circuit& ry(double theta, int q) { return gate(gates::ry(theta), {q}); }
  Circuit& cx(int control, int target) { return gate(gates::cnot(), {control, target}); }
  Circuit& ccx(int c0, int c1, int target) { return gate(gates::ccx(), {c0, c1, target}); }
  Circuit& swap(int a, int b) { return gate(gates::swap(), {a, b}); }
  Circuit& measure(int qubit, int clbit) { return append(Instruction::measure(qubit, clbit)); }
  // Measures qubit i into clbit i, growing the classical register if needed.
  Circuit& measure_all();
  Circuit& barrier(std::vector<int> qubits = {}) { return append(Instruction::barrier(std::move(qubits))); }

  // Sorted qubits with a measure instruction.
  std::vector<int> measured_qubits() const;
  bool has_measurements() const;
  int gate_count() const;

  // Structural equality: registers and instruction list; the name is a label.
  bool operator==(const Circuit& other) const {
    return num_qubits_ == other.num_qubits_ && num_clbits_ == other.num_clbits_ &&
           instructions_ == other.instructions_;
  }

 private:
  int num_qubits_;
  int num_clbits_;
  std::string name_;
  std::vector<Instruction> instructions_;
  std::vector<bool> measured_;
  std::vector<bool> clbit_used_;
};

/// Shot counts keyed by bitstring over the measured qubits in ascending
/// qubit order (q0-leftmost), independent of clbit assignment.
struct CountsHistogram {
  std::int64_t shots = 0;
  std::map<std::string, std::int64_t> counts;

  int num_bits() const;
  std::int64_t count(const std::string& key) const;
  double frequency(const std::string& key) const;
  Distribution to_distribution() const;
};

// Final pure state after all gate instructions; measures and barriers skipped.
StateVector simulate_ideal(const Circuit& circuit);

inline constexpr int kMaxUnitaryQubits = 6;
UnitaryMatrix unitary_of(const Circuit& circuit);

}  // namespace qfound
