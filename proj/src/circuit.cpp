#include "qfound/circuit.hpp"

#include <algorithm>
#include <stdexcept>

namespace qfound {

Instruction Instruction::gate_op(GateDef gate, std::vector<int> qubits) {
  Instruction i;
  i.kind = InstructionKind::kGate;
  if (static_cast<int>(qubits.size()) != gate.arity())
    throw std::invalid_argument("gate '" + std::string(gate.name()) + "' expects " + std::to_string(gate.arity()) +
                                " qubit(s)");
  i.gate = std::move(gate);
  i.qubits = std::move(qubits);
  return i;
}

Instruction Instruction::measure(int qubit, int clbit) {
  Instruction i;
  i.kind = InstructionKind::kMeasure;
  i.qubits = {qubit};
  i.clbit = clbit;
  return i;
}

Instruction Instruction::barrier(std::vector<int> qubits) {
  Instruction i;
  i.kind = InstructionKind::kBarrier;
  i.qubits = std::move(qubits);
  return i;
}

Circuit::Circuit(int num_qubits, int num_clbits, std::string name)
    : num_qubits_(num_qubits), num_clbits_(num_clbits), name_(std::move(name)) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("circuit qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  if (num_clbits < 0) throw std::invalid_argument("negative clbit count");
  measured_.assign(static_cast<std::size_t>(num_qubits), false);
  clbit_used_.assign(static_cast<std::size_t>(num_clbits), false);
}

Circuit& Circuit::append(Instruction inst) {
  for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
    const int q = inst.qubits[i];
    if (q < 0 || q >= num_qubits_) throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (inst.qubits[j] == q) throw std::invalid_argument("duplicate qubit " + std::to_string(q) + " in instruction");
    }
  }
  switch (inst.kind) {
    case InstructionKind::kGate: {
      if (!inst.gate) throw std::invalid_argument("gate instruction without a gate");
      if (static_cast<int>(inst.qubits.size()) != inst.gate->arity())
        throw std::invalid_argument("gate arity does not match qubit count");
      for (int q : inst.qubits) {
        if (measured_[static_cast<std::size_t>(q)])
          throw std::invalid_argument("gate on qubit " + std::to_string(q) + " after its measurement");
      }
      break;
    }
    case InstructionKind::kMeasure: {
      if (inst.qubits.size() != 1) throw std::invalid_argument("measure acts on exactly one qubit");
      if (inst.gate) throw std::invalid_argument("measure instruction carries a gate");
      const int q = inst.qubits[0];
      if (inst.clbit < 0 || inst.clbit >= num_clbits_)
        throw std::out_of_range("clbit index " + std::to_string(inst.clbit) + " out of range");
      if (measured_[static_cast<std::size_t>(q)])
        throw std::invalid_argument("qubit " + std::to_string(q) + " measured twice");
      if (clbit_used_[static_cast<std::size_t>(inst.clbit)])
        throw std::invalid_argument("clbit " + std::to_string(inst.clbit) + " written twice");
      measured_[static_cast<std::size_t>(q)] = true;
      clbit_used_[static_cast<std::size_t>(inst.clbit)] = true;
      break;
    }
    case InstructionKind::kBarrier:
      if (inst.gate) throw std::invalid_argument("barrier instruction carries a gate");
      if (inst.qubits.empty()) {
        for (int q = 0; q < num_qubits_; ++q) inst.qubits.push_back(q);
      }
      break;
  }
  instructions_.push_back(std::move(inst));
  return *this;
}

Circuit& Circuit::measure_all() {
  if (num_clbits_ < num_qubits_) {
    num_clbits_ = num_qubits_;
    clbit_used_.resize(static_cast<std::size_t>(num_clbits_), false);
  }
  for (int q = 0; q < num_qubits_; ++q) measure(q, q);
  return *this;
}

std::vector<int> Circuit::measured_qubits() const {
  std::vector<int> out;
  for (int q = 0; q < num_qubits_; ++q) {
    if (measured_[static_cast<std::size_t>(q)]) out.push_back(q);
  }
  return out;
}

bool Circuit::has_measurements() const {
  return std::any_of(measured_.begin(), measured_.end(), [](bool b) { return b; });
}

int Circuit::gate_count() const {
  return static_cast<int>(std::count_if(instructions_.begin(), instructions_.end(),
                                        [](const Instruction& i) { return i.kind == InstructionKind::kGate; }));
}

// ---------- CountsHistogram ----------

int CountsHistogram::num_bits() const {
  if (counts.empty()) return 0;
  return static_cast<int>(counts.begin()->first.size());
}

std::int64_t CountsHistogram::count(const std::string& key) const {
  auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

double CountsHistogram::frequency(const std::string& key) const {
  if (shots <= 0) throw std::invalid_argument("histogram has no shots");
  return static_cast<double>(count(key)) / static_cast<double>(shots);
}

Distribution CountsHistogram::to_distribution() const {
  if (shots <= 0) throw std::invalid_argument("histogram has no shots");
  Distribution d;
  d.num_bits = num_bits();
  d.p.assign(std::size_t{1} << d.num_bits, 0.0);
  for (const auto& [key, n] : counts) d.p[index_of(key)] = static_cast<double>(n) / static_cast<double>(shots);
  return d;
}

// ---------- simulation ----------

namespace {

void run_gates(std::vector<Complex>& amps, const Circuit& circuit) {
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind != InstructionKind::kGate) continue;
    detail::apply_matrix_inplace(amps, circuit.num_qubits(), matrix_of(*inst.gate).matrix(), inst.qubits);
  }
}

}  // namespace

StateVector simulate_ideal(const Circuit& circuit) {
  std::vector<Complex> amps(std::size_t{1} << circuit.num_qubits(), Complex{0.0, 0.0});
  amps[0] = 1.0;
  run_gates(amps, circuit);
  return StateVector::from_amplitudes(std::move(amps));
}

UnitaryMatrix unitary_of(const Circuit& circuit) {
  if (circuit.num_qubits() > kMaxUnitaryQubits)
    throw std::invalid_argument("unitary_of supports at most " + std::to_string(kMaxUnitaryQubits) + " qubits");
  if (circuit.has_measurements()) throw std::invalid_argument("unitary_of requires a circuit without measurements");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << circuit.num_qubits());
  Eigen::MatrixXcd u(dim, dim);
  std::vector<Complex> col(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::fill(col.begin(), col.end(), Complex{0.0, 0.0});
    col[static_cast<std::size_t>(j)] = 1.0;
    run_gates(col, circuit);
    for (Eigen::Index i = 0; i < dim; ++i) u(i, j) = col[static_cast<std::size_t>(i)];
  }
  return UnitaryMatrix(u);
}

}  // namespace qfound
