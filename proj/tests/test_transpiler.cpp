#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qfound/device.hpp"
#include "qfound/experiments.hpp"
#include "qfound/noise.hpp"
#include "qfound/rng.hpp"
#include "qfound/transpiler.hpp"
#include "random_circuit.hpp"

using namespace qfound;

namespace {

constexpr double kPi = std::numbers::pi;

int count_kind(const Circuit& c, GateKind k) {
  int n = 0;
  for (const auto& inst : c.instructions()) n += inst.kind == InstructionKind::kGate && inst.gate->kind() == k;
  return n;
}

void expect_on_edges(const TranspiledCircuit& t, const CouplingGraph& g) {
  for (const auto& inst : t.circuit.instructions()) {
    if (inst.kind != InstructionKind::kGate) continue;
    EXPECT_TRUE(is_basis_gate(inst.gate->kind()));
    if (inst.qubits.size() == 2) {
      EXPECT_TRUE(g.adjacent(inst.qubits[0], inst.qubits[1]));
    }
  }
}

}  // namespace

TEST(CouplingGraph, TShape) {
  const CouplingGraph g(5, t_shape_coupling());
  EXPECT_EQ(g.degree(1), 3);
  EXPECT_TRUE(g.adjacent(3, 1));
  EXPECT_FALSE(g.adjacent(0, 2));
  EXPECT_EQ(g.distance(0, 4), 3);
  EXPECT_EQ(g.shortest_path(0, 4), (std::vector<int>{0, 1, 3, 4}));
  EXPECT_THROW(CouplingGraph(4, {{0, 1}, {2, 3}}), std::invalid_argument);
  EXPECT_THROW(CouplingGraph(2, {{0, 2}}), std::invalid_argument);
}

TEST(Decompose, SingleQubitRules) {
  Circuit h(1);
  h.h(0);
  const Circuit dh = decompose_to_basis(h);
  ASSERT_EQ(dh.size(), 1u);
  EXPECT_EQ(*dh.instructions()[0].gate, gates::u2(0.0, kPi));

  Circuit ry(1);
  ry.ry(0.3, 0);
  EXPECT_EQ(*decompose_to_basis(ry).instructions()[0].gate, gates::u3(0.3, 0.0, 0.0));

  Circuit x(1);
  x.x(0);
  EXPECT_EQ(*decompose_to_basis(x).instructions()[0].gate, gates::u3(kPi, 0.0, kPi));
}

TEST(Decompose, ToffoliUsesSixCnots) {
  Circuit c(3);
  c.ccx(0, 1, 2);
  const Circuit d = decompose_to_basis(c);
  EXPECT_EQ(count_kind(d, GateKind::kCnot), 6);
  for (const auto& inst : d.instructions()) EXPECT_TRUE(is_basis_gate(inst.gate->kind()));
  EXPECT_TRUE(equal_up_to_global_phase(unitary_of(d), unitary_of(c), 1e-12));
}

TEST(Decompose, SwapUsesThreeCnots) {
  Circuit c(2);
  c.swap(0, 1);
  const Circuit d = decompose_to_basis(c);
  EXPECT_EQ(count_kind(d, GateKind::kCnot), 3);
  EXPECT_TRUE(equal_up_to_global_phase(unitary_of(d), unitary_of(c), 1e-12));
}

TEST(Route, BellOnEdgeNeedsNoSwap) {
  Circuit c(2, 2);
  c.h(0).cx(0, 1).measure_all();
  const TranspiledCircuit t = transpile(c, preset("vigo"));
  EXPECT_EQ(t.swap_count, 0);
}

TEST(Route, DistanceTwoNeedsOneSwap) {
  Circuit c(5);
  c.cx(0, 2);
  const CouplingGraph g(5, t_shape_coupling());
  const TranspiledCircuit t = route(c, g, std::vector<int>{0, 1, 2, 3, 4});
  EXPECT_EQ(t.swap_count, 1);
  expect_on_edges(t, g);
  EXPECT_TRUE(equal_up_to_global_phase(effective_unitary(t), unitary_of(c), 1e-12));
}

TEST(Route, HardyOnTShape) {
  // The 6-CNOT Toffoli network couples all three qubit pairs, while the T
  // graph has no triangle: at least one SWAP is unavoidable.
  const Circuit hardy = build_hardy(0.575 * kPi, 0.575 * kPi);
  std::set<std::pair<int, int>> pairs;
  const Circuit basis = decompose_to_basis(hardy);
  for (const auto& inst : basis.instructions()) {
    if (inst.kind == InstructionKind::kGate && inst.qubits.size() == 2)
      pairs.insert(std::minmax(inst.qubits[0], inst.qubits[1]));
  }
  EXPECT_EQ(pairs.size(), 3u);

  const DeviceModel vigo = preset("vigo");
  const TranspiledCircuit t = transpile(hardy, vigo);
  EXPECT_EQ(t.initial_layout[2], 1);  // Toffoli target (ties broken upward) on the center
  EXPECT_EQ(t.swap_count, 1);
  expect_on_edges(t, CouplingGraph::from_device(vigo));
  EXPECT_TRUE(equal_up_to_global_phase(effective_unitary(t), unitary_of(strip_measurements(hardy)), 1e-9));
}

TEST(Route, Errors) {
  Circuit c(2);
  c.h(0);
  const CouplingGraph g(3, {{0, 1}, {1, 2}});
  EXPECT_THROW(route(c, g), std::invalid_argument);  // not in basis
  const Circuit basis = decompose_to_basis(c);
  EXPECT_THROW(route(basis, g, std::vector<int>{1, 1}), std::invalid_argument);
  EXPECT_THROW(route(basis, g, std::vector<int>{0, 5}), std::invalid_argument);
  EXPECT_THROW(route(decompose_to_basis(Circuit(4).h(3)), g), std::invalid_argument);
}

TEST(Route, MeasurementsFollowFinalLayout) {
  Circuit c(3, 3);
  c.x(0).cx(0, 2).measure_all();
  const DeviceModel line{"line", "", 1, 1, 0, 0, {{0, 0}, {0, 0}, {0, 0}}, {{0, 1}, {1, 2}}, 3};
  const TranspiledCircuit t = route(decompose_to_basis(c), CouplingGraph(3, line.coupling), std::vector<int>{0, 1, 2});
  EXPECT_EQ(t.swap_count, 1);
  const CountsHistogram logical = to_logical_counts(simulate_noisy(t.circuit, DeviceModel::ideal(3), 50, 1), t);
  EXPECT_EQ(logical.count("101"), 50);
}

TEST(Fidelity, Examples) {
  const DeviceModel vigo = preset("vigo");
  EXPECT_EQ(estimate_fidelity(Circuit(2), vigo).fidelity, 1.0);

  Circuit one_cx(2, 2);
  one_cx.cx(0, 1).measure_all();
  EXPECT_NEAR(estimate_fidelity(one_cx, vigo).error, 1.0 - 0.9893 * 0.9834 * 0.9834, 1e-12);
  EXPECT_NEAR(estimate_fidelity(one_cx, vigo).error, 0.04327, 5e-6);

  Circuit bell(2, 2);
  bell.h(0).cx(0, 1).measure_all();
  const double expected = 1.0 - (1 - 0.00107) * (1 - 0.0107) * 0.9834 * 0.9834;
  EXPECT_NEAR(estimate_fidelity(transpile(bell, vigo), vigo).error, expected, 1e-12);
}

TEST(Fidelity, EraserBracketsReportedUncertainty) {
  const DeviceModel vigo = preset("vigo");
  const double err = estimate_fidelity(transpile(build_eraser(true), vigo), vigo).error;
  EXPECT_GE(err, 0.03);
  EXPECT_LE(err, 0.05);
  EXPECT_NEAR(err, 1.0 - std::pow(1 - 0.00107, 3) * 0.9893 * 0.9834 * 0.9834, 1e-12);
}

TEST(Fidelity, OrderInvariantAndMonotone) {
  const DeviceModel vigo = preset("vigo");
  Circuit a(2), b(2);
  a.gate(gates::u3(0.1, 0.2, 0.3), {0}).cx(0, 1).gate(gates::u1(0.5), {1});
  b.gate(gates::u1(0.5), {1}).cx(0, 1).gate(gates::u3(0.1, 0.2, 0.3), {0});
  EXPECT_DOUBLE_EQ(estimate_fidelity(a, vigo).fidelity, estimate_fidelity(b, vigo).fidelity);
  Circuit grow(2);
  double prev = estimate_fidelity(grow, vigo).fidelity;
  for (int i = 0; i < 10; ++i) {
    grow.gate(gates::u2(0.0, kPi), {i % 2});
    const double f = estimate_fidelity(grow, vigo).fidelity;
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(Fuse, PreservesUnitaryAndShrinks) {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const Circuit c = decompose_to_basis(fixtures::random_circuit(rng, 3, 15));
    const Circuit f = fuse_single_qubit_gates(c);
    EXPECT_LE(f.size(), c.size());
    EXPECT_TRUE(equal_up_to_global_phase(unitary_of(f), unitary_of(c), 1e-9));
  }
  Circuit hh(1);
  hh.gate(gates::u2(0.0, kPi), {0}).gate(gates::u2(0.0, kPi), {0});
  EXPECT_EQ(fuse_single_qubit_gates(hh).size(), 0u);
}

TEST(TranspilerProperties, RandomCircuitsPreserveSemantics) {
  Rng rng(2020);
  const std::vector<DeviceModel> devices{preset("vigo"), preset("x2")};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(2));
    const Circuit c = fixtures::random_circuit(rng, n, 1 + static_cast<int>(rng.below(12)));
    const DeviceModel& d = devices[static_cast<std::size_t>(trial % 2)];
    TranspileOptions opts;
    if (trial % 3 == 0) opts.initial_layout = fixtures::distinct_qubits(rng, d.num_qubits, n);
    const TranspiledCircuit t = transpile(c, d, opts);
    expect_on_edges(t, CouplingGraph::from_device(d));
    ASSERT_TRUE(equal_up_to_global_phase(effective_unitary(t), unitary_of(c), 1e-9)) << "trial " << trial;
  }
}
