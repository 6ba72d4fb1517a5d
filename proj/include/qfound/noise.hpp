#pragma once

#include <cstdint>
#include <vector>

#include "qfound/circuit.hpp"
#include "qfound/device.hpp"

namespace qfound {

/// Stochastic-Pauli gate noise plus independent readout flips. After a gate
/// fires an error (probability rate_for_arity), every touched qubit receives
/// an independent uniformly random X, Y or Z.
struct NoiseChannel {
  double one_qubit = 0.0;
  double two_qubit = 0.0;
  // CCX as its 6-CNOT / 9-single-qubit expansion.
  double three_qubit = 0.0;
  std::vector<ReadoutError> readout;

  double rate_for_arity(int arity) const;

  static NoiseChannel from_device(const DeviceModel& device);
};

// `shots` draws from probabilities(state) over all qubits; deterministic in seed.
CountsHistogram sample_counts(const StateVector& state, std::int64_t shots, std::uint64_t seed);

// Monte-Carlo trajectory sampling of `circuit` on `device`. Keys cover the
// measured qubits (all qubits if the circuit has no measurements).
CountsHistogram simulate_noisy(const Circuit& circuit, const DeviceModel& device, std::int64_t shots,
                               std::uint64_t seed);

struct NoisyDistribution {
  Distribution distribution;    // over the measured qubits, readout noise included
  double discarded_mass = 0.0;  // probability of pruned trajectories
  std::uint64_t trajectories = 0;
};

struct EnumerationLimits {
  double prune_below = 1e-13;
  double max_discarded = 1e-6;
  std::uint64_t max_nodes = 20'000'000;
};

// Expected output distribution of simulate_noisy, computed by enumerating
// every Pauli-error trajectory (branches lighter than prune_below are
// dropped). Throws std::runtime_error when limits are exceeded.
NoisyDistribution noisy_distribution(const Circuit& circuit, const DeviceModel& device,
                                     const EnumerationLimits& limits = {});

// Exact readout flips applied bit by bit to a distribution over `qubits`.
Distribution apply_readout_noise(const Distribution& dist, const std::vector<ReadoutError>& per_bit);

// Marginal of an all-qubit distribution onto `qubits` (ascending order).
Distribution marginal(const Distribution& full, const std::vector<int>& qubits);

}  // namespace qfound
