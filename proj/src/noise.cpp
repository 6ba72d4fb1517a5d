#include "qfound/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "qfound/rng.hpp"

namespace qfound {

namespace {

struct CompiledGate {
  Eigen::MatrixXcd matrix;
  std::vector<int> qubits;
  double rate = 0.0;
};

std::vector<CompiledGate> compile(const Circuit& circuit, const NoiseChannel& channel) {
  std::vector<CompiledGate> out;
  for (const auto& inst : circuit.instructions()) {
    if (inst.kind != InstructionKind::kGate) continue;
    out.push_back({matrix_of(*inst.gate).matrix(), inst.qubits, channel.rate_for_arity(inst.gate->arity())});
  }
  return out;
}

const Eigen::MatrixXcd& pauli(int code) {
  static const Eigen::MatrixXcd px = (Eigen::MatrixXcd(2, 2) << 0, 1, 1, 0).finished();
  static const Eigen::MatrixXcd py =
      (Eigen::MatrixXcd(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Eigen::MatrixXcd pz = (Eigen::MatrixXcd(2, 2) << 1, 0, 0, -1).finished();
  switch (code) {
    case 1: return px;
    case 2: return py;
    default: return pz;
  }
}

std::vector<double> cumulative(const std::vector<Complex>& amps) {
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }
  return cdf;
}

// Inverse-CDF lookup. A draw past the rounded total falls on the last
// outcome with nonzero probability.
std::uint64_t sample_index(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) {
    std::size_t i = cdf.size() - 1;
    while (i > 0 && cdf[i] == cdf[i - 1]) --i;
    return i;
  }
  return static_cast<std::uint64_t>(it - cdf.begin());
}

std::string measured_key(std::uint64_t index, int num_qubits, const std::vector<int>& measured) {
  std::string key(measured.size(), '0');
  for (std::size_t k = 0; k < measured.size(); ++k) {
    if ((index >> (num_qubits - 1 - measured[k])) & 1u) key[k] = '1';
  }
  return key;
}

std::vector<int> measured_or_all(const Circuit& circuit) {
  auto m = circuit.measured_qubits();
  if (m.empty()) {
    for (int q = 0; q < circuit.num_qubits(); ++q) m.push_back(q);
  }
  return m;
}

int pow3(int k) {
  int r = 1;
  for (int i = 0; i < k; ++i) r *= 3;
  return r;
}

}  // namespace

double NoiseChannel::rate_for_arity(int arity) const {
  switch (arity) {
    case 1: return one_qubit;
    case 2: return two_qubit;
    case 3: return three_qubit;
    default: throw std::invalid_argument("no noise rate for gate arity " + std::to_string(arity));
  }
}

NoiseChannel NoiseChannel::from_device(const DeviceModel& device) {
  NoiseChannel c;
  c.one_qubit = device.single_qubit_error;
  c.two_qubit = device.cnot_error;
  c.three_qubit = 1.0 - std::pow(1.0 - device.cnot_error, 6) * std::pow(1.0 - device.single_qubit_error, 9);
  c.readout = device.readout;
  return c;
}

CountsHistogram sample_counts(const StateVector& state, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  const auto cdf = cumulative(amps);
  std::vector<std::int64_t> tally(cdf.size(), 0);
  for (std::int64_t s = 0; s < shots; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s), Rng::kMeasureChannel);
    ++tally[sample_index(cdf, rng.uniform())];
  }
  CountsHistogram h;
  h.shots = shots;
  for (std::size_t i = 0; i < tally.size(); ++i) {
    if (tally[i] > 0) h.counts[bitstring(i, state.num_qubits())] = tally[i];
  }
  return h;
}

CountsHistogram simulate_noisy(const Circuit& circuit, const DeviceModel& device, std::int64_t shots,
                               std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  device.validate();
  if (circuit.num_qubits() > device.num_qubits)
    throw std::invalid_argument("circuit is wider than device '" + device.name + "'");

  const NoiseChannel channel = NoiseChannel::from_device(device);
  const auto gates = compile(circuit, channel);
  const auto measured = measured_or_all(circuit);
  const int n = circuit.num_qubits();
  const std::size_t dim = std::size_t{1} << n;

  auto run = [&](const std::vector<std::pair<std::size_t, std::vector<int>>>& errors) {
    std::vector<Complex> amps(dim, Complex{0.0, 0.0});
    amps[0] = 1.0;
    std::size_t next_error = 0;
    for (std::size_t g = 0; g < gates.size(); ++g) {
      detail::apply_matrix_inplace(amps, n, gates[g].matrix, gates[g].qubits);
      if (next_error < errors.size() && errors[next_error].first == g) {
        const auto& codes = errors[next_error].second;
        for (std::size_t k = 0; k < codes.size(); ++k) {
          const int q = gates[g].qubits[k];
          detail::apply_matrix_inplace(amps, n, pauli(codes[k]), std::span<const int>(&q, 1));
        }
        ++next_error;
      }
    }
    return cumulative(amps);
  };

  const auto ideal_cdf = run({});
  std::map<std::vector<std::pair<std::size_t, std::vector<int>>>, std::vector<double>> cache;

  CountsHistogram h;
  h.shots = shots;
  std::vector<std::pair<std::size_t, std::vector<int>>> errors;
  for (std::int64_t s = 0; s < shots; ++s) {
    const auto shot = static_cast<std::uint64_t>(s);
    errors.clear();
    Rng noise = Rng::stream(seed, shot, Rng::kGateNoiseChannel);
    for (std::size_t g = 0; g < gates.size(); ++g) {
      if (noise.uniform() < gates[g].rate) {
        std::vector<int> codes(gates[g].qubits.size());
        for (auto& c : codes) c = static_cast<int>(noise.below(3)) + 1;
        errors.emplace_back(g, std::move(codes));
      }
    }
    const std::vector<double>* cdf = &ideal_cdf;
    if (!errors.empty()) {
      auto it = cache.find(errors);
      if (it == cache.end()) it = cache.emplace(errors, run(errors)).first;
      cdf = &it->second;
    }

    Rng meas = Rng::stream(seed, shot, Rng::kMeasureChannel);
    std::string key = measured_key(sample_index(*cdf, meas.uniform()), n, measured);

    Rng readout = Rng::stream(seed, shot, Rng::kReadoutChannel);
    for (std::size_t k = 0; k < measured.size(); ++k) {
      const auto& ro = channel.readout[static_cast<std::size_t>(measured[k])];
      const double flip = key[k] == '0' ? ro.p01 : ro.p10;
      if (readout.uniform() < flip) key[k] = key[k] == '0' ? '1' : '0';
    }
    ++h.counts[key];
  }
  return h;
}

Distribution marginal(const Distribution& full, const std::vector<int>& qubits) {
  Distribution out;
  out.num_bits = static_cast<int>(qubits.size());
  out.p.assign(std::size_t{1} << qubits.size(), 0.0);
  for (std::size_t i = 0; i < full.p.size(); ++i) {
    std::uint64_t j = 0;
    for (int q : qubits) j = (j << 1) | ((i >> (full.num_bits - 1 - q)) & 1u);
    out.p[j] += full.p[i];
  }
  return out;
}

Distribution apply_readout_noise(const Distribution& dist, const std::vector<ReadoutError>& per_bit) {
  if (static_cast<int>(per_bit.size()) != dist.num_bits)
    throw std::invalid_argument("readout error count does not match bit count");
  Distribution cur = dist;
  for (int b = 0; b < dist.num_bits; ++b) {
    const std::uint64_t mask = std::uint64_t{1} << (dist.num_bits - 1 - b);
    const auto& ro = per_bit[static_cast<std::size_t>(b)];
    Distribution next = cur;
    std::fill(next.p.begin(), next.p.end(), 0.0);
    for (std::size_t i = 0; i < cur.p.size(); ++i) {
      const bool one = (i & mask) != 0;
      const double flip = one ? ro.p10 : ro.p01;
      next.p[i] += (1.0 - flip) * cur.p[i];
      next.p[i ^ mask] += flip * cur.p[i];
    }
    cur = std::move(next);
  }
  return cur;
}

NoisyDistribution noisy_distribution(const Circuit& circuit, const DeviceModel& device,
                                     const EnumerationLimits& limits) {
  device.validate();
  if (circuit.num_qubits() > device.num_qubits)
    throw std::invalid_argument("circuit is wider than device '" + device.name + "'");
  const NoiseChannel channel = NoiseChannel::from_device(device);
  const auto gates = compile(circuit, channel);
  const int n = circuit.num_qubits();

  Distribution full;
  full.num_bits = n;
  full.p.assign(std::size_t{1} << n, 0.0);
  NoisyDistribution result;
  std::uint64_t nodes = 0;

  // Depth-first over gates; prefixes are shared between branches.
  auto descend = [&](auto&& self, std::vector<Complex> amps, std::size_t g, double weight) -> void {
    if (++nodes > limits.max_nodes) throw std::runtime_error("noisy enumeration exceeded node limit");
    if (g == gates.size()) {
      for (std::size_t i = 0; i < amps.size(); ++i) full.p[i] += weight * std::norm(amps[i]);
      ++result.trajectories;
      return;
    }
    const auto& gate = gates[g];
    detail::apply_matrix_inplace(amps, n, gate.matrix, gate.qubits);
    const int k = static_cast<int>(gate.qubits.size());
    const int combos = pow3(k);
    const double error_weight = weight * gate.rate / combos;
    if (gate.rate > 0.0) {
      for (int c = 0; c < combos; ++c) {
        if (error_weight < limits.prune_below) {
          result.discarded_mass += error_weight;
          continue;
        }
        std::vector<Complex> branch = amps;
        int code = c;
        for (int t = 0; t < k; ++t) {
          const int q = gate.qubits[static_cast<std::size_t>(t)];
          detail::apply_matrix_inplace(branch, n, pauli(code % 3 + 1), std::span<const int>(&q, 1));
          code /= 3;
        }
        self(self, std::move(branch), g + 1, error_weight);
      }
    }
    self(self, std::move(amps), g + 1, weight * (1.0 - gate.rate));
  };

  std::vector<Complex> start(std::size_t{1} << n, Complex{0.0, 0.0});
  start[0] = 1.0;
  descend(descend, std::move(start), 0, 1.0);

  if (result.discarded_mass > limits.max_discarded)
    throw std::runtime_error("noisy enumeration discarded too much probability mass");

  const auto measured = measured_or_all(circuit);
  std::vector<ReadoutError> ro;
  for (int q : measured) ro.push_back(channel.readout[static_cast<std::size_t>(q)]);
  result.distribution = apply_readout_noise(marginal(full, measured), ro);
  return result;
}

}  // namespace qfound
