#include "qfound/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qfound {

std::string bitstring(std::uint64_t index, int num_bits) {
  std::string s(static_cast<std::size_t>(num_bits), '0');
  for (int q = 0; q < num_bits; ++q) {
    if ((index >> (num_bits - 1 - q)) & 1u) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

std::uint64_t index_of(std::string_view bits) {
  if (bits.size() > 64) throw std::invalid_argument("bitstring longer than 64 bits");
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring contains non-binary character");
    idx = (idx << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return idx;
}

// ---------- UnitaryMatrix ----------

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("unitary matrix must be square and non-empty");
  if (!std::has_single_bit(static_cast<std::uint64_t>(m_.rows())))
    throw std::invalid_argument("unitary dimension must be a power of two");
  const Eigen::MatrixXcd gram = m_.adjoint() * m_;
  const auto dev = (gram - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) throw std::invalid_argument("matrix is not unitary within tolerance");
}

UnitaryMatrix UnitaryMatrix::identity(int dim) {
  return UnitaryMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

int UnitaryMatrix::num_qubits() const {
  return std::countr_zero(static_cast<std::uint64_t>(m_.rows()));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint(), Unchecked{}); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  if (dim() != rhs.dim()) throw std::invalid_argument("unitary dimension mismatch");
  return UnitaryMatrix(m_ * rhs.m_, Unchecked{});
}

// ---------- StateVector ----------

StateVector StateVector::zero(int num_qubits) { return basis(num_qubits, 0); }

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("num_qubits must be in [1, " + std::to_string(kMaxQubits) + "]");
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  if (index >= dim) throw std::out_of_range("basis index out of range");
  std::vector<Complex> amps(dim, Complex{0.0, 0.0});
  amps[index] = Complex{1.0, 0.0};
  return StateVector(num_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, NormCheck check) {
  const auto len = static_cast<std::uint64_t>(amplitudes.size());
  if (len < 2 || !std::has_single_bit(len))
    throw std::invalid_argument("amplitude count must be a power of two >= 2");
  const int n = std::countr_zero(len);
  if (n > kMaxQubits) throw std::invalid_argument("too many qubits");
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("non-finite amplitude");
  }
  StateVector s(n, std::move(amplitudes));
  if (check == NormCheck::kChecked && std::abs(s.norm_squared() - 1.0) > tol::kAlgebraic)
    throw std::invalid_argument("state is not normalized");
  return s;
}

Complex StateVector::amplitude(std::string_view bits) const {
  if (static_cast<int>(bits.size()) != num_qubits_)
    throw std::invalid_argument("bitstring length does not match qubit count");
  return amps_[index_of(bits)];
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

// ---------- Distribution ----------

double Distribution::total() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.p.size() != b.p.size()) throw std::invalid_argument("distribution size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

// ---------- operations ----------

StateVector init_state(int num_qubits) { return StateVector::zero(num_qubits); }

namespace detail {

void validate_targets(int num_qubits, int gate_dim, std::span<const int> targets) {
  if (targets.empty() || targets.size() > 6) throw std::invalid_argument("gate must act on 1 to 6 qubits");
  if (gate_dim != (1 << targets.size()))
    throw std::invalid_argument("gate dimension does not match target count");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) throw std::out_of_range("target qubit out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target qubit");
    }
  }
}

void apply_matrix_inplace(std::vector<Complex>& amps, int num_qubits, const Eigen::MatrixXcd& gate,
                          std::span<const int> targets) {
  const int k = static_cast<int>(targets.size());
  const std::size_t local_dim = std::size_t{1} << k;

  // Bit masks in the global index for each target; targets[0] is the most
  // significant local bit.
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(k));
  std::uint64_t all = 0;
  for (int t = 0; t < k; ++t) {
    masks[static_cast<std::size_t>(t)] = std::uint64_t{1} << (num_qubits - 1 - targets[static_cast<std::size_t>(t)]);
    all |= masks[static_cast<std::size_t>(t)];
  }
  std::vector<std::uint64_t> offsets(local_dim, 0);
  for (std::size_t l = 0; l < local_dim; ++l) {
    for (int t = 0; t < k; ++t) {
      if ((l >> (k - 1 - t)) & 1u) offsets[l] |= masks[static_cast<std::size_t>(t)];
    }
  }

  std::vector<Complex> in(local_dim);
  const std::uint64_t dim = amps.size();
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & all) continue;
    for (std::size_t l = 0; l < local_dim; ++l) in[l] = amps[base | offsets[l]];
    for (std::size_t r = 0; r < local_dim; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t c = 0; c < local_dim; ++c) acc += gate(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      amps[base | offsets[r]] = acc;
    }
  }
}

}  // namespace detail

StateVector apply_gate(const StateVector& state, const UnitaryMatrix& gate, std::span<const int> targets) {
  detail::validate_targets(state.num_qubits(), gate.dim(), targets);
  StateVector out = state;
  detail::apply_matrix_inplace(out.amps_, out.num_qubits_, gate.matrix(), targets);
  return out;
}

Distribution probabilities(const StateVector& state) {
  Distribution d;
  d.num_bits = state.num_qubits();
  d.p.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) d.p[i] = std::norm(state[i]);
  return d;
}

bool equal_up_to_global_phase(const UnitaryMatrix& a, const UnitaryMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  // Phase c minimizing ||a - c b||_F is the phase of <b, a>.
  const Complex overlap = (b.matrix().adjoint() * a.matrix()).trace();
  if (std::abs(overlap) == 0.0) return false;
  const Complex c = overlap / std::abs(overlap);
  const double dev = (a.matrix() - c * b.matrix()).cwiseAbs().maxCoeff();
  return dev <= tol;
}

}  // namespace qfound
