#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qfound/tolerance.hpp"

namespace qfound {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;

// Formats a basis index as a bitstring with q0 as the leftmost character.
// q0 is the most significant bit of the index.
std::string bitstring(std::uint64_t index, int num_bits);
std::uint64_t index_of(std::string_view bits);

/// Square unitary matrix. Construction checks U^dagger U = I.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Eigen::MatrixXcd m, double tol = tol::kAlgebraic);

  static UnitaryMatrix identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  int num_qubits() const;
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  UnitaryMatrix adjoint() const;
  // Matrix product this * rhs.
  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;

 private:
  struct Unchecked {};
  UnitaryMatrix(Eigen::MatrixXcd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXcd m_;
};

enum class NormCheck { kChecked, kUnchecked };

/// Dense n-qubit pure state. Amplitude index i has q0 as its most
/// significant bit.
class StateVector {
 public:
  // |0...0>.
  static StateVector zero(int num_qubits);
  static StateVector basis(int num_qubits, std::uint64_t index);
  // Length must be a power of two. With kChecked the norm must be 1 within
  // tol::kAlgebraic; kUnchecked admits arbitrary vectors (linearity checks).
  static StateVector from_amplitudes(std::vector<Complex> amplitudes,
                                     NormCheck check = NormCheck::kChecked);

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  Complex amplitude(std::string_view bits) const;
  double norm_squared() const;

 private:
  StateVector(int n, std::vector<Complex> amps) : num_qubits_(n), amps_(std::move(amps)) {}
  friend StateVector apply_gate(const StateVector&, const UnitaryMatrix&, std::span<const int>);

  int num_qubits_ = 0;
  std::vector<Complex> amps_;
};

/// Probability distribution over n-bit strings, indexed like StateVector.
struct Distribution {
  int num_bits = 0;
  std::vector<double> p;

  double operator[](std::string_view bits) const { return p[index_of(bits)]; }
  double at(std::uint64_t index) const { return p.at(index); }
  double total() const;
};

double tv_distance(const Distribution& a, const Distribution& b);

StateVector init_state(int num_qubits);

// Applies `gate` to `targets`; targets[0] is the most significant qubit of
// the gate's local index.
StateVector apply_gate(const StateVector& state, const UnitaryMatrix& gate,
                       std::span<const int> targets);

Distribution probabilities(const StateVector& state);

bool equal_up_to_global_phase(const UnitaryMatrix& a, const UnitaryMatrix& b, double tol);

namespace detail {
// In-place kernel shared by the simulators. No argument validation.
void apply_matrix_inplace(std::vector<Complex>& amps, int num_qubits,
                          const Eigen::MatrixXcd& gate, std::span<const int> targets);
void validate_targets(int num_qubits, int gate_dim, std::span<const int> targets);
}  // namespace detail

}  // namespace qfound
