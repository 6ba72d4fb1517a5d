#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfound/circuit.hpp"

namespace qfound {

class ExperimentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Beamsplitter angles θ1..θN of the multi-stage bomb.
struct AngleVector {
  std::vector<double> thetas;

  int size() const { return static_cast<int>(thetas.size()); }
  double sum() const;
  // Throws ExperimentError unless N >= 2 and the angles sum to π within 1e-9.
  void validate() const;

  static AngleVector equal(int n);
  // θN = θ, remaining N-1 angles (π-θ)/(N-1).
  static AngleVector sweep_point(int n, double theta);
};

enum class ExperimentKind { kEraser, kBomb, kGeneralBomb, kHardy };

std::string_view kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(std::string_view name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kEraser;
  bool flag = true;  // erase for the eraser, bomb present for the bomb
  AngleVector angles;
  double theta0 = 0.0;
  double theta1 = 0.0;

  void validate() const;
  int num_qubits() const;
};

Circuit build_eraser(bool erase);
Circuit build_bomb(bool bomb_present);
Circuit build_general_bomb(const AngleVector& angles);
Circuit build_hardy(double theta0, double theta1);
Circuit build(const ExperimentSpec& spec);

// Closed forms.
double eta_equal_bs(int n);
double eta_general(const AngleVector& angles);
double gamma_closed(double theta0, double theta1);
double gamma_equal(double theta);
double gamma_from_alpha_beta(double alpha, double beta);
// Inverts sin(θ/2) = √(αβ)/√(1-αβ), cos(θ/2) = (α-β)/√(1-αβ) for α, β > 0.
std::pair<double, double> alpha_beta_from_theta(double theta);

// Real amplitudes of the Hardy final state, indexed q0-leftmost.
std::array<double, 8> hardy_amplitudes(double theta0, double theta1);

Distribution eraser_theory(bool erase);
Distribution bomb_theory(bool bomb_present);

}  // namespace qfound
