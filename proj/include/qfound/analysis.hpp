#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "qfound/circuit.hpp"

namespace qfound {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Which bitstring counts as the interaction-free detection.
//   kSingleStage: η = P(10…0) / (1 − P(0…0))   (Hadamard interferometer)
//   kMultiStage:  η = P(0…0) / (1 − P(10…0))   (Ry chain)
enum class EtaLabeling { kSingleStage, kMultiStage };

double eta_from_distribution(const Distribution& dist, EtaLabeling labeling);
double eta_from_counts(const CountsHistogram& counts, int num_qubits, EtaLabeling labeling);

// Drops outcomes with q2 = 1, renormalizes, returns P(000).
double gamma_from_distribution(const Distribution& dist);
double gamma_from_counts(const CountsHistogram& counts);

struct RunStatistics {
  double mean = 0.0;
  double std_dev = 0.0;  // population estimator
  double absolute_error = 0.0;
  double relative_error = 0.0;
  int n_runs = 0;
};

RunStatistics run_statistics(std::span<const double> values, double reference);

struct GammaMaximum {
  double theta = 0.0;
  double gamma = 0.0;
};

// Scans γ(θ) for θ0 = θ1 = θ on the grid k·step inside (0, π).
GammaMaximum argmax_gamma(double step);

// Per-outcome √(p(1−p)/shots).
double binomial_standard_error(double p, std::int64_t shots);

}  // namespace qfound
