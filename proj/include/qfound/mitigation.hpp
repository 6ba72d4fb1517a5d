#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qfound/circuit.hpp"
#include "qfound/device.hpp"

namespace qfound {

/// Entry (i, j) = P(measure bitstring i | prepared bitstring j). Columns
/// sum to one.
class ConfusionMatrix {
 public:
  ConfusionMatrix(int num_qubits, Eigen::MatrixXd entries);

  int num_qubits() const { return n_; }
  const Eigen::MatrixXd& entries() const { return m_; }
  double operator()(int measured, int prepared) const { return m_(measured, prepared); }
  double condition_number() const;

  Distribution apply(const Distribution& truth) const;

 private:
  int n_;
  Eigen::MatrixXd m_;
};

class IllConditionedError : public std::runtime_error {
 public:
  explicit IllConditionedError(double cond);
  double condition_number() const { return cond_; }

 private:
  double cond_;
};

inline constexpr int kMaxMitigationQubits = 5;
inline constexpr double kMaxConditionNumber = 1e8;

// Empirical calibration: prepares each basis state with X gates and samples
// it `shots` times under the device's readout noise (gate noise excluded).
ConfusionMatrix build_confusion_matrix(const DeviceModel& device, int num_qubits, std::int64_t shots,
                                       std::uint64_t seed);

// Infinite-shot limit for independent per-qubit flips: M_q0 (x) M_q1 (x) ...
ConfusionMatrix exact_confusion_matrix(const std::vector<ReadoutError>& per_qubit);

// argmin ||M x - p||_2 subject to x >= 0 and sum(x) = 1.
Distribution mitigate(const Distribution& measured, const ConfusionMatrix& m);
Distribution mitigate(const CountsHistogram& counts, const ConfusionMatrix& m);

std::string to_json(const ConfusionMatrix& m);
ConfusionMatrix confusion_from_json(std::string_view text);

}  // namespace qfound
