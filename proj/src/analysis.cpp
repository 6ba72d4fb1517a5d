#include "qfound/analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfound/experiments.hpp"

namespace qfound {

namespace {

constexpr double kMinDenominator = 1e-12;

std::string ones_then_zeros(int n) { return "1" + std::string(static_cast<std::size_t>(n - 1), '0'); }

}  // namespace

double eta_from_distribution(const Distribution& dist, EtaLabeling labeling) {
  const int n = dist.num_bits;
  if (n < 2) throw AnalysisError("eta needs at least 2 bits");
  const double zero = dist.p.at(0);
  const double lead = dist[ones_then_zeros(n)];
  const double num = labeling == EtaLabeling::kSingleStage ? lead : zero;
  const double den = 1.0 - (labeling == EtaLabeling::kSingleStage ? zero : lead);
  if (den < kMinDenominator) throw AnalysisError("eta denominator vanishes");
  return num / den;
}

double eta_from_counts(const CountsHistogram& counts, int num_qubits, EtaLabeling labeling) {
  if (counts.shots <= 0) throw AnalysisError("histogram has no shots");
  if (counts.num_bits() != num_qubits)
    throw AnalysisError("histogram has " + std::to_string(counts.num_bits()) + " bits, expected " +
                        std::to_string(num_qubits));
  return eta_from_distribution(counts.to_distribution(), labeling);
}

double gamma_from_distribution(const Distribution& dist) {
  if (dist.num_bits != 3) throw AnalysisError("gamma needs a 3-bit distribution");
  double kept = 0.0;
  for (const char* key : {"000", "010", "100", "110"}) kept += dist[key];
  if (kept < kMinDenominator) throw AnalysisError("all shots rejected by post-selection");
  return dist["000"] / kept;
}

double gamma_from_counts(const CountsHistogram& counts) {
  if (counts.num_bits() != 3) throw AnalysisError("gamma needs 3-bit counts");
  std::int64_t kept = 0;
  for (const auto& [key, n] : counts.counts) {
    if (key[2] == '0') kept += n;
  }
  if (kept == 0) throw AnalysisError("all shots rejected by post-selection");
  return static_cast<double>(counts.count("000")) / static_cast<double>(kept);
}

RunStatistics run_statistics(std::span<const double> values, double reference) {
  if (values.empty()) throw AnalysisError("run_statistics needs at least one value");
  if (reference == 0.0) throw AnalysisError("relative error undefined for reference 0");
  RunStatistics s;
  s.n_runs = static_cast<int>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= s.n_runs;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(ss / s.n_runs);
  s.absolute_error = std::abs(s.mean - reference);
  s.relative_error = s.absolute_error / std::abs(reference);
  return s;
}

GammaMaximum argmax_gamma(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw AnalysisError("step must be positive");
  GammaMaximum best;
  for (long k = 1;; ++k) {
    const double theta = static_cast<double>(k) * step;
    if (theta >= std::numbers::pi - 1e-12) break;
    const double g = gamma_equal(theta);
    if (g > best.gamma) best = {theta, g};
  }
  return best;
}

double binomial_standard_error(double p, std::int64_t shots) {
  if (shots <= 0) throw AnalysisError("shots must be positive");
  if (p < 0.0 || p > 1.0) throw AnalysisError("probability out of range");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

}  // namespace qfound
