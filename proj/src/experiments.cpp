#include "qfound/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace qfound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleSumTol = 1e-9;
constexpr double kRangeSlack = 1e-12;

double check_hardy_angle(double theta, const char* name) {
  if (!std::isfinite(theta) || theta < -kRangeSlack || theta > kPi + kRangeSlack)
    throw ExperimentError(std::string(name) + " must lie in [0, pi], got " + std::to_string(theta));
  return std::clamp(theta, 0.0, kPi);
}

}  // namespace

double AngleVector::sum() const {
  double s = 0.0;
  for (double t : thetas) s += t;
  return s;
}

void AngleVector::validate() const {
  if (size() < 2) throw ExperimentError("general bomb needs at least 2 angles");
  if (size() > kMaxQubits) throw ExperimentError("too many angles");
  for (double t : thetas) {
    if (!std::isfinite(t)) throw ExperimentError("angles must be finite");
  }
  if (std::abs(sum() - kPi) > kAngleSumTol)
    throw ExperimentError("angles must sum to pi, got " + std::to_string(sum()));
}

AngleVector AngleVector::equal(int n) {
  if (n < 2) throw ExperimentError("general bomb needs at least 2 angles");
  return AngleVector{std::vector<double>(static_cast<std::size_t>(n), kPi / n)};
}

AngleVector AngleVector::sweep_point(int n, double theta) {
  if (n < 2) throw ExperimentError("general bomb needs at least 2 angles");
  AngleVector a{std::vector<double>(static_cast<std::size_t>(n), (kPi - theta) / (n - 1))};
  a.thetas.back() = theta;
  return a;
}

std::string_view kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kEraser: return "eraser";
    case ExperimentKind::kBomb: return "bomb";
    case ExperimentKind::kGeneralBomb: return "general_bomb";
    case ExperimentKind::kHardy: return "hardy";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "eraser") return ExperimentKind::kEraser;
  if (s == "bomb") return ExperimentKind::kBomb;
  if (s == "general_bomb") return ExperimentKind::kGeneralBomb;
  if (s == "hardy") return ExperimentKind::kHardy;
  throw ExperimentError("unknown experiment '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  switch (kind) {
    case ExperimentKind::kEraser:
    case ExperimentKind::kBomb:
      break;
    case ExperimentKind::kGeneralBomb:
      angles.validate();
      break;
    case ExperimentKind::kHardy:
      check_hardy_angle(theta0, "theta0");
      check_hardy_angle(theta1, "theta1");
      break;
  }
}

int ExperimentSpec::num_qubits() const {
  switch (kind) {
    case ExperimentKind::kEraser:
    case ExperimentKind::kBomb:
      return 2;
    case ExperimentKind::kGeneralBomb:
      return angles.size();
    case ExperimentKind::kHardy:
      return 3;
  }
  return 0;
}

Circuit build_eraser(bool erase) {
  Circuit c(2, 2, erase ? "eraser_erase" : "eraser");
  c.h(0).cx(0, 1);
  if (erase) c.h(1);
  c.h(0);
  c.measure_all();
  return c;
}

Circuit build_bomb(bool bomb_present) {
  Circuit c(2, 2, bomb_present ? "bomb" : "bomb_absent");
  c.h(0);
  if (bomb_present) c.cx(0, 1);
  c.h(0);
  c.measure_all();
  return c;
}

Circuit build_general_bomb(const AngleVector& angles) {
  angles.validate();
  const int n = angles.size();
  Circuit c(n, n, "general_bomb_" + std::to_string(n));
  c.ry(angles.thetas[0], 0);
  for (int i = 1; i < n; ++i) {
    c.cx(0, i);
    c.ry(angles.thetas[static_cast<std::size_t>(i)], 0);
  }
  c.measure_all();
  return c;
}

Circuit build_hardy(double theta0, double theta1) {
  theta0 = check_hardy_angle(theta0, "theta0");
  theta1 = check_hardy_angle(theta1, "theta1");
  Circuit c(3, 3, "hardy");
  c.ry(theta0, 0).ry(theta1, 1).ccx(0, 1, 2).ry(kPi - theta0, 0).ry(kPi - theta1, 1);
  c.measure_all();
  return c;
}

Circuit build(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kEraser: return build_eraser(spec.flag);
    case ExperimentKind::kBomb: return build_bomb(spec.flag);
    case ExperimentKind::kGeneralBomb: return build_general_bomb(spec.angles);
    case ExperimentKind::kHardy: return build_hardy(spec.theta0, spec.theta1);
  }
  throw ExperimentError("unknown experiment kind");
}

double eta_equal_bs(int n) {
  if (n < 2) throw ExperimentError("eta_equal_bs needs N >= 2");
  const double c2 = std::pow(std::cos(kPi / (2.0 * n)), 2);
  const double s2 = std::pow(std::sin(kPi / (2.0 * n)), 2);
  return std::pow(c2, n) / (1.0 - s2 * std::pow(c2, n - 1));
}

double eta_general(const AngleVector& angles) {
  angles.validate();
  double head = 1.0;
  for (std::size_t i = 0; i + 1 < angles.thetas.size(); ++i) head *= std::pow(std::cos(angles.thetas[i] / 2.0), 2);
  const double last = angles.thetas.back() / 2.0;
  return head * std::pow(std::cos(last), 2) / (1.0 - std::pow(std::sin(last), 2) * head);
}

double gamma_closed(double theta0, double theta1) {
  const double num = std::pow(std::sin(theta1) * std::sin(theta0), 2);
  const double den = 4.0 * (2.0 * std::cos(theta1) * std::pow(std::sin(theta0 / 2.0), 2) + std::cos(theta0) + 3.0);
  if (num == 0.0 || den <= 0.0) return 0.0;
  return num / den;
}

double gamma_equal(double theta) {
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  return 2.0 * std::pow(s, 4) * c * c / (3.0 - std::cos(theta));
}

double gamma_from_alpha_beta(double alpha, double beta) {
  const double ab = std::abs(alpha * beta);
  if (!(ab < 1.0)) throw ExperimentError("|alpha*beta| must be below 1");
  const double v = ab * (std::abs(alpha) - std::abs(beta)) / (1.0 - ab);
  return v * v;
}

std::pair<double, double> alpha_beta_from_theta(double theta) {
  if (!(theta > 0.0 && theta < kPi)) throw ExperimentError("theta must lie in (0, pi)");
  const double s = std::pow(std::sin(theta / 2.0), 2);
  const double product = s / (1.0 + s);
  const double diff = std::cos(theta / 2.0) * std::sqrt(1.0 - product);
  const double alpha = (diff + std::sqrt(diff * diff + 4.0 * product)) / 2.0;
  return {alpha, product / alpha};
}

std::array<double, 8> hardy_amplitudes(double theta0, double theta1) {
  const double s0 = std::sin(theta0), s1 = std::sin(theta1);
  const double h0 = std::pow(std::sin(theta0 / 2.0), 2);
  const double h1 = std::pow(std::sin(theta1 / 2.0), 2);
  std::array<double, 8> a{};
  a[index_of("000")] = -0.25 * s1 * s0;
  a[index_of("100")] = 0.5 * s1 * h0;
  a[index_of("010")] = 0.5 * h1 * s0;
  a[index_of("110")] = 0.25 * (2.0 * std::cos(theta1) * h0 + std::cos(theta0) + 3.0);
  a[index_of("001")] = 0.25 * s1 * s0;
  a[index_of("101")] = -0.5 * h0 * s1;
  a[index_of("011")] = -0.5 * h1 * s0;
  a[index_of("111")] = h1 * h0;
  return a;
}

Distribution eraser_theory(bool erase) {
  if (erase) return Distribution{2, {0.5, 0.0, 0.0, 0.5}};
  return Distribution{2, {0.25, 0.25, 0.25, 0.25}};
}

Distribution bomb_theory(bool bomb_present) {
  if (bomb_present) return Distribution{2, {0.25, 0.25, 0.25, 0.25}};
  return Distribution{2, {1.0, 0.0, 0.0, 0.0}};
}

}  // namespace qfound
