#include "qfound/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfound {

namespace {

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  int params;
};

constexpr GateInfo kGateTable[] = {
    {GateKind::kH, "h", 1, 0},      {GateKind::kX, "x", 1, 0},       {GateKind::kRy, "ry", 1, 1},
    {GateKind::kCnot, "cx", 2, 0},  {GateKind::kCcx, "ccx", 3, 0},   {GateKind::kSwap, "swap", 2, 0},
    {GateKind::kU1, "u1", 1, 1},    {GateKind::kU2, "u2", 1, 2},     {GateKind::kU3, "u3", 1, 3},
};

const GateInfo& info(GateKind kind) {
  for (const auto& g : kGateTable) {
    if (g.kind == kind) return g;
  }
  throw std::invalid_argument("unknown gate kind");
}

Eigen::MatrixXcd u3_matrix(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = c;
  m(0, 1) = -std::polar(1.0, lambda) * s;
  m(1, 0) = std::polar(1.0, phi) * s;
  m(1, 1) = std::polar(1.0, phi + lambda) * c;
  return m;
}

}  // namespace

int arity_of(GateKind kind) { return info(kind).arity; }
int param_count_of(GateKind kind) { return info(kind).params; }
std::string_view name_of(GateKind kind) { return info(kind).name; }

GateKind gate_kind_from_name(std::string_view name) {
  for (const auto& g : kGateTable) {
    if (g.name == name) return g.kind;
  }
  if (name == "cnot") return GateKind::kCnot;
  if (name == "toffoli") return GateKind::kCcx;
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

GateDef::GateDef(GateKind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {
  if (static_cast<int>(params_.size()) != param_count_of(kind_)) {
    throw std::invalid_argument("gate '" + std::string(name_of(kind_)) + "' expects " +
                                std::to_string(param_count_of(kind_)) + " parameter(s), got " +
                                std::to_string(params_.size()));
  }
  for (double p : params_) {
    if (!std::isfinite(p)) throw std::invalid_argument("gate parameter is not finite");
  }
}

namespace gates {
GateDef h() { return GateDef(GateKind::kH); }
GateDef x() { return GateDef(GateKind::kX); }
GateDef ry(double theta) { return GateDef(GateKind::kRy, {theta}); }
GateDef cnot() { return GateDef(GateKind::kCnot); }
GateDef ccx() { return GateDef(GateKind::kCcx); }
GateDef swap() { return GateDef(GateKind::kSwap); }
GateDef u1(double lambda) { return GateDef(GateKind::kU1, {lambda}); }
GateDef u2(double phi, double lambda) { return GateDef(GateKind::kU2, {phi, lambda}); }
GateDef u3(double theta, double phi, double lambda) { return GateDef(GateKind::kU3, {theta, phi, lambda}); }
}  // namespace gates

UnitaryMatrix matrix_of(const GateDef& gate) {
  const auto& p = gate.params();
  switch (gate.kind()) {
    case GateKind::kH: {
      Eigen::MatrixXcd m(2, 2);
      const double r = 1.0 / std::numbers::sqrt2;
      m << r, r, r, -r;
      return UnitaryMatrix(m);
    }
    case GateKind::kX: {
      Eigen::MatrixXcd m(2, 2);
      m << 0, 1, 1, 0;
      return UnitaryMatrix(m);
    }
    case GateKind::kRy: {
      const double c = std::cos(p[0] / 2.0);
      const double s = std::sin(p[0] / 2.0);
      Eigen::MatrixXcd m(2, 2);
      m << c, -s, s, c;
      return UnitaryMatrix(m);
    }
    case GateKind::kCnot:
      return controlled(gates::x(), 1);
    case GateKind::kCcx:
      return controlled(gates::x(), 2);
    case GateKind::kSwap: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
      return UnitaryMatrix(m);
    }
    case GateKind::kU1:
      return UnitaryMatrix(u3_matrix(0.0, 0.0, p[0]));
    case GateKind::kU2:
      return UnitaryMatrix(u3_matrix(std::numbers::pi / 2.0, p[0], p[1]));
    case GateKind::kU3:
      return UnitaryMatrix(u3_matrix(p[0], p[1], p[2]));
  }
  throw std::invalid_argument("unknown gate kind");
}

UnitaryMatrix controlled(const GateDef& base, int num_controls) {
  if (base.arity() != 1) throw std::invalid_argument("controlled() requires a single-qubit base gate");
  if (num_controls < 1 || num_controls > 2) throw std::invalid_argument("num_controls must be 1 or 2");
  const int dim = 2 << num_controls;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  m.bottomRightCorner(2, 2) = matrix_of(base).matrix();
  return UnitaryMatrix(m);
}

}  // namespace qfound
