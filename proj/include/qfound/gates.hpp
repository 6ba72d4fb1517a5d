#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qfound/state.hpp"

namespace qfound {

enum class GateKind { kH, kX, kRy, kCnot, kCcx, kSwap, kU1, kU2, kU3 };

int arity_of(GateKind kind);
int param_count_of(GateKind kind);
// Lowercase OpenQASM spelling ("h", "cx", "u3", ...).
std::string_view name_of(GateKind kind);
// Accepts the lowercase spelling plus the aliases "cnot", "toffoli", "ry".
GateKind gate_kind_from_name(std::string_view name);

/// A named gate with bound angles (radians).
class GateDef {
 public:
  GateDef(GateKind kind, std::vector<double> params = {});

  GateKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  int arity() const { return arity_of(kind_); }
  std::string_view name() const { return name_of(kind_); }

  bool operator==(const GateDef&) const = default;

 private:
  GateKind kind_;
  std::vector<double> params_;
};

namespace gates {
GateDef h();
GateDef x();
GateDef ry(double theta);
GateDef cnot();
GateDef ccx();
GateDef swap();
GateDef u1(double lambda);
GateDef u2(double phi, double lambda);
GateDef u3(double theta, double phi, double lambda);
}  // namespace gates

// U3(theta, phi, lambda) = [[cos(t/2), -e^{i l} sin(t/2)],
//                           [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]]
// U2(phi, lambda) = U3(pi/2, phi, lambda), U1(lambda) = U3(0, 0, lambda).
UnitaryMatrix matrix_of(const GateDef& gate);

// Block-diagonal embedding with the controls as the most significant qubits.
UnitaryMatrix controlled(const GateDef& base, int num_controls);

}  // namespace qfound
