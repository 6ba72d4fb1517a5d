#pragma once

namespace qfound::tol {

// Algebraic identities: unitarity, normalization, exact matrix relations.
inline constexpr double kAlgebraic = 1e-12;
// End-to-end comparisons of simulated circuits against closed forms.
inline constexpr double kEndToEnd = 1e-9;

}  // namespace qfound::tol
