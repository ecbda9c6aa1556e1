#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace bwg {

/// Gamma(-3/2) = 4 sqrt(pi) / 3.
inline constexpr double kGammaMinusThreeHalves = 4.0 * 1.7724538509055160273 / 3.0;

/// Dominant-singularity data of B' for a 3/2-singular block class:
///   B'(y) = B'(rho) - B''(rho)(rho - y) + c_B (rho - y)^{3/2} + O((rho - y)^2).
struct SingularMetadata {
  double rho_B = 0;
  double Bp_at_rho = 0;
  double Bpp_at_rho = 0;  // may be +inf
  double c_B = 0;
  double singular_exponent = 1.5;

  /// Constant K in [y^n]B'(y) ~ K rho^{-n} n^{-5/2}.
  double transfer_constant() const {
    return c_B * std::pow(rho_B, 1.5) / kGammaMinusThreeHalves;
  }
};

/// sum_{m > M} m^{-beta} q^m for 0 < q <= 1 (beta > 1 when q = 1).
double power_tail_sum(long M, double beta, double q);

}  // namespace bwg
