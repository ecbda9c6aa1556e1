#pragma once

#include "bwg/block_class.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bwg {

enum class Phase { Subcritical, Critical, Supercritical };

std::string to_string(Phase p);

/// 1 / (rho_B B''(rho_B)); 0 when B''(rho_B) = inf or rho_B = inf.
double critical_u(const BlockClassSpec& cls);

struct PhaseSolution {
  double u = 0;
  double u_C = 0;
  double rho_u = 0;
  double y_u = 0;
  Phase phase = Phase::Critical;
  double mean_mu = 0;
};

/// Classes with rho_B = inf report Critical for every u: the offspring law
/// then has mean 1 and finite variance.
PhaseSolution solve_phase(const BlockClassSpec& cls, double u);

/// The two branch formulas for (rho, y), usable at any u where they make
/// sense; solve_phase picks one.
struct BranchValues {
  double rho = 0;
  double y = 0;
};
BranchValues boundary_branch(const BlockClassSpec& cls, double u);
BranchValues interior_branch(const BlockClassSpec& cls, double u);

struct ReproductionLaw {
  std::vector<double> probs;  // j = 0..J
  /// mu(j) (rho_B / y)^j for classes with singular metadata, where it stays
  /// representable after probs underflow; equal to probs otherwise.
  std::vector<double> tilted;
  /// tilted[j] is proportional to [z^j] exp(u B'(base z)); base is rho_B
  /// when tilted differs from probs and y(u) otherwise.
  double base = 0;
  double tail_mass = 0;       // 1 - sum probs, clipped at 0
  double mean = 0;            // sum j probs[j]
  double mean_formula = 0;    // u y B''(y) from the series route
};

/// mu(j) = [y^j] Phi(y) y(u)^j / Phi(y(u)). Throws when eps is given and
/// the tail mass beyond J exceeds it.
ReproductionLaw reproduction_law(const BlockClassSpec& cls, double u, int J, std::optional<double> eps = std::nullopt);

/// u y B''(y) with B'' summed from BigFloat coefficients plus the singular
/// tail estimate; independent of the closed form.
double mean_mu_series(const BlockClassSpec& cls, double u, double y);

enum class ConstantVariant { Printed, Derived };

struct AsymptoticConstants {
  Phase regime = Phase::Critical;
  double alpha = 0;
  double r_u = 0;  // subcritical only
  double s_u = 0;
  double s_u_derived = 0;
  double gamma_u = 0;
  double c_u = 0;
  double leading = 0;          // coefficient of n^{-alpha} rho^{-n}
  double leading_derived = 0;  // same, from the re-derived s and constants
  double rho_u = 0;
};

/// Throws unless the class carries singular metadata.
AsymptoticConstants asymptotic_constants(const BlockClassSpec& cls, double u);

/// Supercritical square-root constant s with [x^n]C ~ s/(2 sqrt(pi)) n^{-3/2}
/// rho^{-n}, for any class and u where y(u) is interior. Printed form
/// sqrt(2/(uB'' + u^2 B'^2)); derived form sqrt(2/(u^2 B''^2 + u B''')).
double supercritical_s(const BlockClassSpec& cls, double u, ConstantVariant v);

/// ln of the leading-order prediction for [x^n]C(x, u).
double predicted_log_coefficient(const BlockClassSpec& cls, double u, long n,
                                 ConstantVariant v = ConstantVariant::Printed);
double predicted_coefficient(const BlockClassSpec& cls, double u, long n,
                             ConstantVariant v = ConstantVariant::Printed);

struct RemainderLaw {
  std::vector<double> probs;  // r = 0..rmax
  double tail_mass = 0;
};

/// P(R = r) = [z^r] exp(uB'(rho_B z) - uB'(rho_B)). Throws when eps is given
/// and the mass beyond rmax exceeds it.
RemainderLaw gibbs_remainder_law(const BlockClassSpec& cls, double u, int rmax,
                                 std::optional<double> eps = std::nullopt);

}  // namespace bwg
