#include "bwg/phase.hpp"

#include "bwg/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bwg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCriticalBand = 1e-12;

double rho_of(const BlockClassSpec& cls) { return cls.metadata ? cls.metadata->rho_B : cls.rho_B; }

double bp_at_rho(const BlockClassSpec& cls) {
  if (cls.metadata) return cls.metadata->Bp_at_rho;
  if (cls.closed_form && cls.closed_form->Bp && std::isfinite(cls.rho_B)) return cls.closed_form->Bp(cls.rho_B);
  throw std::invalid_argument(cls.name + ": B'(rho_B) unavailable");
}

double bpp_at_rho(const BlockClassSpec& cls) {
  if (cls.metadata) return cls.metadata->Bpp_at_rho;
  if (cls.closed_form && cls.closed_form->Bpp && std::isfinite(cls.rho_B)) return cls.closed_form->Bpp(cls.rho_B);
  throw std::invalid_argument(cls.name + ": B''(rho_B) unavailable");
}

void require_positive(double u) {
  if (!(u > 0) || !std::isfinite(u)) throw std::invalid_argument("weight u must be positive and finite");
}

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Subcritical: return "Subcritical";
    case Phase::Critical: return "Critical";
    case Phase::Supercritical: return "Supercritical";
  }
  return "?";
}

double critical_u(const BlockClassSpec& cls) {
  const double rho = rho_of(cls);
  if (!std::isfinite(rho)) return 0;
  const double bpp = bpp_at_rho(cls);
  if (!std::isfinite(bpp)) return 0;
  if (!(rho * bpp > 0)) throw std::domain_error(cls.name + ": rho_B B''(rho_B) = 0 gives an infinite critical weight");
  return 1 / (rho * bpp);
}

BranchValues boundary_branch(const BlockClassSpec& cls, double u) {
  require_positive(u);
  const double rho = rho_of(cls);
  if (!std::isfinite(rho)) throw std::domain_error(cls.name + ": no boundary branch when rho_B is infinite");
  return {rho * std::exp(-u * bp_at_rho(cls)), rho};
}

BranchValues interior_branch(const BlockClassSpec& cls, double u) {
  require_positive(u);
  const double target = 1 / u;
  auto h = [&](double y) { return y * eval_Bpp(cls, y) - target; };
  const double rho = rho_of(cls);
  double lo = 0, hi;
  if (std::isfinite(rho)) {
    const double at_rho = rho * bpp_at_rho(cls);
    if (std::isfinite(at_rho)) {
      if (at_rho < target * (1 - 1e-12)) throw std::domain_error(cls.name + ": no interior solution of y B''(y) = 1/u (u below u_C)");
      hi = rho;
    } else {
      double delta = 1e-3;
      hi = rho * (1 - delta);
      while (h(hi) <= 0) {
        delta /= 16;
        if (delta < 1e-300) throw std::runtime_error(cls.name + ": no bracket for y B''(y) = 1/u");
        hi = rho * (1 - delta);
      }
    }
  } else {
    hi = 1;
    while (h(hi) <= 0) {
      hi *= 2;
      if (hi > 1e300) throw std::runtime_error(cls.name + ": no bracket for y B''(y) = 1/u");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0 ? hi : lo) = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = eval_Bpp(cls, y) + y * eval_Bppp(cls, y);
    if (!(d > 0) || !std::isfinite(d)) break;
    const double next = y - h(y) / d;
    if (!(next > lo && next < hi) && !(next == hi)) break;
    if (next == y) break;
    y = next;
  }
  return {y * std::exp(-u * eval_Bp(cls, y)), y};
}

PhaseSolution solve_phase(const BlockClassSpec& cls, double u) {
  require_positive(u);
  PhaseSolution s;
  s.u = u;
  s.u_C = critical_u(cls);
  BranchValues b;
  if (!std::isfinite(rho_of(cls))) {
    b = interior_branch(cls, u);
    s.phase = Phase::Critical;
  } else if (s.u_C > 0 && u <= s.u_C * (1 + kCriticalBand)) {
    b = boundary_branch(cls, u);
    s.phase = u < s.u_C * (1 - kCriticalBand) ? Phase::Subcritical : Phase::Critical;
  } else {
    b = interior_branch(cls, u);
    s.phase = Phase::Supercritical;
  }
  s.rho_u = b.rho;
  s.y_u = b.y;
  s.mean_mu = u * b.y * (b.y == rho_of(cls) ? bpp_at_rho(cls) : eval_Bpp(cls, b.y));
  return s;
}

double mean_mu_series(const BlockClassSpec& cls, double u, double y) {
  const Domain d = Domain::bigfloat(128);
  DomainScope scope(d);
  auto s = series_derive(bprime_series<BigFloat>(cls, cls.weight_cap, d));
  const SingularMetadata* meta = cls.metadata ? &*cls.metadata : nullptr;
  BigFloat v = eval_with_tail(s, BigFloat(y), meta, 1).value;
  return u * y * v.convert_to<double>();
}

ReproductionLaw reproduction_law(const BlockClassSpec& cls, double u, int J, std::optional<double> eps) {
  if (J < 0) throw std::invalid_argument("support cap must be nonnegative");
  const PhaseSolution sol = solve_phase(cls, u);
  const double y = sol.y_u;
  if (!cls.has_coefficient(J)) throw std::invalid_argument(cls.name + ": coefficients unavailable up to the support cap");
  // For 3/2-singular classes expand at rho_B and tilt afterwards: the
  // untilted coefficients decay polynomially and keep relative accuracy.
  const double rho = rho_of(cls);
  const double base = cls.metadata && std::isfinite(cls.metadata->Bp_at_rho) ? rho : y;
  std::vector<double> g(static_cast<std::size_t>(J) + 1, 0.0);
  const double lb = std::log(base);
  for (int k = 1; k <= J; ++k) {
    const double c = cls.coefficient_double(k);
    if (c != 0) g[k] = u * c * std::exp(k * lb);
  }
  auto f = exp_series(g);
  const double bp = y == rho ? bp_at_rho(cls) : eval_Bp(cls, y);
  const double scale = std::exp(-u * bp);
  const double tilt = std::log(y / base);
  ReproductionLaw law;
  law.base = base;
  law.probs.resize(f.size());
  law.tilted.resize(f.size());
  double total = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    law.tilted[j] = std::max(0.0, f[j] * scale);
    law.probs[j] = law.tilted[j] * std::exp(static_cast<double>(j) * tilt);
    total += law.probs[j];
    law.mean += static_cast<double>(j) * law.probs[j];
  }
  law.tail_mass = std::max(0.0, 1 - total);
  if (eps && law.tail_mass > *eps)
    throw std::runtime_error(cls.name + ": reproduction-law tail mass " + std::to_string(law.tail_mass) +
                             " exceeds the requested bound at cap " + std::to_string(J));
  law.mean_formula = mean_mu_series(cls, u, y);
  return law;
}

double supercritical_s(const BlockClassSpec& cls, double u, ConstantVariant v) {
  const double y = interior_branch(cls, u).y;
  const double bp = eval_Bp(cls, y), bpp = eval_Bpp(cls, y);
  if (v == ConstantVariant::Printed) return std::sqrt(2 / (u * bpp + u * u * bp * bp));
  return std::sqrt(2 / (u * u * bpp * bpp + u * eval_Bppp(cls, y)));
}

AsymptoticConstants asymptotic_constants(const BlockClassSpec& cls, double u) {
  if (!cls.metadata) throw std::invalid_argument(cls.name + ": asymptotic constants need singular metadata");
  const SingularMetadata& m = *cls.metadata;
  const PhaseSolution sol = solve_phase(cls, u);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  AsymptoticConstants a;
  a.regime = sol.phase;
  a.rho_u = sol.rho_u;
  a.gamma_u = m.transfer_constant() * u * std::exp(u * m.Bp_at_rho);
  a.c_u = a.gamma_u * std::exp(-u * (sol.y_u == m.rho_B ? m.Bp_at_rho : eval_Bp(cls, sol.y_u)));
  switch (sol.phase) {
    case Phase::Subcritical: {
      const double gap = 1 - u / sol.u_C;
      a.alpha = 2.5;
      a.r_u = m.rho_B / gap;
      a.s_u = u * m.c_B * std::pow(m.rho_B, 2.5) * std::pow(gap, -2.5);
      a.s_u_derived = a.s_u;
      a.leading = 3 * a.s_u / (4 * sqrt_pi);
      a.leading_derived = a.leading;
      break;
    }
    case Phase::Critical: {
      a.alpha = 5.0 / 3.0;
      a.s_u = std::pow(sol.u_C * m.c_B, -2.0 / 3.0);
      a.s_u_derived = a.s_u;
      a.leading = a.s_u * std::tgamma(2.0 / 3.0) / std::sqrt(3 * std::numbers::pi);
      a.leading_derived = -a.s_u / std::tgamma(-2.0 / 3.0);
      break;
    }
    case Phase::Supercritical: {
      a.alpha = 1.5;
      a.s_u = supercritical_s(cls, u, ConstantVariant::Printed);
      a.s_u_derived = supercritical_s(cls, u, ConstantVariant::Derived);
      a.leading = a.s_u / (2 * sqrt_pi);
      a.leading_derived = a.s_u_derived / (2 * sqrt_pi);
      break;
    }
  }
  return a;
}

double predicted_log_coefficient(const BlockClassSpec& cls, double u, long n, ConstantVariant v) {
  if (n < 1) throw std::invalid_argument("coefficient index must be positive");
  double leading, alpha, rho;
  if (cls.metadata) {
    auto a = asymptotic_constants(cls, u);
    leading = v == ConstantVariant::Printed ? a.leading : a.leading_derived;
    alpha = a.alpha;
    rho = a.rho_u;
  } else {
    const auto b = interior_branch(cls, u);
    leading = supercritical_s(cls, u, v) / (2 * std::sqrt(std::numbers::pi));
    alpha = 1.5;
    rho = b.rho;
  }
  const double ln = static_cast<double>(n);
  return std::log(leading) - alpha * std::log(ln) - ln * std::log(rho);
}

double predicted_coefficient(const BlockClassSpec& cls, double u, long n, ConstantVariant v) {
  return std::exp(predicted_log_coefficient(cls, u, n, v));
}

RemainderLaw gibbs_remainder_law(const BlockClassSpec& cls, double u, int rmax, std::optional<double> eps) {
  require_positive(u);
  if (rmax < 0) throw std::invalid_argument("cap must be nonnegative");
  const double rho = rho_of(cls);
  if (!std::isfinite(rho)) throw std::invalid_argument(cls.name + ": remainder law needs a finite rho_B");
  const double bp = bp_at_rho(cls);
  if (!std::isfinite(bp)) throw std::invalid_argument(cls.name + ": remainder law needs a finite B'(rho_B)");
  if (!cls.has_coefficient(rmax)) throw std::invalid_argument(cls.name + ": coefficients unavailable up to the cap");
  std::vector<double> g(static_cast<std::size_t>(rmax) + 1, 0.0);
  for (int k = 1; k <= rmax; ++k) g[k] = u * cls.coefficient_double(k) * std::pow(rho, k);
  auto f = exp_series(g);
  RemainderLaw r;
  r.probs.resize(f.size());
  const double scale = std::exp(-u * bp);
  double total = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    r.probs[i] = std::max(0.0, f[i] * scale);
    total += r.probs[i];
  }
  r.tail_mass = std::max(0.0, 1 - total);
  if (eps && r.tail_mass > *eps)
    throw std::runtime_error(cls.name + ": remainder tail mass exceeds the requested bound");
  return r;
}

}  // namespace bwg
