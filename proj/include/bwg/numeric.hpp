#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bwg {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

enum class DomainKind { ExactRational, ExactRationalPolyU, BigFloat, Float64 };

/// Numeric domain a series lives in. Precision only matters for BigFloat.
struct Domain {
  DomainKind kind = DomainKind::ExactRational;
  unsigned precision_bits = 0;

  static Domain rational() { return {DomainKind::ExactRational, 0}; }
  static Domain poly_u() { return {DomainKind::ExactRationalPolyU, 0}; }
  static Domain bigfloat(unsigned bits = 192);
  static Domain float64() { return {DomainKind::Float64, 53}; }

  std::string name() const;
  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Sets the process-wide MPFR working precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned precision_bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

unsigned bits_to_digits10(unsigned bits);

/// Polynomial in the block weight u with exact rational coefficients.
class PolyU {
 public:
  PolyU() = default;
  PolyU(long c);  // NOLINT: constants promote implicitly
  PolyU(Rational c);  // NOLINT
  explicit PolyU(std::vector<Rational> coeffs);

  static PolyU monomial(int degree, Rational c = 1);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Rational coefficient(int k) const;
  const std::vector<Rational>& coefficients() const { return coeffs_; }

  Rational evaluate(const Rational& u) const;
  double evaluate(double u) const;
  std::string to_string(const std::string& var = "u") const;

  PolyU& operator+=(const PolyU& o);
  PolyU& operator-=(const PolyU& o);
  PolyU& operator*=(const PolyU& o);
  PolyU& operator/=(long d);

  friend PolyU operator+(PolyU a, const PolyU& b) { return a += b; }
  friend PolyU operator-(PolyU a, const PolyU& b) { return a -= b; }
  friend PolyU operator*(const PolyU& a, const PolyU& b);
  friend PolyU operator/(PolyU a, long d) { return a /= d; }
  friend PolyU operator-(PolyU a);
  friend bool operator==(const PolyU&, const PolyU&) = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

std::string to_string(const Rational& q);
std::string to_string(const PolyU& p);
std::string to_string(const BigFloat& x, int digits = 30);
std::string to_string(double x, int digits = 17);

Integer factorial(unsigned n);
Integer binomial(unsigned n, unsigned k);

/// Scalar construction for each supported domain.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr DomainKind kind = DomainKind::ExactRational;
  static Rational from_rational(const Rational& q, const Domain&) { return q; }
};

template <>
struct ScalarTraits<PolyU> {
  static constexpr DomainKind kind = DomainKind::ExactRationalPolyU;
  static PolyU from_rational(const Rational& q, const Domain&) { return PolyU(q); }
};

template <>
struct ScalarTraits<BigFloat> {
  static constexpr DomainKind kind = DomainKind::BigFloat;
  static BigFloat from_rational(const Rational& q, const Domain& d);
};

template <>
struct ScalarTraits<double> {
  static constexpr DomainKind kind = DomainKind::Float64;
  static double from_rational(const Rational& q, const Domain&) { return q.convert_to<double>(); }
};

}  // namespace bwg
