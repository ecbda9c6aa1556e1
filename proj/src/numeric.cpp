#include "bwg/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bwg {

Domain Domain::bigfloat(unsigned bits) {
  if (bits < 53) throw std::invalid_argument("BigFloat precision must be at least 53 bits");
  return {DomainKind::BigFloat, bits};
}

std::string Domain::name() const {
  switch (kind) {
    case DomainKind::ExactRational: return "rational";
    case DomainKind::ExactRationalPolyU: return "polyu";
    case DomainKind::BigFloat: return "bigfloat(" + std::to_string(precision_bits) + ")";
    case DomainKind::Float64: return "float64";
  }
  return "?";
}

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

PrecisionScope::PrecisionScope(unsigned precision_bits)
    : saved_digits10_(BigFloat::default_precision()) {
  BigFloat::default_precision(bits_to_digits10(precision_bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(saved_digits10_); }

BigFloat ScalarTraits<BigFloat>::from_rational(const Rational& q, const Domain& d) {
  PrecisionScope scope(d.precision_bits);
  BigFloat num(boost::multiprecision::numerator(q));
  BigFloat den(boost::multiprecision::denominator(q));
  return num / den;
}

// ---------------------------------------------------------------------------
// PolyU

PolyU::PolyU(long c) : PolyU(Rational(c)) {}

PolyU::PolyU(Rational c) {
  if (c != 0) coeffs_.push_back(std::move(c));
}

PolyU::PolyU(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

PolyU PolyU::monomial(int degree, Rational c) {
  if (degree < 0) throw std::invalid_argument("negative degree");
  std::vector<Rational> v(static_cast<std::size_t>(degree) + 1);
  v.back() = std::move(c);
  return PolyU(std::move(v));
}

void PolyU::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational PolyU::coefficient(int k) const {
  if (k < 0 || k > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(k)];
}

Rational PolyU::evaluate(const Rational& u) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double PolyU::evaluate(double u) const {
  double acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + it->convert_to<double>();
  return acc;
}

std::string PolyU::to_string(const std::string& var) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const Rational& c = coeffs_[k];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    bool unit = (mag == 1);
    if (k == 0 || !unit) os << bwg::to_string(mag);
    if (k > 0) {
      if (!unit) os << "*";
      os << var;
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

PolyU& PolyU::operator+=(const PolyU& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

PolyU& PolyU::operator-=(const PolyU& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim();
  return *this;
}

PolyU operator*(const PolyU& a, const PolyU& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return PolyU(std::move(out));
}

PolyU& PolyU::operator*=(const PolyU& o) { return *this = *this * o; }

PolyU& PolyU::operator/=(long d) {
  if (d == 0) throw std::domain_error("division by zero");
  for (auto& c : coeffs_) c /= d;
  return *this;
}

PolyU operator-(PolyU a) {
  for (auto& c : a.coeffs_) c = -c;
  return a;
}

// ---------------------------------------------------------------------------

std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return q.str();
}

std::string to_string(const PolyU& p) { return p.to_string(); }

std::string to_string(const BigFloat& x, int digits) {
  return x.str(digits, std::ios_base::scientific);
}

std::string to_string(double x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

Integer factorial(unsigned n) {
  Integer f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

}  // namespace bwg
