#pragma once

#include "bwg/numeric.hpp"
#include "bwg/singular.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace bwg {

class DomainMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Truncated power series F(y) = sum_{n <= N} f_n y^n. Entry n holds the
/// ordinary coefficient [y^n]F; EGF counts are n! times that.
template <class T>
class Series {
 public:
  using value_type = T;

  Series(Domain domain, std::vector<T> coeffs);

  static Series zero(const Domain& domain, int order);
  static Series constant(const Domain& domain, int order, T c);
  /// The series y (or 0 when order is 0).
  static Series variable(const Domain& domain, int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Domain& domain() const { return domain_; }
  const T& operator[](int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }
  const std::vector<T>& coefficients() const { return coeffs_; }

  /// Explicit re-truncation to a lower order.
  Series truncated(int order) const;

 private:
  Domain domain_;
  std::vector<T> coeffs_;
};

/// Engages the MPFR working precision when the domain is BigFloat.
class DomainScope {
 public:
  explicit DomainScope(const Domain& d) {
    if (d.kind == DomainKind::BigFloat) scope_.emplace(d.precision_bits);
  }

 private:
  std::optional<PrecisionScope> scope_;
};

template <class T> Series<T> series_add(const Series<T>& a, const Series<T>& b);
template <class T> Series<T> series_sub(const Series<T>& a, const Series<T>& b);
template <class T> Series<T> series_mul(const Series<T>& a, const Series<T>& b);
template <class T> Series<T> series_scale(const Series<T>& a, const T& c);
template <class T> Series<T> series_derive(const Series<T>& f);

/// exp(g) through F' = g'F. Requires [y^0]g = 0.
template <class T> Series<T> series_exp(const Series<T>& g);

/// Formal logarithm, inverse of series_exp. Requires [y^0]f = 1.
template <class T> Series<T> series_log(const Series<T>& f);

/// outer(inner) mod y^{N+1} by Horner's rule. Requires [y^0]inner = 0.
template <class T> Series<T> series_compose(const Series<T>& outer, const Series<T>& inner);

/// Solves T = x phi(T) mod x^{order+1}. Requires [y^0]phi != 0 and phi of
/// order at least order - 1.
template <class T> Series<T> lagrange_solve(const Series<T>& phi, int order);

/// n! [y^n] F for every n.
template <class T> std::vector<T> egf_counts(const Series<T>& f);

template <class T>
struct TailEstimate {
  T value;
  T error;
};

/// Sum of the truncated series at y0 plus, when singular metadata is given,
/// the first-order transfer tail of the omitted coefficients. The series is
/// taken to be the derivative_order-th derivative of B' (0 for B', 1 for B'').
template <class T>
TailEstimate<T> eval_with_tail(const Series<T>& f, const T& y0, const SingularMetadata* metadata,
                               int derivative_order = 0);

extern template class Series<Rational>;
extern template class Series<PolyU>;
extern template class Series<BigFloat>;
extern template class Series<double>;

}  // namespace bwg
