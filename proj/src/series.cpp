#include "bwg/series.hpp"

#include <algorithm>
#include <cmath>

namespace bwg {

namespace {

bool is_zero(const Rational& x) { return x == 0; }
bool is_zero(const PolyU& x) { return x.is_zero(); }
bool is_zero(const BigFloat& x) { return x == 0; }
bool is_zero(double x) { return x == 0.0; }

bool is_one(const Rational& x) { return x == 1; }
bool is_one(const PolyU& x) { return x == PolyU(1); }
bool is_one(const BigFloat& x) { return x == 1; }
bool is_one(double x) { return x == 1.0; }

template <class T>
T make(const Domain& d, long v) {
  return ScalarTraits<T>::from_rational(Rational(v), d);
}

template <class T>
void require_same_domain(const Series<T>& a, const Series<T>& b) {
  if (!(a.domain() == b.domain()))
    throw DomainMismatch("series domains differ: " + a.domain().name() + " vs " + b.domain().name());
}

}  // namespace

template <class T>
Series<T>::Series(Domain domain, std::vector<T> coeffs) : domain_(domain), coeffs_(std::move(coeffs)) {
  if (domain_.kind != ScalarTraits<T>::kind)
    throw DomainMismatch("scalar type does not match domain " + domain_.name());
  if (coeffs_.empty()) throw std::invalid_argument("series needs at least one coefficient");
}

template <class T>
Series<T> Series<T>::zero(const Domain& domain, int order) {
  if (order < 0) throw std::invalid_argument("negative order");
  DomainScope scope(domain);
  return Series(domain, std::vector<T>(static_cast<std::size_t>(order) + 1, make<T>(domain, 0)));
}

template <class T>
Series<T> Series<T>::constant(const Domain& domain, int order, T c) {
  Series s = zero(domain, order);
  s.coeffs_[0] = std::move(c);
  return s;
}

template <class T>
Series<T> Series<T>::variable(const Domain& domain, int order) {
  Series s = zero(domain, order);
  if (order >= 1) s.coeffs_[1] = make<T>(domain, 1);
  return s;
}

template <class T>
Series<T> Series<T>::truncated(int order) const {
  if (order < 0 || order > this->order()) throw std::invalid_argument("truncation order out of range");
  return Series(domain_, std::vector<T>(coeffs_.begin(), coeffs_.begin() + order + 1));
}

template <class T>
Series<T> series_add(const Series<T>& a, const Series<T>& b) {
  require_same_domain(a, b);
  DomainScope scope(a.domain());
  int n = std::min(a.order(), b.order());
  std::vector<T> out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out[k] = a[k] + b[k];
  return Series<T>(a.domain(), std::move(out));
}

template <class T>
Series<T> series_sub(const Series<T>& a, const Series<T>& b) {
  require_same_domain(a, b);
  DomainScope scope(a.domain());
  int n = std::min(a.order(), b.order());
  std::vector<T> out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out[k] = a[k] - b[k];
  return Series<T>(a.domain(), std::move(out));
}

template <class T>
Series<T> series_mul(const Series<T>& a, const Series<T>& b) {
  require_same_domain(a, b);
  DomainScope scope(a.domain());
  int n = std::min(a.order(), b.order());
  std::vector<T> out(static_cast<std::size_t>(n) + 1, make<T>(a.domain(), 0));
  for (int i = 0; i <= n; ++i) {
    if (is_zero(a[i])) continue;
    for (int j = 0; i + j <= n; ++j) out[i + j] += a[i] * b[j];
  }
  return Series<T>(a.domain(), std::move(out));
}

template <class T>
Series<T> series_scale(const Series<T>& a, const T& c) {
  DomainScope scope(a.domain());
  std::vector<T> out(a.coefficients());
  for (auto& x : out) x = x * c;
  return Series<T>(a.domain(), std::move(out));
}

template <class T>
Series<T> series_derive(const Series<T>& f) {
  if (f.order() < 1) throw std::invalid_argument("cannot differentiate an order-0 series");
  DomainScope scope(f.domain());
  std::vector<T> out(static_cast<std::size_t>(f.order()));
  for (int n = 0; n < f.order(); ++n) out[n] = f[n + 1] * static_cast<long>(n + 1);
  return Series<T>(f.domain(), std::move(out));
}

template <class T>
Series<T> series_exp(const Series<T>& g) {
  if (!is_zero(g[0])) throw std::invalid_argument("series_exp needs a zero constant term");
  DomainScope scope(g.domain());
  const int N = g.order();
  std::vector<T> kg(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) kg[k] = g[k] * static_cast<long>(k);
  std::vector<T> f(static_cast<std::size_t>(N) + 1, make<T>(g.domain(), 0));
  f[0] = make<T>(g.domain(), 1);
  for (int n = 1; n <= N; ++n) {
    T acc = make<T>(g.domain(), 0);
    for (int k = 1; k <= n; ++k) {
      if (is_zero(kg[k])) continue;
      acc += kg[k] * f[n - k];
    }
    f[n] = acc / static_cast<long>(n);
  }
  return Series<T>(g.domain(), std::move(f));
}

template <class T>
Series<T> series_log(const Series<T>& f) {
  if (!is_one(f[0])) throw std::invalid_argument("series_log needs constant term 1");
  DomainScope scope(f.domain());
  const int N = f.order();
  std::vector<T> g(static_cast<std::size_t>(N) + 1, make<T>(f.domain(), 0));
  // n g_n = n f_n - sum_{k=1}^{n-1} k g_k f_{n-k}
  for (int n = 1; n <= N; ++n) {
    T acc = f[n] * static_cast<long>(n);
    for (int k = 1; k < n; ++k) acc -= g[k] * static_cast<long>(k) * f[n - k];
    g[n] = acc / static_cast<long>(n);
  }
  return Series<T>(f.domain(), std::move(g));
}

template <class T>
Series<T> series_compose(const Series<T>& outer, const Series<T>& inner) {
  require_same_domain(outer, inner);
  if (!is_zero(inner[0])) throw std::invalid_argument("series_compose needs inner constant term 0");
  DomainScope scope(outer.domain());
  const int N = std::min(outer.order(), inner.order());
  Series<T> in = inner.truncated(N);
  Series<T> acc = Series<T>::constant(outer.domain(), N, outer[N]);
  for (int k = N - 1; k >= 0; --k) {
    acc = series_mul(acc, in);
    std::vector<T> c = acc.coefficients();
    c[0] += outer[k];
    acc = Series<T>(outer.domain(), std::move(c));
  }
  return acc;
}

template <class T>
Series<T> lagrange_solve(const Series<T>& phi, int order) {
  if (is_zero(phi[0])) throw std::invalid_argument("lagrange_solve needs phi(0) != 0");
  if (order < 0) throw std::invalid_argument("negative order");
  if (phi.order() < order - 1) throw std::invalid_argument("phi is truncated below the requested order");
  DomainScope scope(phi.domain());
  const Domain& d = phi.domain();
  const T zero = make<T>(d, 0);
  std::vector<T> t(static_cast<std::size_t>(order) + 1, zero);
  if (order == 0) return Series<T>(d, std::move(t));

  // pw[j][m] = [x^m] T^j for j >= 1, filled column by column: column m only
  // needs t_1..t_{m-j+1}, all known before t_{m+1} is formed.
  std::vector<std::vector<T>> pw(static_cast<std::size_t>(order));
  for (int j = 1; j < order; ++j) pw[j].assign(static_cast<std::size_t>(order), zero);

  t[1] = phi[0];
  for (int n = 2; n <= order; ++n) {
    const int m = n - 1;
    pw[1][m] = t[m];
    for (int j = 2; j <= m; ++j) {
      T acc = zero;
      for (int i = 1; i <= m - j + 1; ++i) acc += t[i] * pw[j - 1][m - i];
      pw[j][m] = std::move(acc);
    }
    T acc = zero;
    for (int j = 1; j <= m; ++j) {
      if (is_zero(phi[j])) continue;
      acc += phi[j] * pw[j][m];
    }
    t[n] = std::move(acc);
  }
  return Series<T>(d, std::move(t));
}

template <class T>
std::vector<T> egf_counts(const Series<T>& f) {
  DomainScope scope(f.domain());
  std::vector<T> out;
  out.reserve(f.coefficients().size());
  Integer fact = 1;
  for (int n = 0; n <= f.order(); ++n) {
    if (n > 0) fact *= n;
    out.push_back(f[n] * ScalarTraits<T>::from_rational(Rational(fact), f.domain()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// eval_with_tail

namespace {

// sum_{m > M} m^{-beta} by Euler-Maclaurin at M; returns {value, error bound}.
template <class T>
std::pair<T, T> zeta_tail(long M, const T& beta) {
  using std::abs;
  using std::pow;
  static const double bern[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  const T m = T(M);
  const T fM = pow(m, -beta);
  // sum_{k>=M} f(k) = int_M^inf f + f(M)/2 - sum_k B_2k/(2k)! f^{(2k-1)}(M)
  T total = pow(m, T(1) - beta) / (beta - 1) + fM / 2;
  T rising = beta;             // (beta)_{j}, j = 2k-1
  T mpow = fM / m;             // M^{-beta-j}
  T fact = 1;                  // (2k)!
  T last = 0;
  for (int k = 1; k <= 7; ++k) {
    const int j = 2 * k - 1;
    if (k > 1) {
      rising *= (beta + (j - 2)) * (beta + (j - 1));
      mpow /= m * m;
    }
    fact *= T(2 * k - 1) * T(2 * k);
    // f^{(j)}(M) = (-1)^j (beta)_j M^{-beta-j}, j odd
    T deriv = -rising * mpow;
    T term = T(bern[k - 1]) / fact * deriv;
    if (k == 7) {
      last = abs(term);
      break;
    }
    total -= term;
  }
  return {total - fM, last};
}

template <class T>
std::pair<T, T> power_tail(long M, const T& beta, const T& q, const T& eps) {
  using std::abs;
  using std::pow;
  if (q == 1) return zeta_tail<T>(M, beta);
  T sum = 0;
  T qm = pow(q, M);
  for (long m = M + 1; m < M + 20000000L; ++m) {
    qm *= q;
    T term = qm * pow(T(m), -beta);
    sum += term;
    T remainder = term * q / (1 - q);
    if (remainder <= eps * abs(sum) || term == 0) return {sum, remainder};
  }
  T term = qm * pow(T(M + 20000000L), -beta);
  return {sum, term * q / (1 - q)};
}

}  // namespace

template <class T>
TailEstimate<T> eval_with_tail(const Series<T>& f, const T& y0, const SingularMetadata* metadata,
                               int derivative_order) {
  using std::abs;
  using std::pow;
  DomainScope scope(f.domain());
  if (y0 < 0) throw std::domain_error("eval_with_tail: negative evaluation point");
  if (metadata && y0 > T(metadata->rho_B)) throw std::domain_error("eval_with_tail: point beyond rho_B");
  if (derivative_order < 0 || derivative_order > 1)
    throw std::invalid_argument("eval_with_tail: derivative order must be 0 or 1");

  const int N = f.order();
  T value = 0;
  T ypow = 1;
  T last = 0;
  for (int n = 0; n <= N; ++n) {
    last = f[n] * ypow;
    value += last;
    ypow *= y0;
  }
  if (!metadata || y0 == 0) return {value, abs(last)};

  const T rho = T(metadata->rho_B);
  const T q = y0 / rho;
  const int d = derivative_order;
  const T beta = T(2.5) - d;
  T eps;
  if constexpr (std::is_same_v<T, double>) {
    eps = 1e-17;
  } else {
    eps = pow(T(2), -static_cast<long>(f.domain().precision_bits));
  }
  auto [s, s_err] = power_tail<T>(static_cast<long>(N) + d, beta, q, eps);
  T scale = T(metadata->transfer_constant());
  if (d == 1) scale = scale / rho / q;
  T tail = scale * s;
  // First-order transfer only: the next singular term is O(1/N) relative.
  T model_error = abs(tail) * 2 / T(N);
  T error = model_error + abs(scale) * s_err + abs(value) * eps * T(N + 1);
  return {value + tail, error};
}

double power_tail_sum(long M, double beta, double q) {
  if (!(q > 0 && q <= 1)) throw std::domain_error("power_tail_sum needs 0 < q <= 1");
  if (q == 1 && !(beta > 1)) throw std::domain_error("power_tail_sum diverges");
  return power_tail<double>(M, beta, q, 1e-17).first;
}

// ---------------------------------------------------------------------------

template class Series<Rational>;
template class Series<PolyU>;
template class Series<BigFloat>;
template class Series<double>;

#define BWG_INSTANTIATE(T)                                                     \
  template Series<T> series_add(const Series<T>&, const Series<T>&);           \
  template Series<T> series_sub(const Series<T>&, const Series<T>&);           \
  template Series<T> series_mul(const Series<T>&, const Series<T>&);           \
  template Series<T> series_scale(const Series<T>&, const T&);                 \
  template Series<T> series_derive(const Series<T>&);                          \
  template Series<T> series_exp(const Series<T>&);                             \
  template Series<T> series_log(const Series<T>&);                             \
  template Series<T> series_compose(const Series<T>&, const Series<T>&);       \
  template Series<T> lagrange_solve(const Series<T>&, int);                    \
  template std::vector<T> egf_counts(const Series<T>&);

BWG_INSTANTIATE(Rational)
BWG_INSTANTIATE(PolyU)
BWG_INSTANTIATE(BigFloat)
BWG_INSTANTIATE(double)
#undef BWG_INSTANTIATE

template TailEstimate<BigFloat> eval_with_tail(const Series<BigFloat>&, const BigFloat&,
                                               const SingularMetadata*, int);
template TailEstimate<double> eval_with_tail(const Series<double>&, const double&,
                                             const SingularMetadata*, int);

}  // namespace bwg
