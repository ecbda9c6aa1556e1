#include "bwg/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace bwg {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::size_t kDirectCutoff = 64;

std::vector<double> convolve_fft(const std::vector<double>& a, const std::vector<double>& b, std::size_t keep) {
  std::size_t need = std::min(keep, a.size() + b.size() - 1);
  std::size_t n = 1;
  while (n < a.size() + b.size() - 1) n <<= 1;
  const std::size_t m = n / 2 + 1;
  double* ra = fftw_alloc_real(n);
  double* rb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(m);
  fftw_complex* cb = fftw_alloc_complex(m);
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + n, 0.0);
  std::fill(rb, rb + n, 0.0);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < m; ++i) {
    std::complex<double> x(ca[i][0], ca[i][1]), y(cb[i][0], cb[i][1]);
    auto z = x * y;
    ca[i][0] = z.real();
    ca[i][1] = z.imag();
  }
  fftw_execute(pinv);
  std::vector<double> out(keep, 0.0);
  for (std::size_t i = 0; i < need; ++i) out[i] = ra[i] / static_cast<double>(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

void exp_rec(const std::vector<double>& h, std::vector<double>& f, std::vector<double>& acc, std::size_t l,
             std::size_t r) {
  if (r - l <= kDirectCutoff) {
    for (std::size_t n = l; n < r; ++n) {
      if (n > 0) {
        double s = acc[n];
        for (std::size_t i = l; i < n; ++i) s += f[i] * h[n - i];
        f[n] = s / static_cast<double>(n);
      }
    }
    return;
  }
  const std::size_t mid = (l + r) / 2;
  exp_rec(h, f, acc, l, mid);
  std::vector<double> left(f.begin() + l, f.begin() + mid);
  std::vector<double> kern(h.begin(), h.begin() + (r - l));
  auto c = convolve(left, kern, r - l);
  for (std::size_t n = mid; n < r; ++n) acc[n] += c[n - l];
  exp_rec(h, f, acc, mid, r);
}

}  // namespace

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t keep) {
  if (a.empty() || b.empty()) return std::vector<double>(keep, 0.0);
  if (std::min(a.size(), b.size()) <= kDirectCutoff) {
    std::vector<double> out(keep, 0.0);
    for (std::size_t i = 0; i < a.size() && i < keep; ++i) {
      if (a[i] == 0) continue;
      const std::size_t lim = std::min(b.size(), keep - i);
      for (std::size_t j = 0; j < lim; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  return convolve_fft(a, b, keep);
}

std::vector<double> exp_series(const std::vector<double>& g) {
  if (g.empty()) return {};
  if (g[0] != 0) throw std::invalid_argument("exp_series needs g_0 = 0");
  const std::size_t N = g.size();
  std::vector<double> h(N);
  for (std::size_t k = 0; k < N; ++k) h[k] = static_cast<double>(k) * g[k];
  std::vector<double> f(N, 0.0), acc(N, 0.0);
  f[0] = 1;
  exp_rec(h, f, acc, 0, N);
  return f;
}

}  // namespace bwg
